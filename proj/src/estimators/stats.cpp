#include <algorithm>
#include <cmath>
#include <numeric>

#include "greedy/estimators.hpp"

namespace greedy {

Summary summarize(const std::vector<double>& xs, double z) {
  if (xs.size() < 2) throw InvalidInput("a summary needs at least two replicas");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd, z * sd / std::sqrt(n), xs.size()};
}

Summary summarize_frequency(std::size_t hits, std::size_t n, double z) {
  if (n < 2) throw InvalidInput("a frequency needs at least two trials");
  const double f = static_cast<double>(hits) / static_cast<double>(n);
  const double sd = std::sqrt(f * (1.0 - f));
  return {f, sd, z * sd / std::sqrt(static_cast<double>(n)), n};
}

std::uint64_t replica_seed(std::uint64_t master, std::size_t grid_index, std::size_t replica) {
  return stream_seed(master, (static_cast<std::uint64_t>(grid_index) << 32) | replica);
}

void Diagnostic::add(std::string label, double margin) {
  const bool ok = margin >= 0.0;
  if (checked == 0 || margin < worst_margin) worst_margin = margin;
  ++checked;
  if (!ok) {
    ++failed;
    pass = false;
  }
  items.push_back({std::move(label), margin, ok});
}

void Diagnostic::tally(const std::string& label, double margin) {
  const bool ok = margin >= 0.0;
  if (checked == 0 || margin < worst_margin) worst_margin = margin;
  ++checked;
  if (!ok) {
    ++failed;
    pass = false;
    if (items.size() < kMaxKeptItems) items.push_back({label, margin, ok});
  }
}

MarkedRealization sample_process(const ProcessSpec& p, const Point& center, double reach,
                                 std::uint64_t seed) {
  if (static_cast<int>(center.size()) != p.dim) throw InvalidInput("centre dimension mismatch");
  if (!(reach >= 0.0)) throw InvalidInput("reach must be nonnegative");
  const std::size_t d = center.size();
  // A little slack so that queries touching the boundary are still accepted.
  const double half = reach + 1e-6;
  switch (p.kind) {
    case ProcessSpec::Kind::poisson:
      return sample_poisson_marked(p.lambda, p.marks, Window::box(center, Point(d, half)), seed);
    case ProcessSpec::Kind::lattice_iid:
    case ProcessSpec::Kind::lattice_columnar: {
      const int R = static_cast<int>(std::ceil(reach - 1e-9));
      LatticeBox box;
      for (double c : center) {
        const int m = static_cast<int>(std::lround(c));
        box.lo.push_back(m - R);
        box.hi.push_back(m + R);
      }
      return p.kind == ProcessSpec::Kind::lattice_iid ? sample_lattice_iid(p.marks, box, seed)
                                                      : sample_lattice_columnar(p.marks, box, seed);
    }
    case ProcessSpec::Kind::dpp_grid: {
      const auto spec = DppKernelSpec::projection(p.dpp_side, p.dpp_cells, p.dim, p.dpp_radius, p.marks);
      MarkedRealization r = sample_dpp_grid(spec, seed);
      Point shift(d);
      for (std::size_t i = 0; i < d; ++i) shift[i] = center[i] - 0.5 * p.dpp_side;
      r = shift_realization(r, shift);
      if (!r.window.contains_ball(center, reach, Norm::linf(p.dim))) {
        throw UnsupportedError("query reach exceeds the DPP torus");
      }
      return r;
    }
    case ProcessSpec::Kind::single_atom: {
      MarkedRealization r;
      r.dim = p.dim;
      r.window = Window::box(center, Point(d, half));
      const Point origin(d, 0.0);
      if (r.window.contains(origin)) r.atoms.push_back({origin, p.marks.mean()});
      return r;
    }
    case ProcessSpec::Kind::empty: {
      MarkedRealization r;
      r.dim = p.dim;
      r.window = Window::box(center, Point(d, half));
      return r;
    }
  }
  throw InvalidInput("unknown process kind");
}

}  // namespace greedy
