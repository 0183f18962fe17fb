#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "greedy/estimators.hpp"
#include "greedy/parallel.hpp"

namespace greedy {

namespace {

const GridPoint* find_param(const EstimateReport& r, double beta) {
  for (const auto& g : r.grid) {
    if (std::abs(g.parameter - beta) <= 1e-9) return &g;
  }
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Diagnostic check_concavity(const EstimateReport& r) {
  if (r.grid.size() < 3) throw InvalidInput("concavity needs at least three grid points");
  Diagnostic d;
  d.name = "concavity";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    for (std::size_t j = i + 1; j < r.grid.size(); ++j) {
      const auto& g1 = r.grid[i];
      const auto& g2 = r.grid[j];
      const auto* mid = find_param(r, 0.5 * (g1.parameter + g2.parameter));
      if (!mid || mid == &g1 || mid == &g2) continue;
      const double slack = g1.ci_half_width + g2.ci_half_width + 2.0 * mid->ci_half_width;
      d.add("(" + fmt(g1.parameter) + ", " + fmt(g2.parameter) + ")",
            2.0 * mid->mean + slack - g1.mean - g2.mean);
    }
  }
  return d;
}

Diagnostic check_symmetry(const EstimateReport& r) {
  if (r.grid.size() < 2) throw InvalidInput("symmetry needs at least two grid points");
  Diagnostic d;
  d.name = "symmetry";
  for (const auto& g : r.grid) {
    if (!(g.parameter > 0.0)) continue;
    const auto* m = find_param(r, -g.parameter);
    if (!m) continue;
    d.add("+-" + fmt(g.parameter), g.ci_half_width + m->ci_half_width - std::abs(g.mean - m->mean));
  }
  return d;
}

Diagnostic check_monotonicity(const EstimateReport& r) {
  if (r.grid.size() < 2) throw InvalidInput("monotonicity needs at least two grid points");
  Diagnostic d;
  d.name = "monotonicity";
  std::vector<const GridPoint*> pos;
  for (const auto& g : r.grid) {
    if (g.parameter >= -1e-12) pos.push_back(&g);
  }
  std::sort(pos.begin(), pos.end(),
            [](const GridPoint* a, const GridPoint* b) { return a->parameter < b->parameter; });
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      d.add(fmt(pos[i]->parameter) + " -> " + fmt(pos[j]->parameter),
            pos[i]->mean - pos[j]->mean + pos[i]->ci_half_width + pos[j]->ci_half_width);
    }
  }
  return d;
}

Diagnostic tail_bound_check(double lambda, int dim, const std::vector<double>& alpha_grid,
                            double ell_max, std::size_t replicas, std::uint64_t seed,
                            const RunOptions& run) {
  if (!(lambda > 0.0)) throw InvalidInput("intensity must be positive");
  if (!(ell_max >= 1.0)) throw InvalidInput("ell_max must be at least 1");
  if (alpha_grid.empty()) throw InvalidInput("empty alpha grid");
  for (double a : alpha_grid) {
    if (!(a > 0.0)) throw InvalidInput("alpha must be positive");
  }
  const Norm norm = Norm::l1(dim);
  const Point origin(static_cast<std::size_t>(dim), 0.0);
  ProcessSpec process;
  process.kind = ProcessSpec::Kind::poisson;
  process.dim = dim;
  process.lambda = lambda;

  struct Outcome {
    std::vector<char> hit;
    bool proven = true;
  };

  // sup over [1, ell_max] of P(l) / l >= alpha iff P(ell_max) >= alpha ell_max or P(k / alpha) >= k
  // for an integer k in [alpha, alpha ell_max], since P is a nondecreasing integer step function.
  const auto outcomes = parallel_replicas<Outcome>(replicas, run.jobs, [&](std::size_t j) {
    const auto r = sample_process(process, origin, ell_max, replica_seed(seed, 0, j));
    std::vector<double> radii;
    for (const auto& a : r.atoms) radii.push_back(norm(a.loc));
    std::sort(radii.begin(), radii.end());
    auto within = [&](double l) {
      return static_cast<double>(std::upper_bound(radii.begin(), radii.end(), l + kGeomTol) - radii.begin());
    };
    Outcome out;
    auto solve = [&](double l) {
      const auto res = max_mass_path(r, PathQuery::from_origin(l, norm), run.solve);
      if (!res.proven_optimal) out.proven = false;
      return res.value;
    };
    const double p_max = solve(ell_max);
    const bool p_max_proven = out.proven;
    for (double alpha : alpha_grid) {
      bool hit = p_max >= alpha * ell_max;
      // Undecided solves count as hits, which only makes the frequency larger.
      if (!hit && !p_max_proven) hit = true;
      const double k_hi = std::min(std::floor(alpha * ell_max + 1e-9), p_max);
      for (double k = std::ceil(alpha - 1e-9); !hit && k <= k_hi; k += 1.0) {
        const double l = k / alpha;
        if (within(l) < k) continue;
        const auto res = max_mass_path(r, PathQuery::from_origin(l, norm), run.solve);
        if (!res.proven_optimal) out.proven = false;
        hit = res.value >= k || !res.proven_optimal;
      }
      out.hit.push_back(hit ? 1 : 0);
    }
    return out;
  });

  Diagnostic d;
  d.name = "tail_bound";
  nlohmann::json rows = nlohmann::json::array();
  std::vector<std::size_t> hits(alpha_grid.size(), 0);
  for (const auto& o : outcomes) {
    if (!o.proven) d.unproven = true;
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) hits[i] += o.hit[i];
  }
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    const double alpha = alpha_grid[i];
    const double bound = std::pow(2.0, dim + 1) * std::numbers::e * lambda * std::pow(alpha, -dim);
    const Summary f = summarize_frequency(hits[i], replicas);
    d.add("alpha=" + fmt(alpha), bound + f.ci_half_width - f.mean);
    rows.push_back({{"alpha", alpha},
                    {"frequency", f.mean},
                    {"ci_half_width", f.ci_half_width},
                    {"bound", bound},
                    {"replicas", replicas}});
  }
  // The event shrinks as alpha grows on every realization.
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
      if (alpha_grid[k] > alpha_grid[i] && hits[k] > hits[i]) {
        d.add("nested events " + fmt(alpha_grid[i]) + " < " + fmt(alpha_grid[k]), -1.0);
      }
    }
  }
  d.details["rows"] = rows;
  d.details["ell_max"] = ell_max;
  d.details["norm"] = "l1";
  return d;
}

}  // namespace greedy
