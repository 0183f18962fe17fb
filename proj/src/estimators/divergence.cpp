#include <algorithm>
#include <cmath>

#include "greedy/estimators.hpp"
#include "greedy/parallel.hpp"

namespace greedy {

namespace {

// Row 0 from the origin to column v, then W - |v| steps up column v: a self-avoiding path of W
// steps whose mass is a lower bound for P(W).
double columnar_statistic(const MarkDistribution& marks, int W, std::uint64_t seed) {
  LatticeBox box{{-W, 0}, {W, 0}};
  const auto r = sample_lattice_columnar(marks, box, seed);
  auto column = [&](int v) { return r.atoms[static_cast<std::size_t>(v + W)].mass; };
  double best = 0.0;
  for (int sign : {1, -1}) {
    double row = 0.0;
    for (int k = 0; k <= W; ++k) {
      const int v = sign * k;
      row += column(v);
      best = std::max(best, row + (W - k) * column(v));
    }
  }
  return best / W;
}

// The heaviest atom within Euclidean distance W of the origin is reachable by a path of length W.
double pareto_statistic(const DivergenceSpec& spec, int W, std::uint64_t seed) {
  const auto r = sample_poisson_marked(spec.lambda, spec.marks, Window::box({0.0, 0.0}, {1.0 * W, 1.0 * W}), seed);
  double best = 0.0;
  for (const auto& a : r.atoms) {
    if (euclidean_norm(a.loc) <= W) best = std::max(best, a.mass);
  }
  return best / W;
}

}  // namespace

Diagnostic divergence_probe(const DivergenceSpec& spec, std::size_t replicas, std::uint64_t seed,
                            const RunOptions& run) {
  if (spec.windows.size() < 2) throw InvalidInput("need at least two windows");
  for (std::size_t i = 0; i < spec.windows.size(); ++i) {
    if (spec.windows[i] < 1 || (i > 0 && spec.windows[i] <= spec.windows[i - 1])) {
      throw InvalidInput("windows must be positive and increasing");
    }
  }
  const bool columnar = spec.kind == DivergenceSpec::Kind::columnar;
  // Heavy-tailed maxima have no finite variance, so the Poisson probe is summarised on the log
  // scale (geometric mean).
  const bool log_scale = !columnar;

  Diagnostic d;
  d.name = columnar ? "divergence_columnar" : "divergence_poisson_pareto";
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> centre, lo, hi;
  for (std::size_t wi = 0; wi < spec.windows.size(); ++wi) {
    const int W = spec.windows[wi];
    const auto stats = parallel_replicas<double>(replicas, run.jobs, [&](std::size_t j) {
      const auto s = replica_seed(seed, wi, j);
      return columnar ? columnar_statistic(spec.marks, W, s) : pareto_statistic(spec, W, s);
    });
    std::vector<double> xs = stats;
    if (log_scale) {
      for (double& v : xs) v = std::log(std::max(v, 1e-300));
    }
    const Summary s = summarize(xs);
    double c = s.mean, l = s.mean - s.ci_half_width, h = s.mean + s.ci_half_width;
    if (log_scale) {
      c = std::exp(c);
      l = std::exp(l);
      h = std::exp(h);
    }
    centre.push_back(c);
    lo.push_back(l);
    hi.push_back(h);
    rows.push_back({{"window", W}, {"statistic", c}, {"ci_low", l}, {"ci_high", h}, {"replicas", replicas}});
  }

  // Least-squares slope of log statistic against log window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(centre.size());
  for (std::size_t i = 0; i < centre.size(); ++i) {
    const double x = std::log(static_cast<double>(spec.windows[i]));
    const double y = std::log(std::max(centre[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  bool above_all = true;
  for (double t : spec.thresholds) above_all = above_all && centre.back() > t;
  const bool rising = lo.back() > hi.front();
  const std::string classification = above_all && rising ? "divergence" : "plateau";

  d.details["rows"] = rows;
  d.details["slope"] = slope;
  d.details["summary"] = log_scale ? "geometric mean" : "mean";
  d.details["thresholds"] = spec.thresholds;
  d.details["above_all_thresholds"] = above_all;
  d.details["rising"] = rising;
  d.details["classification"] = classification;
  if (!spec.expect.empty()) {
    if (spec.expect != "divergence" && spec.expect != "plateau") {
      throw InvalidInput("expect must be divergence or plateau");
    }
    d.add("classified " + classification + ", expected " + spec.expect,
          classification == spec.expect ? 0.0 : -1.0);
  }
  return d;
}

}  // namespace greedy
