#include <algorithm>
#include <cmath>

#include "greedy/estimators.hpp"
#include "greedy/parallel.hpp"

namespace greedy {

namespace {

struct Sample {
  double value = 0.0;
  bool proven = true;
};

GridPoint grid_point(double parameter, const std::vector<Sample>& samples) {
  std::vector<double> xs;
  xs.reserve(samples.size());
  std::size_t unproven = 0;
  for (const auto& s : samples) {
    xs.push_back(s.value);
    if (!s.proven) ++unproven;
  }
  const Summary sm = summarize(xs);
  return {parameter, sm.mean, sm.ci_half_width, sm.replicas, unproven};
}

void require_increasing(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInput("empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("grid must be increasing");
  }
}

Sample solve_lln(const ProcessSpec& process, SolverMode mode, const Norm& norm, double ell,
                 std::uint64_t seed, const SolveOptions& opts) {
  const Point origin(static_cast<std::size_t>(process.dim), 0.0);
  SolveResult res;
  switch (mode) {
    case SolverMode::path: {
      const auto r = sample_process(process, origin, ell, seed);
      PathQuery q = PathQuery::from_origin(ell, norm);
      res = max_mass_path(r, q, opts);
      break;
    }
    case SolverMode::animal_inf: {
      const auto r = sample_process(process, origin, ell, seed);
      AnimalQuery q;
      q.x = origin;
      q.ell = ell;
      q.norm = norm;
      res = max_mass_animal_inf(r, q, opts);
      break;
    }
    case SolverMode::lattice_animal:
    case SolverMode::lattice_path:
    case SolverMode::lattice_sa_path: {
      const int n = static_cast<int>(std::lround(ell));
      if (n < 1 || std::abs(ell - n) > 1e-9) throw InvalidInput("lattice grids need positive integers");
      const Site anchor(static_cast<std::size_t>(process.dim), 0);
      const auto r = sample_process(process, origin, mode == SolverMode::lattice_animal ? n - 1 : n, seed);
      res = mode == SolverMode::lattice_animal
                ? lattice_max_animal(r, n, {anchor}, opts)
                : lattice_max_path(r, n, mode == SolverMode::lattice_sa_path, anchor, opts);
      break;
    }
  }
  return {res.value / ell, res.proven_optimal};
}

}  // namespace

EstimateReport estimate_lln_curve(const ProcessSpec& process, SolverMode mode, const Norm& norm,
                                  const std::vector<double>& ell_grid, std::size_t replicas,
                                  std::uint64_t seed, const RunOptions& run) {
  require_increasing(ell_grid);
  if (!(ell_grid.front() > 0.0)) throw InvalidInput("lengths must be positive");
  EstimateReport rep;
  rep.label = "lln";
  rep.master_seed = seed;
  for (std::size_t gi = 0; gi < ell_grid.size(); ++gi) {
    const double ell = ell_grid[gi];
    const auto samples = parallel_replicas<Sample>(replicas, run.jobs, [&](std::size_t j) {
      return solve_lln(process, mode, norm, ell, replica_seed(seed, gi, j), run.solve);
    });
    rep.grid.push_back(grid_point(ell, samples));
    rep.unproven_total += rep.grid.back().unproven;
  }
  double fekete = 0.0;
  for (const auto& g : rep.grid) fekete = std::max(fekete, g.mean);
  rep.fekete_estimate = fekete;
  return rep;
}

DirectionalReport estimate_directional_limit(const DirectionalQuery& q, const ProcessSpec& process,
                                             std::size_t replicas, std::uint64_t seed,
                                             const RunOptions& run) {
  if (!(q.a < q.b)) throw InvalidInput("need a < b");
  if (!(q.delta > 0.0 && q.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (static_cast<int>(q.direction.size()) != process.dim) throw InvalidInput("direction dimension mismatch");
  if (std::abs(q.norm(q.direction) - 1.0) > 1e-9) throw InvalidInput("direction must be a unit vector");
  require_increasing(q.ell_grid);
  if (q.beta_grid.empty()) throw InvalidInput("empty beta grid");
  for (double b : q.beta_grid) {
    if (!(std::abs(b) < 1.0)) throw InvalidInput("beta must lie in (-1, 1)");
  }

  struct Triple {
    Sample none, diamond, anti;
  };

  DirectionalReport out;
  const std::size_t nb = q.beta_grid.size();
  for (std::size_t li = 0; li < q.ell_grid.size(); ++li) {
    const double ell = q.ell_grid[li];
    const double budget = (q.b - q.a) * ell;
    DirectionalLevel level;
    level.ell = ell;
    level.unrestricted.label = "unrestricted";
    level.diamond.label = "diamond";
    level.antidiamond.label = "antidiamond";
    for (auto* rep : {&level.unrestricted, &level.diamond, &level.antidiamond}) rep->master_seed = seed;

    for (std::size_t bi = 0; bi < nb; ++bi) {
      const double beta = q.beta_grid[bi];
      const Point x = scale(q.direction, q.a * ell * beta);
      const Point y = scale(q.direction, q.b * ell * beta);
      const Point mid = scale(add(x, y), 0.5);
      const double dxy = q.norm.distance(x, y);
      const double reach = q.animals ? budget - 0.5 * dxy : 0.5 * budget;
      const bool restricted = beta != 0.0;

      auto solve = [&](const MarkedRealization& r, Restriction restriction) {
        SolveResult res;
        if (q.animals) {
          AnimalQuery aq;
          aq.x = x;
          aq.y = y;
          aq.ell = budget;
          aq.norm = q.norm;
          aq.restriction = restriction;
          aq.delta = q.delta;
          res = max_mass_animal_inf(r, aq, run.solve);
        } else {
          res = max_mass_path(r, PathQuery::two_point(x, y, budget, q.norm, restriction, q.delta),
                              run.solve);
        }
        return Sample{res.value / budget, res.proven_optimal};
      };

      const auto triples = parallel_replicas<Triple>(replicas, run.jobs, [&](std::size_t j) {
        const auto r = sample_process(process, mid, reach, replica_seed(seed, li * nb + bi, j));
        Triple t;
        t.none = solve(r, Restriction::none);
        if (restricted) {
          t.diamond = solve(r, Restriction::diamond);
          t.anti = solve(r, Restriction::antidiamond);
        }
        return t;
      });

      std::vector<Sample> a, d, n;
      for (const auto& t : triples) {
        n.push_back(t.none);
        d.push_back(t.diamond);
        a.push_back(t.anti);
      }
      level.unrestricted.grid.push_back(grid_point(beta, n));
      if (restricted) {
        level.diamond.grid.push_back(grid_point(beta, d));
        level.antidiamond.grid.push_back(grid_point(beta, a));
      }
    }
    for (auto* rep : {&level.unrestricted, &level.diamond, &level.antidiamond}) {
      for (const auto& g : rep->grid) rep->unproven_total += g.unproven;
    }
    out.levels.push_back(std::move(level));
  }
  out.g_hat = out.levels.back().unrestricted;
  out.g_hat.label = "g_hat";
  return out;
}

FeketeResult fekete_time_constant(const std::vector<TimeSample>& samples) {
  if (samples.empty()) throw InvalidInput("no samples");
  FeketeResult res{0.0, true, {}};
  for (const auto& s : samples) {
    if (!(s.t > 0.0)) throw PreconditionError("times must be positive");
    if (!(s.mean >= 0.0)) throw PreconditionError("means must be nonnegative");
    res.estimate = std::max(res.estimate, s.mean / s.t);
  }
  auto find = [&](double t) -> const TimeSample* {
    for (const auto& s : samples) {
      if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, t)) return &s;
    }
    return nullptr;
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i; j < samples.size(); ++j) {
      const auto* sum = find(samples[i].t + samples[j].t);
      if (!sum) continue;
      const double slack = sum->ci_half_width + samples[i].ci_half_width + samples[j].ci_half_width;
      if (sum->mean + slack < samples[i].mean + samples[j].mean) {
        res.superadditive_compatible = false;
        res.violations.push_back("mean(" + std::to_string(sum->t) + ") < mean(" +
                                 std::to_string(samples[i].t) + ") + mean(" +
                                 std::to_string(samples[j].t) + ")");
      }
    }
  }
  return res;
}

}  // namespace greedy
