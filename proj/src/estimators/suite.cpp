#include <algorithm>
#include <cmath>
#include <map>

#include "greedy/estimators.hpp"
#include "greedy/json_io.hpp"
#include "greedy/parallel.hpp"

namespace greedy {

namespace {

constexpr double kRelTol = 1e-12;

struct Check {
  std::string name;
  double margin;
};

struct InstanceOutcome {
  std::vector<Check> checks;
  std::map<std::string, std::size_t> skipped;
  bool proven = true;
  nlohmann::json instance;
};

double tol(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

class InstanceRunner {
 public:
  InstanceRunner(const SuiteSpec& spec, const SolveOptions& solve, InstanceOutcome& out)
      : spec_(spec), out_(out) {
    opts_ = solve;
    opts_.check_window = false;
  }

  void le(const std::string& name, double a, double b) { out_.checks.push_back({name, b - a + tol(a, b)}); }
  void eq(const std::string& name, double a, double b) { out_.checks.push_back({name, -std::abs(a - b)}); }
  void near(const std::string& name, double a, double b) {
    out_.checks.push_back({name, tol(a, b) - std::abs(a - b)});
  }

  SolveResult path(const MarkedRealization& r, const PathQuery& q) {
    auto res = max_mass_path(r, q, opts_);
    if (!res.proven_optimal) out_.proven = false;
    return res;
  }
  SolveResult animal(const MarkedRealization& r, const AnimalQuery& q) {
    auto res = max_mass_animal_inf(r, q, opts_);
    if (!res.proven_optimal) out_.proven = false;
    return res;
  }

  void continuum(const MarkedRealization& r, const Point& x, const std::optional<Point>& y,
                 double ell, const Norm& norm, double delta) {
    AnimalQuery aq;
    aq.x = x;
    aq.y = y;
    aq.ell = ell;
    aq.norm = norm;
    PathQuery pq = y ? PathQuery::two_point(x, *y, ell, norm) : PathQuery::from_origin(ell, norm);
    pq.x = x;
    const auto p = path(r, pq);
    const auto a = animal(r, aq);

    if (spec_.sandwich) {
      PathQuery pq2 = pq;
      pq2.ell = 2.0 * ell;
      const auto p2 = path(r, pq2);
      le("sandwich P <= A", p.value, a.value);
      le("sandwich A <= P(2l)", a.value, p2.value);
    }
    if (spec_.certificates) {
      if (p.path && !p.infeasible) {
        le("path certificate length", path_length(*p.path, norm), ell);
        near("path certificate mass", mass_of_vertex_set(r, p.path->vertices), p.value);
      }
      if (a.animal) {
        double reach = std::numeric_limits<double>::infinity(), reach_y = reach;
        for (const auto& v : a.animal->vertices) {
          reach = std::min(reach, norm.distance(x, v));
          if (y) reach_y = std::min(reach_y, norm.distance(*y, v));
        }
        const double cost = animal_length(*a.animal, norm) + reach + (y ? reach_y : 0.0);
        le("animal certificate length", cost, ell);
        near("animal certificate mass", mass_of_vertex_set(r, a.animal->vertices), a.value);
      }
    }
    if (spec_.layers) {
      for (const auto* verts : {p.path ? &p.path->vertices : nullptr, a.animal ? &a.animal->vertices : nullptr}) {
        if (!verts) continue;
        const double direct = mass_of_vertex_set(r, *verts);
        const double layered = layer_mass(r, *verts);
        out_.checks.push_back({"layer identity", kRelTol * std::abs(direct) - std::abs(direct - layered)});
      }
    }
    if (spec_.restriction && y && *y != x) {
      for (Restriction rs : {Restriction::diamond, Restriction::antidiamond}) {
        PathQuery rq = pq;
        rq.restriction = rs;
        rq.delta = delta;
        AnimalQuery ra = aq;
        ra.restriction = rs;
        ra.delta = delta;
        const auto rp = path(r, rq);
        const auto rb = animal(r, ra);
        le("restricted path <= path", rp.value, p.value);
        le("restricted animal <= animal", rb.value, a.value);
        if (rs == Restriction::diamond) {
          rq.restriction = Restriction::antidiamond;
          ra.restriction = Restriction::antidiamond;
          le("diamond path <= antidiamond path", rp.value, path(r, rq).value);
          le("diamond animal <= antidiamond animal", rb.value, animal(r, ra).value);
        }
      }
    }
    if (spec_.path_oracle) {
      try {
        eq("path oracle", p.value, brute_force_path_oracle(r, pq));
      } catch (const OracleRefusal&) {
        ++out_.skipped["path oracle"];
      }
    }
    if (spec_.animal_oracle) {
      try {
        eq("animal oracle", a.value, brute_force_animal_oracle(r, aq));
      } catch (const OracleRefusal&) {
        ++out_.skipped["animal oracle"];
      }
    }
  }

  const SolveOptions& opts() const { return opts_; }

 private:
  const SuiteSpec& spec_;
  InstanceOutcome& out_;
  SolveOptions opts_;
};

InstanceOutcome run_poisson_instance(const SuiteSpec& spec, std::uint64_t seed, const SolveOptions& solve) {
  InstanceOutcome out;
  const int d = spec.process.dim;
  const Window w = Window::box(Point(static_cast<std::size_t>(d), 0.0),
                               Point(static_cast<std::size_t>(d), spec.half_width));
  MarkedRealization r;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : splitmix64(seed + attempt);
    if (spec.process.kind == ProcessSpec::Kind::empty) {
      r = MarkedRealization{};
      r.dim = d;
      r.window = w;
    } else {
      r = sample_poisson_marked(spec.process.lambda, spec.process.marks, w, s);
    }
    if (r.atoms.size() <= spec.max_atoms) break;
  }
  out.instance = to_json(r);
  Engine rng = make_engine(splitmix64(seed ^ 0x9fb21c651e98df25ULL));
  const Norm norm = d == 2 && uniform01(rng) < 0.5 ? Norm::l1(d) : Norm::l2(d);
  Point y(static_cast<std::size_t>(d));
  for (auto& c : y) c = spec.half_width * (2.0 * uniform01(rng) - 1.0);
  const double delta = 0.1 + 0.8 * uniform01(rng);
  out.instance["y"] = y;
  out.instance["delta"] = delta;
  out.instance["norm_p"] = norm.p();

  InstanceRunner run(spec, solve, out);
  const Point origin(static_cast<std::size_t>(d), 0.0);
  for (double ell : spec.ell_grid) {
    run.continuum(r, origin, std::nullopt, ell, norm, delta);
    run.continuum(r, origin, y, ell, norm, delta);
  }
  return out;
}

InstanceOutcome run_lattice_instance(const SuiteSpec& spec, std::uint64_t seed, const SolveOptions& solve) {
  InstanceOutcome out;
  const int side = spec.lattice_side;
  const int d = spec.process.dim;
  LatticeBox box{std::vector<int>(static_cast<std::size_t>(d), 0), std::vector<int>(static_cast<std::size_t>(d), side - 1)};
  const MarkedRealization r = spec.process.kind == ProcessSpec::Kind::lattice_columnar
                                  ? sample_lattice_columnar(spec.process.marks, box, seed)
                                  : sample_lattice_iid(spec.process.marks, box, seed);
  out.instance = to_json(r);
  Engine rng = make_engine(splitmix64(seed ^ 0x9fb21c651e98df25ULL));
  const Site x(static_cast<std::size_t>(d), side / 2);
  Site y(static_cast<std::size_t>(d));
  for (auto& c : y) c = static_cast<int>(std::floor(uniform01(rng) * side));
  out.instance["x"] = x;
  out.instance["y"] = y;

  InstanceRunner run(spec, solve, out);
  if (spec.reduction) {
    for (int n : spec.reduction_n) {
      const auto rc = lattice_reduction_check(r, x, y, n);
      run.eq("lattice reduction", rc.lattice_value, rc.continuum_value);
    }
  }
  if (spec.lattice_oracle) {
    for (int n : spec.lattice_animal_n) {
      for (const auto& anchors : {std::vector<Site>{x}, std::vector<Site>{x, y}}) {
        const auto res = lattice_max_animal(r, n, anchors, run.opts());
        if (!res.proven_optimal) out.proven = false;
        run.eq("lattice animal oracle", res.value, brute_force_lattice_animal(r, n, anchors));
      }
    }
    for (int n : spec.lattice_path_n) {
      for (bool sa : {false, true}) {
        const auto res = lattice_max_path(r, n, sa, x, run.opts());
        if (!res.proven_optimal) out.proven = false;
        run.eq(sa ? "lattice self-avoiding path oracle" : "lattice path oracle", res.value,
               brute_force_lattice_path(r, n, sa, x));
      }
    }
  }
  if (spec.sandwich || spec.certificates || spec.layers) {
    SuiteSpec local = spec;
    local.restriction = false;
    InstanceRunner cont(local, solve, out);
    const Point px(x.begin(), x.end()), py(y.begin(), y.end());
    for (int n : spec.reduction_n) {
      cont.continuum(r, px, std::nullopt, n, Norm::l1(d), 0.5);
      cont.continuum(r, px, py, n, Norm::l1(d), 0.5);
    }
  }
  return out;
}

}  // namespace

Diagnostic sandwich_and_identity_suite(const SuiteSpec& spec, std::size_t instance_count,
                                       std::uint64_t seed, const RunOptions& run) {
  const auto outcomes = parallel_replicas<InstanceOutcome>(instance_count, run.jobs, [&](std::size_t j) {
    const auto s = replica_seed(seed, 0, j);
    return spec.kind == SuiteSpec::Kind::poisson ? run_poisson_instance(spec, s, run.solve)
                                                 : run_lattice_instance(spec, s, run.solve);
  });

  Diagnostic d;
  d.name = "suite";
  d.structural = true;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // checked, failed
  std::map<std::string, std::size_t> skipped;
  nlohmann::json failing = nlohmann::json::array();
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    const auto& o = outcomes[j];
    if (!o.proven) d.unproven = true;
    bool bad = false;
    for (const auto& c : o.checks) {
      auto& [checked, failed] = counts[c.name];
      ++checked;
      if (c.margin < 0.0) {
        ++failed;
        bad = true;
      }
      d.tally(c.name + " (instance " + std::to_string(j) + ")", c.margin);
    }
    for (const auto& [k, v] : o.skipped) skipped[k] += v;
    if (bad && failing.size() < kMaxKeptItems) {
      nlohmann::json inst = o.instance;
      inst["index"] = j;
      failing.push_back(std::move(inst));
    }
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, v] : counts) summary[k] = {{"checked", v.first}, {"failed", v.second}};
  d.details["checks"] = summary;
  d.details["skipped"] = skipped;
  d.details["instances"] = instance_count;
  d.details["failing_instances"] = failing;
  return d;
}

Diagnostic layer_identity_check(const ProcessSpec& process, std::size_t sets, std::uint64_t seed,
                                const RunOptions& run) {
  struct Outcome {
    double direct;
    double layered;
  };
  const auto outcomes = parallel_replicas<Outcome>(sets, run.jobs, [&](std::size_t j) {
    const auto s = replica_seed(seed, 0, j);
    const Point origin(static_cast<std::size_t>(process.dim), 0.0);
    const auto r = sample_process(process, origin, 2.0, s);
    Engine rng = make_engine(splitmix64(s ^ 0x94d049bb133111ebULL));
    // A random subset of the atoms, sometimes with repeats and a point off the support.
    std::vector<Point> verts;
    for (const auto& a : r.atoms) {
      if (uniform01(rng) < 0.5) verts.push_back(a.loc);
    }
    if (!verts.empty() && uniform01(rng) < 0.3) verts.push_back(verts.front());
    if (uniform01(rng) < 0.3) verts.push_back(Point(static_cast<std::size_t>(process.dim), 0.123456789));
    return Outcome{mass_of_vertex_set(r, verts), layer_mass(r, verts)};
  });
  Diagnostic d;
  d.name = "layer_identity";
  d.structural = true;
  double worst = 0.0;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    const auto& o = outcomes[j];
    const double diff = std::abs(o.direct - o.layered);
    const double rel = o.direct != 0.0 ? diff / std::abs(o.direct) : diff;
    worst = std::max(worst, rel);
    d.tally("set " + std::to_string(j), kRelTol - rel);
  }
  d.details["sets"] = sets;
  d.details["worst_relative_error"] = worst;
  return d;
}

}  // namespace greedy
