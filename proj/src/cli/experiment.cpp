#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "greedy/experiment.hpp"
#include "greedy/json_io.hpp"
#include "greedy/parallel.hpp"
#include "schema.hpp"

namespace greedy {

using nlohmann::json;
using detail::Obj;

namespace {

// Every piece of work is first parsed into a closure; nothing runs until the whole config has
// been validated.
using Task = std::function<void(ExperimentOutcome&)>;

struct Context {
  std::uint64_t seed = 0;
  RunOptions run;
  bool require_proof = false;
  bool has_process = false;
  ProcessSpec process;
};

std::size_t replicas_at(Obj& o, const std::string& key, std::size_t fallback) {
  const auto n = o.opt<std::size_t>(key, fallback);
  if (n < kReplicaFloor) {
    throw SchemaError(o.at(key) + ": at least " + std::to_string(kReplicaFloor) + " replicas are required");
  }
  return n;
}

std::size_t positive_count(Obj& o, const std::string& key, std::size_t fallback) {
  const auto n = o.opt<std::size_t>(key, fallback);
  if (n == 0) throw SchemaError(o.at(key) + ": must be positive");
  return n;
}

std::vector<double> increasing_grid(Obj& o, const std::string& key, std::optional<std::vector<double>> fallback = {}) {
  std::vector<double> g;
  if (fallback && !o.has(key)) {
    g = *fallback;
  } else {
    g = o.req<std::vector<double>>(key);
  }
  if (g.empty()) throw SchemaError(o.at(key) + ": empty grid");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw SchemaError(o.at(key) + ": grid must be increasing");
  }
  return g;
}

Norm norm_at(Obj& o, const std::string& key, int dim, double fallback_p) {
  if (!o.has(key)) return Norm(fallback_p, dim);
  return norm_from_json(o.raw(key), dim, o.at(key));
}

ProcessSpec process_at(Obj& o, const Context& ctx, const std::string& key = "process") {
  if (o.has(key)) return process_from_json(o.raw(key), o.at(key));
  if (!ctx.has_process) throw SchemaError(o.at(key) + ": missing required key (no top-level process either)");
  return ctx.process;
}

Restriction restriction_at(Obj& o) {
  const auto s = o.opt<std::string>("restriction", "none");
  if (s == "none") return Restriction::none;
  if (s == "diamond") return Restriction::diamond;
  if (s == "antidiamond") return Restriction::antidiamond;
  throw SchemaError(o.at("restriction") + ": expected none, diamond or antidiamond");
}

Point point_at(Obj& o, const std::string& key, int dim) {
  const auto p = o.req<Point>(key);
  if (static_cast<int>(p.size()) != dim) throw SchemaError(o.at(key) + ": dimension mismatch");
  return p;
}

Site site_at(Obj& o, const std::string& key, int dim) {
  const auto s = o.req<std::vector<int>>(key);
  if (static_cast<int>(s.size()) != dim) throw SchemaError(o.at(key) + ": dimension mismatch");
  return s;
}

bool is_lattice(const ProcessSpec& p) {
  return p.kind == ProcessSpec::Kind::lattice_iid || p.kind == ProcessSpec::Kind::lattice_columnar;
}

// Library argument errors raised while validating are schema errors of the enclosing key.
template <class F>
auto as_schema(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

Table grid_table(const std::string& name, const std::string& parameter, const EstimateReport& r) {
  Table t{name, {parameter, "mean", "ci_half_width", "ci_low", "ci_high", "replicas", "unproven"}, {}};
  for (const auto& g : r.grid) {
    t.rows.push_back({g.parameter, g.mean, g.ci_half_width, g.mean - g.ci_half_width, g.mean + g.ci_half_width,
                      g.replicas, g.unproven});
  }
  return t;
}

Series grid_series(const std::string& label, const EstimateReport& r) {
  Series s{label, {}, {}, {}, {}};
  for (const auto& g : r.grid) {
    s.x.push_back(g.parameter);
    s.y.push_back(g.mean);
    s.lo.push_back(g.mean - g.ci_half_width);
    s.hi.push_back(g.mean + g.ci_half_width);
  }
  return s;
}

// ---------------------------------------------------------------------------------------------
// generate

Task parse_generate(Obj& task, const Context& ctx) {
  const ProcessSpec p = process_at(task, ctx);
  const Point center = task.has("center") ? point_at(task, "center", p.dim) : Point(static_cast<std::size_t>(p.dim), 0.0);
  const double reach = task.req<double>("reach");
  if (!(reach >= 0.0)) throw SchemaError(task.at("reach") + ": must be nonnegative");
  const std::size_t count = positive_count(task, "count", 1);
  return [=](ExperimentOutcome& out) {
    json rs = json::array();
    Table atoms{"atoms", {"realization"}, {}};
    for (int i = 0; i < p.dim; ++i) atoms.columns.push_back("x" + std::to_string(i));
    atoms.columns.push_back("mass");
    std::vector<MarkedRealization> made(count);
    made = parallel_replicas<MarkedRealization>(count, ctx.run.jobs, [&](std::size_t j) {
      return sample_process(p, center, reach, stream_seed(ctx.seed, j));
    });
    for (std::size_t j = 0; j < count; ++j) {
      json r = to_json(made[j]);
      r["seed"] = stream_seed(ctx.seed, j);
      rs.push_back(std::move(r));
      for (const auto& a : made[j].atoms) {
        std::vector<json> row{j};
        for (double c : a.loc) row.push_back(c);
        row.push_back(a.mass);
        atoms.rows.push_back(std::move(row));
      }
    }
    out.report["realizations"] = rs;
    out.tables.push_back(std::move(atoms));
  };
}

// ---------------------------------------------------------------------------------------------
// solve

Task parse_solve(Obj& task, const Context& ctx) {
  MarkedRealization r;
  if (task.has("realization")) {
    r = realization_from_json(task.raw("realization"), task.at("realization"));
  } else {
    Obj s = task.sub("sample");
    const ProcessSpec p = process_at(s, ctx);
    const Point center = s.has("center") ? point_at(s, "center", p.dim) : Point(static_cast<std::size_t>(p.dim), 0.0);
    const double reach = s.req<double>("reach");
    s.finish();
    r = as_schema(task.at("sample"), [&] { return sample_process(p, center, reach, ctx.seed); });
  }
  Obj q = task.sub("query");
  const auto family = q.req<std::string>("family");
  const int d = r.dim;
  std::function<json()> solve;
  auto proven = std::make_shared<bool>(true);

  if (family == "path") {
    PathQuery pq;
    const double ell = q.req<double>("ell");
    const Norm norm = norm_at(q, "norm", d, 2.0);
    if (q.has("y")) {
      Point x = q.has("x") ? point_at(q, "x", d) : Point(static_cast<std::size_t>(d), 0.0);
      pq = PathQuery::two_point(std::move(x), point_at(q, "y", d), ell, norm, restriction_at(q),
                                q.opt<double>("delta", 0.5));
    } else {
      pq = PathQuery::from_origin(ell, norm);
      if (q.has("x")) pq.x = point_at(q, "x", d);
    }
    solve = [=] {
      auto res = max_mass_path(r, pq, ctx.run.solve);
      *proven = res.proven_optimal;
      return to_json(res);
    };
  } else if (family == "animal_inf" || family == "bracket") {
    AnimalQuery aq;
    aq.x = q.has("x") ? point_at(q, "x", d) : Point(static_cast<std::size_t>(d), 0.0);
    if (q.has("y")) aq.y = point_at(q, "y", d);
    aq.ell = q.req<double>("ell");
    aq.norm = norm_at(q, "norm", d, 2.0);
    aq.restriction = restriction_at(q);
    aq.delta = q.opt<double>("delta", 0.5);
    if (family == "bracket") {
      if (q.has("q")) aq.q = norm_from_json(q.raw("q"), d, q.at("q")).p();
      solve = [=] {
        const Bracket b = bracket_animal(r, aq, ctx.run.solve);
        *proven = b.proven_optimal;
        return json{{"lower", b.lower}, {"upper", b.upper}, {"exact", b.exact}, {"proven_optimal", b.proven_optimal}};
      };
    } else {
      solve = [=] {
        auto res = max_mass_animal_inf(r, aq, ctx.run.solve);
        *proven = res.proven_optimal;
        return to_json(res);
      };
    }
  } else if (family == "lattice_animal") {
    const int n = q.req<int>("n");
    std::vector<Site> anchors;
    const json& a = q.raw("anchors");
    if (!a.is_array() || a.empty() || a.size() > 2) throw SchemaError(q.at("anchors") + ": expected one or two sites");
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto s = Obj::convert<std::vector<int>>(a[i], q.at("anchors") + "/" + std::to_string(i));
      if (static_cast<int>(s.size()) != d) throw SchemaError(q.at("anchors") + "/" + std::to_string(i) + ": dimension mismatch");
      anchors.push_back(std::move(s));
    }
    solve = [=] {
      auto res = lattice_max_animal(r, n, anchors, ctx.run.solve);
      *proven = res.proven_optimal;
      return to_json(res);
    };
  } else if (family == "lattice_path") {
    const int n = q.req<int>("n");
    const bool sa = q.opt<bool>("self_avoiding", true);
    const Site anchor = site_at(q, "anchor", d);
    solve = [=] {
      auto res = lattice_max_path(r, n, sa, anchor, ctx.run.solve);
      *proven = res.proven_optimal;
      return to_json(res);
    };
  } else {
    throw SchemaError(q.at("family") + ": expected path, animal_inf, bracket, lattice_animal or lattice_path");
  }
  q.finish();
  const std::string where = task.at("query");
  return [=](ExperimentOutcome& out) {
    out.report["realization"] = to_json(r);
    out.report["result"] = as_schema(where, solve);
    if (!*proven && ctx.require_proof) out.exit_code = 3;
  };
}

// ---------------------------------------------------------------------------------------------
// estimate

SolverMode mode_at(Obj& o) {
  const auto m = o.req<std::string>("mode");
  if (m == "path") return SolverMode::path;
  if (m == "animal_inf") return SolverMode::animal_inf;
  if (m == "lattice_animal") return SolverMode::lattice_animal;
  if (m == "lattice_path") return SolverMode::lattice_path;
  if (m == "lattice_sa_path") return SolverMode::lattice_sa_path;
  throw SchemaError(o.at("mode") + ": unknown solver mode");
}

DirectionalQuery directional_at(Obj& o, int dim) {
  DirectionalQuery q;
  q.direction = point_at(o, "direction", dim);
  q.beta_grid = increasing_grid(o, "beta_grid");
  q.delta = o.opt<double>("delta", q.delta);
  q.ell_grid = increasing_grid(o, "ell_grid");
  q.a = o.opt<double>("a", q.a);
  q.b = o.opt<double>("b", q.b);
  q.animals = o.opt<bool>("animals", true);
  q.norm = norm_at(o, "norm", dim, 2.0);
  return q;
}

void emit_directional(ExperimentOutcome& out, const std::string& prefix, const DirectionalReport& rep, json& dst) {
  json levels = json::array();
  Table t{prefix + "_levels", {"ell", "restriction", "beta", "mean", "ci_half_width", "replicas", "unproven"}, {}};
  Plot plot{prefix + "_levels", "estimates by length", "beta", "value / length", {}};
  for (const auto& lv : rep.levels) {
    levels.push_back({{"ell", lv.ell},
                      {"unrestricted", to_json(lv.unrestricted)},
                      {"diamond", to_json(lv.diamond)},
                      {"antidiamond", to_json(lv.antidiamond)}});
    for (const auto* r : {&lv.unrestricted, &lv.diamond, &lv.antidiamond}) {
      for (const auto& g : r->grid) {
        t.rows.push_back({lv.ell, r->label, g.parameter, g.mean, g.ci_half_width, g.replicas, g.unproven});
      }
      if (!r->grid.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s, l=%g", r->label.c_str(), lv.ell);
        plot.series.push_back(grid_series(buf, *r));
      }
    }
  }
  dst["levels"] = levels;
  dst["g_hat"] = to_json(rep.g_hat);
  out.tables.push_back(std::move(t));
  out.tables.push_back(grid_table(prefix + "_g_hat", "beta", rep.g_hat));
  out.plots.push_back(std::move(plot));
  out.plots.push_back({prefix + "_g_hat", "limit estimate", "beta", "g", {grid_series("g_hat", rep.g_hat)}});
}

SuperadditiveSpec superadditive_at(Obj& m, const Context& ctx) {
  SuperadditiveSpec s;
  const auto kind = m.req<std::string>("kind");
  if (kind == "additive") {
    s.kind = SuperadditiveSpec::Kind::additive;
    s.c = m.opt<double>("c", 1.0);
    if (!(s.c >= 0.0)) throw SchemaError(m.at("c") + ": must be nonnegative");
  } else if (kind == "max_of_sums") {
    s.kind = SuperadditiveSpec::Kind::max_of_sums;
    s.rate = m.opt<double>("rate", 1.0);
    s.h = m.opt<double>("h", 0.5);
    if (!(s.rate > 0.0)) throw SchemaError(m.at("rate") + ": must be positive");
    if (!(s.h >= 0.0)) throw SchemaError(m.at("h") + ": must be nonnegative");
  } else if (kind == "diamond") {
    s.kind = SuperadditiveSpec::Kind::diamond_restricted;
    s.process = process_at(m, ctx);
    s.norm = norm_at(m, "norm", s.process.dim, 2.0);
    if (m.has("u")) {
      s.u = point_at(m, "u", s.process.dim);
      const double un = s.norm(s.u);
      if (!(un > 0.0 && un < 1.0)) throw SchemaError(m.at("u") + ": need 0 < |u| < 1");
    }
    s.delta = m.opt<double>("delta", 0.3);
    if (!(s.delta > 0.0 && s.delta < 1.0)) throw SchemaError(m.at("delta") + ": must lie in (0, 1)");
    s.animals = m.opt<bool>("animals", false);
  } else {
    throw SchemaError(m.at("kind") + ": expected additive, max_of_sums or diamond");
  }
  m.finish();
  return s;
}

Task parse_estimate(Obj& task, const Context& ctx) {
  const auto kind = task.req<std::string>("kind");
  if (kind == "lln") {
    const ProcessSpec p = process_at(task, ctx);
    const SolverMode mode = mode_at(task);
    const Norm norm = norm_at(task, "norm", p.dim, 2.0);
    const auto grid = increasing_grid(task, "ell_grid");
    const std::size_t reps = replicas_at(task, "replicas", 200);
    if (!(grid.front() > 0.0)) throw SchemaError(task.at("ell_grid") + ": lengths must be positive");
    return [=](ExperimentOutcome& out) {
      const auto rep = estimate_lln_curve(p, mode, norm, grid, reps, ctx.seed, ctx.run);
      out.report["lln"] = to_json(rep);
      out.tables.push_back(grid_table("lln", "ell", rep));
      out.plots.push_back({"lln", "value / length", "ell", "value / ell", {grid_series("mean", rep)}});
      if (ctx.require_proof && rep.unproven_total > 0) out.exit_code = 3;
    };
  }
  if (kind == "directional") {
    const ProcessSpec p = process_at(task, ctx);
    const DirectionalQuery q = directional_at(task, p.dim);
    const std::size_t reps = replicas_at(task, "replicas", 200);
    return [=](ExperimentOutcome& out) {
      const auto rep = estimate_directional_limit(q, p, reps, ctx.seed, ctx.run);
      emit_directional(out, "directional", rep, out.report["directional"]);
      std::size_t unproven = 0;
      for (const auto& lv : rep.levels) {
        unproven += lv.unrestricted.unproven_total + lv.diamond.unproven_total + lv.antidiamond.unproven_total;
      }
      if (ctx.require_proof && unproven > 0) out.exit_code = 3;
    };
  }
  if (kind == "fekete") {
    Obj m = task.sub("model");
    const SuperadditiveSpec spec = superadditive_at(m, ctx);
    const auto times = increasing_grid(task, "times");
    if (!(times.front() > 0.0)) throw SchemaError(task.at("times") + ": times must be positive");
    if (spec.kind == SuperadditiveSpec::Kind::diamond_restricted && spec.u.empty()) {
      throw SchemaError(task.at("model") + "/u: required for estimates");
    }
    const std::size_t reps = replicas_at(task, "replicas", 200);
    return [=](ExperimentOutcome& out) {
      struct Row {
        std::vector<double> values;
        bool proven;
      };
      const auto rows = parallel_replicas<Row>(reps, ctx.run.jobs, [&](std::size_t j) {
        SuperadditiveSampler x(spec, replica_seed(ctx.seed, 0, j), 0.0, times.back(), ctx.run.solve);
        Row r{{}, true};
        for (double t : times) r.values.push_back(x.value(0.0, t));
        r.proven = x.proven();
        return r;
      });
      std::vector<TimeSample> samples;
      EstimateReport er;
      er.label = "fekete";
      er.master_seed = ctx.seed;
      er.stream_scheme = "replica";
      for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> xs;
        std::size_t unproven = 0;
        for (const auto& r : rows) {
          xs.push_back(r.values[i]);
          if (!r.proven) ++unproven;
        }
        const Summary s = summarize(xs);
        samples.push_back({times[i], s.mean, s.ci_half_width});
        er.grid.push_back({times[i], s.mean / times[i], s.ci_half_width / times[i], reps, unproven});
        er.unproven_total += unproven;
      }
      const FeketeResult fk = fekete_time_constant(samples);
      er.fekete_estimate = fk.estimate;
      out.report["fekete"] = to_json(er);
      out.report["fekete"]["superadditive_compatible"] = fk.superadditive_compatible;
      out.report["fekete"]["violations"] = fk.violations;
      if (const auto k = known_time_constant(spec)) out.report["fekete"]["known_time_constant"] = *k;
      out.tables.push_back(grid_table("fekete", "t", er));
      out.plots.push_back({"fekete", "mean / t", "t", "mean / t", {grid_series("mean / t", er)}});
      if (ctx.require_proof && er.unproven_total > 0) out.exit_code = 3;
    };
  }
  throw SchemaError(task.at("kind") + ": expected lln, directional or fekete");
}

// ---------------------------------------------------------------------------------------------
// verify

using Check = std::function<std::vector<Diagnostic>(ExperimentOutcome&, json&, std::uint64_t)>;

Diagnostic expectation(const std::string& name, const Diagnostic& inner, bool expect_pass) {
  Diagnostic d;
  d.name = name;
  d.structural = inner.structural;
  d.unproven = inner.unproven;
  d.add(std::string("inner check ") + (inner.pass ? "passed" : "failed") + ", expected " +
            (expect_pass ? "pass" : "fail"),
        inner.pass == expect_pass ? 0.0 : -1.0);
  d.details["inner"] = to_json(inner);
  return d;
}

Check parse_suite(Obj& c, const Context& ctx, const std::string& label) {
  SuiteSpec s;
  const auto family = c.opt<std::string>("family", "poisson");
  if (family == "poisson") {
    s.kind = SuiteSpec::Kind::poisson;
  } else if (family == "lattice") {
    s.kind = SuiteSpec::Kind::lattice;
  } else {
    throw SchemaError(c.at("family") + ": expected poisson or lattice");
  }
  s.process = process_at(c, ctx);
  if (s.kind == SuiteSpec::Kind::lattice && !is_lattice(s.process)) {
    throw SchemaError(c.at("process") + ": lattice suites need a lattice process");
  }
  if (s.kind == SuiteSpec::Kind::poisson && is_lattice(s.process)) {
    throw SchemaError(c.at("process") + ": poisson suites need a continuum process");
  }
  if (s.kind == SuiteSpec::Kind::lattice && s.process.dim != 2) {
    throw SchemaError(c.at("process") + "/dim: lattice suites run in d = 2");
  }
  s.half_width = c.opt<double>("half_width", s.half_width);
  s.max_atoms = c.opt<std::size_t>("max_atoms", s.max_atoms);
  if (c.has("ell_grid")) s.ell_grid = increasing_grid(c, "ell_grid");
  s.lattice_side = c.opt<int>("lattice_side", s.lattice_side);
  if (s.lattice_side < 1 || s.lattice_side > 8) throw SchemaError(c.at("lattice_side") + ": must lie in 1..8");
  s.lattice_animal_n = c.opt<std::vector<int>>("lattice_animal_n", s.lattice_animal_n);
  s.lattice_path_n = c.opt<std::vector<int>>("lattice_path_n", s.lattice_path_n);
  s.reduction_n = c.opt<std::vector<int>>("reduction_n", s.reduction_n);
  for (const char* k : {"lattice_animal_n", "lattice_path_n", "reduction_n"}) {
    const auto& v = std::string(k) == "lattice_animal_n" ? s.lattice_animal_n
                    : std::string(k) == "lattice_path_n" ? s.lattice_path_n
                                                         : s.reduction_n;
    for (int n : v) {
      if (n < 1) throw SchemaError(c.at(k) + ": entries must be positive");
    }
  }
  if (c.has("checks")) {
    Obj f = c.sub("checks");
    s.sandwich = f.opt<bool>("sandwich", false);
    s.restriction = f.opt<bool>("restriction", false);
    s.certificates = f.opt<bool>("certificates", false);
    s.layers = f.opt<bool>("layers", false);
    s.path_oracle = f.opt<bool>("path_oracle", false);
    s.animal_oracle = f.opt<bool>("animal_oracle", false);
    s.lattice_oracle = f.opt<bool>("lattice_oracle", false);
    s.reduction = f.opt<bool>("reduction", false);
    f.finish();
  }
  const std::size_t n = positive_count(c, "instances", 100);
  return [=](ExperimentOutcome&, json&, std::uint64_t seed) {
    Diagnostic d = sandwich_and_identity_suite(s, n, seed, ctx.run);
    d.name = label;
    return std::vector<Diagnostic>{d};
  };
}

std::vector<Point> tsp_points(const std::string& gen, std::size_t n, int d, double L, Engine& rng) {
  std::vector<Point> pts;
  pts.reserve(n);
  auto u = [&] { return L * uniform01(rng); };
  if (gen == "uniform") {
    for (std::size_t i = 0; i < n; ++i) {
      Point p(static_cast<std::size_t>(d));
      for (auto& c : p) c = u();
      pts.push_back(p);
    }
  } else if (gen == "grid") {
    long k = 1;
    while (std::pow(static_cast<double>(k), d) < static_cast<double>(n)) ++k;
    for (std::size_t i = 0; i < n; ++i) {
      Point p(static_cast<std::size_t>(d));
      std::size_t r = i;
      for (auto& c : p) {
        c = k == 1 ? 0.0 : L * static_cast<double>(r % k) / static_cast<double>(k - 1);
        r /= k;
      }
      pts.push_back(p);
    }
  } else if (gen == "line") {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = u();
      pts.push_back(Point(static_cast<std::size_t>(d), t));
    }
  } else if (gen == "column_extremes") {
    // Points on the top and bottom faces, alternating, so each column is crossed fully.
    for (std::size_t i = 0; i < n; ++i) {
      Point p(static_cast<std::size_t>(d));
      for (auto& c : p) c = u();
      p.back() = (i % 2 == 0) ? 0.0 : L;
      pts.push_back(p);
    }
  } else if (gen == "zigzag") {
    for (std::size_t i = 0; i < n; ++i) {
      Point p(static_cast<std::size_t>(d), L * static_cast<double>(i) / static_cast<double>(n));
      p.back() = (i % 2 == 0) ? 0.0 : L;
      pts.push_back(p);
    }
  }
  return pts;
}

Check parse_few_tsp(Obj& c, const Context& ctx) {
  const auto dims = c.opt<std::vector<int>>("dims", {2, 3});
  const auto ns = c.opt<std::vector<std::size_t>>("n_grid", {100, 1000, 10000});
  const std::size_t instances = positive_count(c, "instances", 20);
  const double L = c.opt<double>("side", 1.0);
  const auto gens =
      c.opt<std::vector<std::string>>("generators", {"uniform", "grid", "line", "column_extremes", "zigzag"});
  for (int d : dims) {
    if (d < 1 || d > 6) throw SchemaError(c.at("dims") + ": dimensions must lie in 1..6");
  }
  for (auto n : ns) {
    if (n == 0) throw SchemaError(c.at("n_grid") + ": sizes must be positive");
  }
  if (!(L > 0.0)) throw SchemaError(c.at("side") + ": must be positive");
  for (const auto& g : gens) {
    if (g != "uniform" && g != "grid" && g != "line" && g != "column_extremes" && g != "zigzag") {
      throw SchemaError(c.at("generators") + ": unknown generator " + g);
    }
  }
  return [=](ExperimentOutcome& out, json& data, std::uint64_t seed) {
    Diagnostic d;
    d.name = "few_tsp";
    d.structural = true;
    Table t{"few_tsp", {"d", "n", "generator", "instances", "max_ratio", "constant"}, {}};
    json rows = json::array();
    std::size_t gi = 0;
    for (int dim : dims) {
      const double C5 = few_tsp_constant(dim);
      for (std::size_t n : ns) {
        for (const auto& gen : gens) {
          struct Outcome {
            double ratio;
            bool covers;
          };
          const auto res = parallel_replicas<Outcome>(instances, ctx.run.jobs, [&](std::size_t j) {
            Engine rng = make_engine(replica_seed(seed, gi, j));
            auto pts = tsp_points(gen, n, dim, L, rng);
            const auto sw = few_tsp_path(pts, L, dim, Norm::l1(dim));
            // The sweep must start at the origin and visit exactly the given points.
            auto visited = std::vector<Point>(sw.path.vertices.begin() + 1, sw.path.vertices.end());
            std::sort(visited.begin(), visited.end());
            std::sort(pts.begin(), pts.end());
            const bool covers = sw.path.vertices.front() == Point(static_cast<std::size_t>(dim), 0.0) && visited == pts;
            return Outcome{sw.ratio, covers};
          });
          double worst = 0.0;
          for (std::size_t j = 0; j < res.size(); ++j) {
            worst = std::max(worst, res[j].ratio);
            const std::string where = "d=" + std::to_string(dim) + " n=" + std::to_string(n) + " " + gen + " #" +
                                      std::to_string(j);
            d.tally(where + " ratio", C5 - res[j].ratio);
            d.tally(where + " coverage", res[j].covers ? 0.0 : -1.0);
          }
          t.rows.push_back({dim, n, gen, instances, worst, C5});
          rows.push_back({{"d", dim}, {"n", n}, {"generator", gen}, {"instances", instances}, {"max_ratio", worst},
                          {"constant", C5}});
          ++gi;
        }
      }
    }
    d.details["rows"] = rows;
    d.details["norm"] = "l1";
    data["rows"] = rows;
    out.tables.push_back(std::move(t));
    return std::vector<Diagnostic>{d};
  };
}

Check parse_layer_identity(Obj& c, const Context& ctx) {
  const ProcessSpec p = process_at(c, ctx);
  const std::size_t sets = positive_count(c, "sets", 10000);
  return [=](ExperimentOutcome&, json&, std::uint64_t seed) {
    return std::vector<Diagnostic>{layer_identity_check(p, sets, seed, ctx.run)};
  };
}

Check parse_superadditivity(Obj& c, const Context& ctx) {
  Obj m = c.sub("model");
  const SuperadditiveSpec spec = superadditive_at(m, ctx);
  const std::size_t count = positive_count(c, "count", 1000);
  const double span = c.opt<double>("span", 4.0);
  if (!(span > 0.0)) throw SchemaError(c.at("span") + ": must be positive");
  return [=](ExperimentOutcome&, json&, std::uint64_t seed) {
    try {
      return std::vector<Diagnostic>{superadditivity_check(spec, count, span, seed, ctx.run)};
    } catch (const SuperadditivityViolation& e) {
      Diagnostic d;
      d.name = "superadditivity";
      d.structural = true;
      d.add(e.what(), -1.0);
      d.details["violation"] = e.triple();
      return std::vector<Diagnostic>{d};
    }
  };
}

Check parse_maximal(Obj& c, const Context& ctx) {
  Obj m = c.sub("model");
  const SuperadditiveSpec spec = superadditive_at(m, ctx);
  if (spec.kind == SuperadditiveSpec::Kind::diamond_restricted && spec.u.empty()) {
    throw SchemaError(c.at("model") + "/u: required for this check");
  }
  const auto alphas = increasing_grid(c, "alpha_grid");
  if (!(alphas.front() > 0.0)) throw SchemaError(c.at("alpha_grid") + ": must be positive");
  const int n_max = c.req<int>("n_max");
  if (n_max < 1) throw SchemaError(c.at("n_max") + ": must be positive");
  const std::size_t reps = replicas_at(c, "replicas", 200);
  const std::size_t pre = c.opt<std::size_t>("precheck_triples", 200);
  return [=](ExperimentOutcome& out, json&, std::uint64_t seed) {
    Diagnostic d;
    try {
      d = maximal_inequality_check(spec, alphas, n_max, reps, seed, pre, ctx.run);
    } catch (const SuperadditivityViolation& e) {
      d.name = "maximal_inequality";
      d.structural = true;
      d.add(std::string("precheck: ") + e.what(), -1.0);
      d.details["violation"] = e.triple();
      return std::vector<Diagnostic>{d};
    }
    Table t{"maximal_inequality", {"alpha", "frequency", "ci_half_width", "bound", "replicas"}, {}};
    for (const auto& r : d.details["rows"]) {
      t.rows.push_back({r["alpha"], r["frequency"], r["ci_half_width"], r["bound"], r["replicas"]});
    }
    out.tables.push_back(std::move(t));
    return std::vector<Diagnostic>{d};
  };
}

Check parse_shape(Obj& c, const Context& ctx) {
  const ProcessSpec p = process_at(c, ctx);
  const DirectionalQuery q = directional_at(c, p.dim);
  const std::size_t reps = replicas_at(c, "replicas", 200);
  return [=](ExperimentOutcome& out, json& data, std::uint64_t seed) {
    const auto rep = estimate_directional_limit(q, p, reps, seed, ctx.run);
    emit_directional(out, "shape", rep, data);
    std::vector<Diagnostic> ds{check_concavity(rep.g_hat), check_symmetry(rep.g_hat), check_monotonicity(rep.g_hat)};
    for (auto& d : ds) d.unproven = rep.g_hat.unproven_total > 0;
    // The same checks on the antidiamond curve of the largest length, which has no point at beta = 0.
    const EstimateReport& anti = rep.levels.back().antidiamond;
    for (auto d : {check_concavity(anti), check_symmetry(anti), check_monotonicity(anti)}) {
      d.name += "_antidiamond";
      d.unproven = anti.unproven_total > 0;
      ds.push_back(std::move(d));
    }
    return ds;
  };
}

Check parse_tail(Obj& c, const Context& ctx) {
  const double lambda = c.opt<double>("lambda", 1.0);
  const int dim = c.opt<int>("dim", 2);
  const auto alphas = increasing_grid(c, "alpha_grid");
  const double ell_max = c.req<double>("ell_max");
  const std::size_t reps = replicas_at(c, "replicas", 2000);
  if (!(lambda > 0.0)) throw SchemaError(c.at("lambda") + ": must be positive");
  if (dim < 1) throw SchemaError(c.at("dim") + ": must be positive");
  if (!(ell_max >= 1.0)) throw SchemaError(c.at("ell_max") + ": must be at least 1");
  return [=](ExperimentOutcome& out, json&, std::uint64_t seed) {
    Diagnostic d = tail_bound_check(lambda, dim, alphas, ell_max, reps, seed, ctx.run);
    Table t{"tail_bound", {}, {}};
    if (d.details.contains("rows") && !d.details["rows"].empty()) {
      for (auto it = d.details["rows"][0].begin(); it != d.details["rows"][0].end(); ++it) t.columns.push_back(it.key());
      for (const auto& r : d.details["rows"]) {
        std::vector<json> row;
        for (const auto& col : t.columns) row.push_back(r[col]);
        t.rows.push_back(std::move(row));
      }
    }
    out.tables.push_back(std::move(t));
    return std::vector<Diagnostic>{d};
  };
}

Check parse_moment(Obj& c, const Context& ctx) {
  const auto source = c.req<std::string>("source");
  if (source != "poisson" && source != "dpp_grid" && source != "doubled_poisson") {
    throw SchemaError(c.at("source") + ": expected poisson, dpp_grid or doubled_poisson");
  }
  const int dim = 2;
  const double lambda = c.opt<double>("lambda", 1.0);
  const double jitter = c.opt<double>("jitter", 0.05);
  double side = c.opt<double>("region_side", 6.0);
  int cells = 16, radius = 2;
  if (c.has("dpp")) {
    if (source != "dpp_grid") throw SchemaError(c.at("dpp") + ": only for the dpp_grid source");
    Obj d = c.sub("dpp");
    side = d.opt<double>("side", 8.0);
    cells = d.opt<int>("cells", cells);
    radius = d.opt<int>("radius", radius);
    d.finish();
  } else if (source == "dpp_grid") {
    side = 8.0;
  }
  const double box = c.opt<double>("box_side", 1.0);
  const double step = c.opt<double>("grid_step", box);
  const std::size_t pairs = positive_count(c, "pairs", 20);
  const std::size_t reps = replicas_at(c, "replicas", 4000);
  const double C = c.opt<double>("C", 1.0);
  const auto mode_s = c.opt<std::string>("mode", "factorization");
  const auto expect = c.opt<std::string>("expect", "pass");
  if (!(lambda > 0.0)) throw SchemaError(c.at("lambda") + ": must be positive");
  if (!(jitter >= 0.0)) throw SchemaError(c.at("jitter") + ": must be nonnegative");
  if (!(box > 0.0 && step > 0.0 && 2.0 * box <= side)) {
    throw SchemaError(c.at("box_side") + ": need 0 < box_side and two disjoint boxes in the region");
  }
  if (!(C > 0.0)) throw SchemaError(c.at("C") + ": must be positive");
  if (mode_s != "factorization" && mode_s != "upper_bound") {
    throw SchemaError(c.at("mode") + ": expected factorization or upper_bound");
  }
  if (expect != "pass" && expect != "fail") throw SchemaError(c.at("expect") + ": expected pass or fail");
  std::optional<DppKernelSpec> kernel;
  if (source == "dpp_grid") {
    kernel = as_schema(c.at("dpp"), [&] {
      return DppKernelSpec::projection(side, cells, dim, radius, MarkDistribution::constant_mass(1.0));
    });
    // Boxes aligned with the cells never cut through a site.
    const double h = side / cells;
    auto aligned = [&](double v) { return std::abs(v / h - std::round(v / h)) < 1e-9; };
    if (!aligned(box) || !aligned(step)) {
      throw SchemaError(c.at("box_side") + ": box_side and grid_step must be multiples of the cell width");
    }
  }
  const MomentMode mode = mode_s == "factorization" ? MomentMode::factorization : MomentMode::upper_bound;
  return [=](ExperimentOutcome& out, json& data, std::uint64_t seed) {
    const Window region = Window::box_from_corners(Point(dim, 0.0), Point(dim, side));
    std::optional<DppGridSampler> dpp;
    if (kernel) dpp.emplace(*kernel);
    const auto batch = parallel_replicas<MarkedRealization>(reps, ctx.run.jobs, [&](std::size_t j) {
      const auto s = replica_seed(seed, 0, j);
      if (source == "poisson") return sample_poisson_marked(lambda, MarkDistribution::constant_mass(1.0), region, s);
      if (source == "doubled_poisson") return sample_doubled_poisson(lambda, region, jitter, s);
      return dpp->sample(s);
    });
    // Even pairs use one box twice, odd pairs two disjoint boxes; corners sit on the step grid.
    Engine rng = make_engine(replica_seed(seed, 1, 0));
    const long positions = static_cast<long>(std::floor((side - box) / step + 1e-9)) + 1;
    std::uniform_int_distribution<long> pick(0, positions - 1);
    auto corner = [&] {
      Point p(dim);
      for (auto& v : p) v = step * static_cast<double>(pick(rng));
      return p;
    };
    auto make_box = [&](const Point& lo) {
      Point hi = lo;
      for (auto& v : hi) v += box;
      return Window::box_from_corners(lo, hi);
    };
    std::vector<std::pair<Window, Window>> boxes;
    json pair_json = json::array();
    for (std::size_t i = 0; i < pairs; ++i) {
      const Point a = corner();
      Point b = a;
      if (i % 2 == 1) {
        for (int tries = 0;; ++tries) {
          b = corner();
          bool disjoint = false;
          for (int k = 0; k < dim; ++k) disjoint = disjoint || std::abs(a[k] - b[k]) >= box - 1e-12;
          if (disjoint) break;
          if (tries > 10000) throw InvalidInput("cannot place disjoint boxes");
        }
      }
      boxes.emplace_back(make_box(a), make_box(b));
      pair_json.push_back({{"first", a}, {"second", b}, {"side", box}});
    }
    Diagnostic inner = moment_property_check(batch, boxes, C, mode);
    inner.details["pairs"] = pair_json;
    inner.details["source"] = source;
    Table t{"moment", {"pair", "second_moment", "product", "sigma", "margin"}, {}};
    for (const auto& r : inner.details["rows"]) {
      t.rows.push_back({r["pair"], r["second_moment"], r["product"], r["sigma"], r["margin"]});
    }
    out.tables.push_back(std::move(t));
    data["source"] = source;
    if (expect == "pass") return std::vector<Diagnostic>{inner};
    return std::vector<Diagnostic>{expectation(inner.name + "_negative_control", inner, false)};
  };
}

Check parse_divergence(Obj& c, const Context& ctx) {
  DivergenceSpec s;
  const auto probe = c.req<std::string>("probe");
  if (probe == "columnar") {
    s.kind = DivergenceSpec::Kind::columnar;
  } else if (probe == "poisson_pareto") {
    s.kind = DivergenceSpec::Kind::poisson_pareto;
  } else {
    throw SchemaError(c.at("probe") + ": expected columnar or poisson_pareto");
  }
  if (c.has("marks")) s.marks = marks_from_json(c.raw("marks"), c.at("marks"));
  s.lambda = c.opt<double>("lambda", 1.0);
  if (!(s.lambda > 0.0)) throw SchemaError(c.at("lambda") + ": must be positive");
  if (c.has("windows")) {
    s.windows = c.req<std::vector<int>>("windows");
    if (s.windows.size() < 2) throw SchemaError(c.at("windows") + ": need at least two windows");
    for (std::size_t i = 0; i < s.windows.size(); ++i) {
      if (s.windows[i] < 1 || (i > 0 && s.windows[i] <= s.windows[i - 1])) {
        throw SchemaError(c.at("windows") + ": windows must be positive and increasing");
      }
    }
  }
  if (c.has("thresholds")) s.thresholds = c.req<std::vector<double>>("thresholds");
  s.expect = c.req<std::string>("expect");
  if (s.expect != "divergence" && s.expect != "plateau") {
    throw SchemaError(c.at("expect") + ": expected divergence or plateau");
  }
  const std::size_t reps = replicas_at(c, "replicas", 200);
  return [=](ExperimentOutcome& out, json&, std::uint64_t seed) {
    Diagnostic d = divergence_probe(s, reps, seed, ctx.run);
    Table t{"divergence", {"window", "statistic", "ci_low", "ci_high", "replicas"}, {}};
    Series ser{"statistic", {}, {}, {}, {}};
    for (const auto& r : d.details["rows"]) {
      t.rows.push_back({r["window"], r["statistic"], r["ci_low"], r["ci_high"], r["replicas"]});
      ser.x.push_back(r["window"].get<double>());
      ser.y.push_back(r["statistic"].get<double>());
      ser.lo.push_back(r["ci_low"].get<double>());
      ser.hi.push_back(r["ci_high"].get<double>());
    }
    out.tables.push_back(std::move(t));
    out.plots.push_back({"divergence", "lower bound for P(W) / W", "W", "statistic", {ser}});
    return std::vector<Diagnostic>{d};
  };
}

struct ParsedCheck {
  std::string label;
  std::string kind;
  Check run;
};

Task parse_verify(Obj& task, const Context& ctx) {
  const json& list = task.raw("checks");
  if (!list.is_array()) throw SchemaError(task.at("checks") + ": expected an array");
  std::vector<ParsedCheck> checks;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Obj c(list[i], task.at("checks") + "/" + std::to_string(i));
    const auto kind = c.req<std::string>("kind");
    const auto label = c.opt<std::string>("label", kind + "_" + std::to_string(i));
    if (!labels.insert(label).second) throw SchemaError(c.at("label") + ": duplicate label " + label);
    Check run;
    if (kind == "suite") {
      run = parse_suite(c, ctx, label);
    } else if (kind == "layer_identity") {
      run = parse_layer_identity(c, ctx);
    } else if (kind == "superadditivity") {
      run = parse_superadditivity(c, ctx);
    } else if (kind == "maximal_inequality") {
      run = parse_maximal(c, ctx);
    } else if (kind == "shape") {
      run = parse_shape(c, ctx);
    } else if (kind == "tail_bound") {
      run = parse_tail(c, ctx);
    } else if (kind == "few_tsp") {
      run = parse_few_tsp(c, ctx);
    } else if (kind == "moment") {
      run = parse_moment(c, ctx);
    } else if (kind == "divergence") {
      run = parse_divergence(c, ctx);
    } else {
      throw SchemaError(c.at("kind") + ": unknown check kind");
    }
    c.finish();
    checks.push_back({label, kind, std::move(run)});
  }
  return [=](ExperimentOutcome& out) {
    json results = json::array();
    bool all_pass = true;
    bool unproven = false;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& ch = checks[i];
      const std::uint64_t seed = stream_seed(ctx.seed, i);
      ExperimentOutcome local;
      json data = json::object();
      std::vector<Diagnostic> ds;
      try {
        ds = ch.run(local, data, seed);
      } catch (const std::exception& e) {
        Diagnostic d;
        d.name = ch.kind;
        d.structural = true;
        d.add(std::string("error: ") + e.what(), -1.0);
        ds = {d};
      }
      json dj = json::array();
      bool pass = true;
      for (const auto& d : ds) {
        pass = pass && d.pass;
        unproven = unproven || d.unproven;
        dj.push_back(to_json(d));
      }
      all_pass = all_pass && pass;
      results.push_back({{"label", ch.label}, {"kind", ch.kind}, {"seed", seed}, {"pass", pass},
                         {"diagnostics", dj}, {"data", data}});
      for (auto& t : local.tables) {
        t.name = ch.label + "_" + t.name;
        out.tables.push_back(std::move(t));
      }
      for (auto& p : local.plots) {
        p.name = ch.label + "_" + p.name;
        out.plots.push_back(std::move(p));
      }
    }
    Table summary{"checks", {"label", "kind", "pass"}, {}};
    for (const auto& r : results) summary.rows.push_back({r["label"], r["kind"], r["pass"].get<bool>() ? "pass" : "fail"});
    out.tables.push_back(std::move(summary));
    out.report["checks"] = results;
    out.report["pass"] = all_pass;
    if (!all_pass) out.exit_code = 1;
    if (unproven && ctx.require_proof) out.exit_code = 3;
  };
}

}  // namespace

ExperimentOutcome run_experiment(const json& config, const std::string& subcommand,
                                 std::optional<std::uint64_t> seed_override, int jobs) {
  if (subcommand != "generate" && subcommand != "solve" && subcommand != "estimate" && subcommand != "verify") {
    throw SchemaError("unknown subcommand " + subcommand);
  }
  if (jobs < 1) throw SchemaError("jobs must be positive");
  Obj root(config, "");
  if (root.has("experiment") && root.req<std::string>("experiment") != subcommand) {
    throw SchemaError(root.at("experiment") + ": config is for " + config["experiment"].get<std::string>() +
                      ", not " + subcommand);
  }
  Context ctx;
  if (seed_override) {
    ctx.seed = *seed_override;
    if (root.has("seed")) root.req<std::uint64_t>("seed");
  } else {
    ctx.seed = root.req<std::uint64_t>("seed");
  }
  const auto cfg_jobs = root.opt<int>("jobs", 1);
  if (cfg_jobs < 1) throw SchemaError(root.at("jobs") + ": must be positive");
  ctx.run.jobs = jobs;
  ctx.run.solve.node_budget = root.opt<std::uint64_t>("node_budget", ctx.run.solve.node_budget);
  if (ctx.run.solve.node_budget == 0) throw SchemaError(root.at("node_budget") + ": must be positive");
  ctx.require_proof = root.opt<bool>("require_proof", false);
  const auto name = root.opt<std::string>("name", subcommand);
  root.opt<std::string>("out", "");
  if (root.has("process")) {
    ctx.process = process_from_json(root.raw("process"), root.at("process"));
    ctx.has_process = true;
  }
  Obj task = root.sub("task");
  Task run;
  if (subcommand == "generate") {
    run = parse_generate(task, ctx);
  } else if (subcommand == "solve") {
    run = parse_solve(task, ctx);
  } else if (subcommand == "estimate") {
    run = parse_estimate(task, ctx);
  } else {
    run = parse_verify(task, ctx);
  }
  task.finish();
  root.finish();

  ExperimentOutcome out;
  out.seed = ctx.seed;
  out.report = {{"experiment", subcommand},
                {"name", name},
                {"seed", ctx.seed},
                {"node_budget", ctx.run.solve.node_budget},
                {"require_proof", ctx.require_proof},
                {"tool_version", kToolVersion},
                {"z", kZ95}};
  run(out);
  out.report["exit_code"] = out.exit_code;
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace greedy
