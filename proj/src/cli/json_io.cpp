#include <cmath>

#include "greedy/json_io.hpp"
#include "schema.hpp"

namespace greedy {

using nlohmann::json;
using detail::Obj;

json to_json(const Window& w) {
  if (w.shape == Window::Shape::box) {
    return {{"shape", "box"}, {"center", w.center}, {"half_widths", w.half_widths}};
  }
  json p = std::isinf(w.ball_p) ? json("inf") : json(w.ball_p);
  return {{"shape", "ball"}, {"center", w.center}, {"radius", w.radius}, {"p", p}};
}

json to_json(const MarkedRealization& r) {
  json atoms = json::array();
  for (const auto& a : r.atoms) atoms.push_back({{"loc", a.loc}, {"mass", a.mass}});
  return {{"dim", r.dim}, {"lattice", r.lattice}, {"window", to_json(r.window)}, {"atoms", atoms}};
}

json to_json(const SolveResult& r) {
  json j = {{"value", r.value},
            {"nodes_explored", r.nodes_explored},
            {"proven_optimal", r.proven_optimal},
            {"infeasible", r.infeasible}};
  if (r.path) j["path"] = r.path->vertices;
  if (r.animal) {
    json edges = json::array();
    for (const auto& [a, b] : r.animal->edges) edges.push_back({a, b});
    j["animal"] = {{"vertices", r.animal->vertices}, {"edges", edges}};
  }
  return j;
}

json to_json(const EstimateReport& r) {
  json grid = json::array();
  for (const auto& g : r.grid) {
    grid.push_back({{"parameter", g.parameter},
                    {"mean", g.mean},
                    {"ci_half_width", g.ci_half_width},
                    {"replicas", g.replicas},
                    {"unproven", g.unproven}});
  }
  json j = {{"label", r.label},
            {"grid", grid},
            {"master_seed", r.master_seed},
            {"stream_scheme", r.stream_scheme},
            {"unproven_total", r.unproven_total},
            {"z", kZ95}};
  if (r.fekete_estimate) j["fekete_estimate"] = *r.fekete_estimate;
  return j;
}

json to_json(const Diagnostic& d) {
  json items = json::array();
  for (const auto& it : d.items) items.push_back({{"label", it.label}, {"margin", it.margin}, {"pass", it.pass}});
  return {{"name", d.name},
          {"pass", d.pass},
          {"structural", d.structural},
          {"unproven", d.unproven},
          {"worst_margin", d.worst_margin},
          {"checked", d.checked},
          {"failed", d.failed},
          {"items", items},
          {"details", d.details}};
}

namespace {

double p_value(const json& v, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw SchemaError(where + ": expected a number or \"inf\"");
  const double p = v.get<double>();
  if (!(p >= 1.0)) throw SchemaError(where + ": p must be at least 1");
  return p;
}

}  // namespace

Window window_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  const auto shape = o.req<std::string>("shape");
  const auto center = o.req<std::vector<double>>("center");
  if (center.empty()) throw SchemaError(o.at("center") + ": empty");
  Window w;
  try {
    if (shape == "box") {
      const auto hw = o.req<std::vector<double>>("half_widths");
      if (hw.size() != center.size()) throw SchemaError(o.at("half_widths") + ": dimension mismatch");
      w = Window::box(center, hw);
    } else if (shape == "ball") {
      const double r = o.req<double>("radius");
      const double p = o.has("p") ? p_value(o.raw("p"), o.at("p")) : 2.0;
      w = Window::ball(center, r, p);
    } else {
      throw SchemaError(o.at("shape") + ": expected box or ball");
    }
  } catch (const InvalidInput& e) {
    throw SchemaError(where + ": " + e.what());
  }
  o.finish();
  return w;
}

MarkDistribution marks_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  const auto kind = o.req<std::string>("kind");
  MarkDistribution m;
  try {
    if (kind == "constant") {
      m = MarkDistribution::constant_mass(o.req<double>("c"));
    } else if (kind == "bernoulli") {
      m = MarkDistribution::bernoulli(o.req<double>("p"), o.opt<double>("scale", 1.0));
    } else if (kind == "exponential") {
      m = MarkDistribution::exponential(o.req<double>("rate"));
    } else if (kind == "pareto") {
      m = MarkDistribution::pareto(o.req<double>("alpha"), o.opt<double>("xmin", 1.0));
    } else if (kind == "discrete") {
      m = MarkDistribution::discrete(o.req<std::vector<double>>("values"), o.req<std::vector<double>>("probs"));
    } else {
      throw SchemaError(o.at("kind") + ": unknown mark distribution");
    }
  } catch (const InvalidInput& e) {
    throw SchemaError(where + ": " + e.what());
  }
  o.finish();
  return m;
}

MarkedRealization realization_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  MarkedRealization r;
  r.dim = o.req<int>("dim");
  if (r.dim < 1) throw SchemaError(o.at("dim") + ": must be positive");
  r.lattice = o.opt<bool>("lattice", false);
  r.window = window_from_json(o.raw("window"), o.at("window"));
  if (r.window.dim() != r.dim) throw SchemaError(o.at("window") + ": dimension mismatch");
  const json& atoms = o.raw("atoms");
  if (!atoms.is_array()) throw SchemaError(o.at("atoms") + ": expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Obj a(atoms[i], o.at("atoms") + "/" + std::to_string(i));
    Atom atom{a.req<std::vector<double>>("loc"), a.req<double>("mass")};
    if (static_cast<int>(atom.loc.size()) != r.dim) throw SchemaError(a.at("loc") + ": dimension mismatch");
    if (!(atom.mass >= 0.0)) throw SchemaError(a.at("mass") + ": must be nonnegative");
    a.finish();
    r.atoms.push_back(std::move(atom));
  }
  o.finish();
  return r;
}

ProcessSpec process_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  ProcessSpec p;
  const auto kind = o.req<std::string>("kind");
  if (kind == "poisson") {
    p.kind = ProcessSpec::Kind::poisson;
  } else if (kind == "lattice_iid") {
    p.kind = ProcessSpec::Kind::lattice_iid;
  } else if (kind == "lattice_columnar") {
    p.kind = ProcessSpec::Kind::lattice_columnar;
  } else if (kind == "dpp_grid") {
    p.kind = ProcessSpec::Kind::dpp_grid;
  } else if (kind == "single_atom") {
    p.kind = ProcessSpec::Kind::single_atom;
  } else if (kind == "empty") {
    p.kind = ProcessSpec::Kind::empty;
  } else {
    throw SchemaError(o.at("kind") + ": unknown process kind");
  }
  p.dim = o.opt<int>("dim", 2);
  if (p.dim < 1) throw SchemaError(o.at("dim") + ": must be positive");
  p.lambda = o.opt<double>("lambda", 1.0);
  if (!(p.lambda > 0.0)) throw SchemaError(o.at("lambda") + ": must be positive");
  if (o.has("marks")) p.marks = marks_from_json(o.raw("marks"), o.at("marks"));
  if (o.has("dpp")) {
    Obj d = o.sub("dpp");
    p.dpp_side = d.opt<double>("side", p.dpp_side);
    p.dpp_cells = d.opt<int>("cells", p.dpp_cells);
    p.dpp_radius = d.opt<int>("radius", p.dpp_radius);
    d.finish();
  }
  o.finish();
  return p;
}

Norm norm_from_json(const json& j, int dim, const std::string& where) {
  return Norm(p_value(j, where), dim);
}

std::string canonical_dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace greedy
