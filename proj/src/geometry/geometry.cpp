#include "greedy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace greedy {

Norm::Norm(double p, int dim) : p_(p), dim_(dim) {
  if (!(p >= 1.0)) throw InvalidInput("norm exponent must be >= 1");
  if (dim < 1) throw InvalidInput("dimension must be positive");
}

double Norm::operator()(std::span<const double> v) const {
  if (is_inf()) {
    double m = 0.0;
    for (double c : v) m = std::max(m, std::abs(c));
    return m;
  }
  if (p_ == 1.0) {
    double s = 0.0;
    for (double c : v) s += std::abs(c);
    return s;
  }
  if (p_ == 2.0) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double c : v) s += std::pow(std::abs(c), p_);
  return std::pow(s, 1.0 / p_);
}

double Norm::distance(std::span<const double> a, std::span<const double> b) const {
  const std::size_t n = a.size();
  if (is_inf()) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }
  if (p_ == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  if (p_ == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = a[i] - b[i];
      s += c * c;
    }
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(a[i] - b[i]), p_);
  return std::pow(s, 1.0 / p_);
}

// For p <= 2: ||x||_2 <= ||x||_p <= d^(1/p - 1/2) ||x||_2, and the reverse for p >= 2.
double Norm::equivalence_constant() const {
  const double inv_p = is_inf() ? 0.0 : 1.0 / p_;
  return std::pow(static_cast<double>(dim_), std::abs(inv_p - 0.5));
}

// ||y - p(y)||_2 <= sqrt(2 delta) ||y - x||_2, then two applications of the equivalence.
double Norm::cone_projection_constant() const {
  const double c1 = equivalence_constant();
  return c1 * c1 * std::sqrt(2.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Point sub(std::span<const double> a, std::span<const double> b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point add(std::span<const double> a, std::span<const double> b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Point scale(std::span<const double> a, double s) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

double path_length(const GeomPath& path, const Norm& norm) {
  if (path.vertices.empty()) throw InvalidInput("path has no vertices");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    total += norm.distance(path.vertices[i], path.vertices[i + 1]);
  }
  return total;
}

bool is_connected(const Animal& animal) {
  const std::size_t n = animal.vertices.size();
  if (n == 0) return false;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = n;
  for (const auto& [a, b] : animal.edges) {
    if (a >= n || b >= n || a == b) return false;
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

double animal_length(const Animal& animal, const Norm& norm) {
  if (!is_connected(animal)) throw InvalidInput("animal is not a connected graph");
  double total = 0.0;
  for (const auto& [a, b] : animal.edges) {
    total += norm.distance(animal.vertices[a], animal.vertices[b]);
  }
  return total;
}

Animal path_as_animal(const GeomPath& path) {
  Animal a;
  std::map<Point, std::size_t> index;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  auto id = [&](const Point& p) {
    auto [it, inserted] = index.emplace(p, a.vertices.size());
    if (inserted) a.vertices.push_back(p);
    return it->second;
  };
  std::size_t prev = id(path.vertices.at(0));
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const std::size_t cur = id(path.vertices[i]);
    if (cur != prev) edges.insert({std::min(prev, cur), std::max(prev, cur)});
    prev = cur;
  }
  a.edges.assign(edges.begin(), edges.end());
  return a;
}

namespace {

bool same_point(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kGeomTol) return false;
  }
  return true;
}

}  // namespace

GeomPath concat_paths(const GeomPath& first, const GeomPath& second) {
  if (first.vertices.empty() || second.vertices.empty()) {
    throw InvalidInput("cannot concatenate empty paths");
  }
  if (!same_point(first.vertices.back(), second.vertices.front())) {
    throw PreconditionError("path junction mismatch: last vertex of the first path must equal "
                            "the first vertex of the second");
  }
  GeomPath out = first;
  out.vertices.insert(out.vertices.end(), second.vertices.begin() + 1, second.vertices.end());
  return out;
}

Animal concat_animals(const Animal& first, const Animal& second) {
  std::map<Point, std::size_t> index;
  Animal out;
  auto id = [&](const Point& p) {
    auto [it, inserted] = index.emplace(p, out.vertices.size());
    if (inserted) out.vertices.push_back(p);
    return it->second;
  };
  std::vector<std::size_t> map1, map2;
  for (const auto& v : first.vertices) map1.push_back(id(v));
  bool shared = false;
  for (const auto& v : second.vertices) {
    shared = shared || index.count(v) > 0;
    map2.push_back(id(v));
  }
  if (!shared) throw PreconditionError("animals must share at least one vertex");
  std::set<std::pair<std::size_t, std::size_t>> edges;
  auto put = [&](std::size_t a, std::size_t b) { edges.insert({std::min(a, b), std::max(a, b)}); };
  for (const auto& [a, b] : first.edges) put(map1.at(a), map1.at(b));
  for (const auto& [a, b] : second.edges) put(map2.at(a), map2.at(b));
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

GeomPath dfs_cover_path(const Animal& animal) {
  if (!is_connected(animal)) throw InvalidInput("animal is not a connected graph");
  const std::size_t n = animal.vertices.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : animal.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  std::vector<bool> seen(n, false);
  std::vector<std::size_t> walk{0};
  std::size_t last_discovery = 0;
  seen[0] = true;
  // Stack frames hold (vertex, next adjacency slot).
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [v, slot] = stack.back();
    if (slot < adj[v].size()) {
      const std::size_t w = adj[v][slot++];
      if (!seen[w]) {
        seen[w] = true;
        walk.push_back(w);
        last_discovery = walk.size() - 1;
        stack.emplace_back(w, 0);
      }
    } else {
      stack.pop_back();
      if (!stack.empty()) walk.push_back(stack.back().first);
    }
  }
  walk.resize(last_discovery + 1);
  GeomPath out;
  for (std::size_t v : walk) out.vertices.push_back(animal.vertices[v]);
  return out;
}

bool in_cone(const ConeSpec& cone, std::span<const double> z) {
  const double un = euclidean_norm(cone.direction);
  if (un == 0.0) throw InvalidInput("cone direction must be nonzero");
  const Point w = sub(z, cone.apex);
  return dot(w, cone.direction) / un >= (1.0 - cone.delta) * euclidean_norm(w) - kGeomTol;
}

bool in_diamond(const DiamondSpec& d, std::span<const double> z) {
  return in_cone({d.delta, d.x, sub(d.y, d.x)}, z) && in_cone({d.delta, d.y, sub(d.x, d.y)}, z);
}

bool in_antidiamond(const AntidiamondSpec& a, std::span<const double> z) {
  if (same_point(z, a.x) || same_point(z, a.y)) return true;
  return !in_cone({a.delta, a.x, sub(a.x, a.y)}, z) && !in_cone({a.delta, a.y, sub(a.y, a.x)}, z);
}

Point orth_project_onto_line(std::span<const double> x, std::span<const double> v,
                             std::span<const double> y) {
  const double vv = dot(v, v);
  if (vv == 0.0) throw InvalidInput("projection direction must be nonzero");
  const Point w = sub(y, x);
  const double t = dot(w, v) / vv;
  Point p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * v[i];
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> mst_edges(const std::vector<Point>& points,
                                                           const Norm& norm) {
  const std::size_t n = points.size();
  if (n == 0) throw InvalidInput("minimum spanning tree of an empty point set");
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> link(n, 0);
  std::vector<bool> in_tree(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    }
    in_tree[u] = true;
    if (step > 0) edges.emplace_back(std::min(link[u], u), std::max(link[u], u));
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double d = norm.distance(points[u], points[v]);
      if (d < best[v]) {
        best[v] = d;
        link[v] = u;
      }
    }
  }
  return edges;
}

double mst_length(const std::vector<Point>& points, const Norm& norm) {
  double total = 0.0;
  for (const auto& [a, b] : mst_edges(points, norm)) total += norm.distance(points[a], points[b]);
  return total;
}

namespace {

struct Axis {
  Point unit;       // Euclidean unit vector, used for projections
  double norm_len;  // ||unit|| in the ambient norm
};

Axis make_axis(std::span<const double> e, const Norm& norm) {
  const double len = euclidean_norm(e);
  if (len == 0.0) throw InvalidInput("axis direction must be nonzero");
  Axis ax{scale(e, 1.0 / len), 0.0};
  ax.norm_len = norm(ax.unit);
  return ax;
}

double off_axis(const Axis& ax, std::span<const double> z, const Norm& norm) {
  const Point p = scale(ax.unit, dot(z, ax.unit));
  return norm.distance(z, p);
}

}  // namespace

bool is_cylinder_path(const GeomPath& piece, double h, std::span<const double> axis,
                      const Norm& norm) {
  if (piece.vertices.size() < 2) return false;
  const Axis ax = make_axis(axis, norm);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& z : piece.vertices) {
    if (off_axis(ax, z, norm) <= h + kGeomTol) {
      const double t = dot(z, ax.unit);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  const auto& a = piece.vertices.front();
  const auto& b = piece.vertices.back();
  if (off_axis(ax, a, norm) > h + kGeomTol || off_axis(ax, b, norm) > h + kGeomTol) return false;
  const double ta = dot(a, ax.unit), tb = dot(b, ax.unit);
  return (ta <= lo + kGeomTol && tb >= hi - kGeomTol) ||
         (tb <= lo + kGeomTol && ta >= hi - kGeomTol);
}

std::vector<GeomPath> cylinder_decompose(const GeomPath& path, double delta, double ell,
                                         std::span<const double> axis, const Norm& norm) {
  if (path.vertices.empty()) throw InvalidInput("path has no vertices");
  if (!(delta > 0.0 && delta < 0.25)) throw PreconditionError("delta must lie in (0, 1/4)");
  if (!(ell > 0.0)) throw PreconditionError("ell must be positive");
  const Axis ax = make_axis(axis, norm);
  const auto& x = path.vertices.front();
  const auto& y = path.vertices.back();
  if (off_axis(ax, x, norm) > kGeomTol || off_axis(ax, y, norm) > kGeomTol) {
    throw PreconditionError("path endpoints must lie on the axis");
  }

  // Stubs have length delta * ell in the ambient norm.
  const Point stub = scale(ax.unit, delta * ell / ax.norm_len);
  std::vector<Point> v;
  v.reserve(path.vertices.size() + 2);
  v.push_back(sub(x, stub));
  v.insert(v.end(), path.vertices.begin(), path.vertices.end());
  v.push_back(add(y, stub));

  const double h = delta * delta * ell;
  const std::size_t n = v.size();
  std::vector<bool> strip(n);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    strip[i] = off_axis(ax, v[i], norm) <= h + kGeomTol;
    t[i] = dot(v[i], ax.unit);
  }

  // Fewest pieces covering [0, k], by dynamic programming over piece start points.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> count(n, kNone), prev(n, kNone);
  count[0] = 0;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    if (count[s] == kNone || !strip[s]) continue;
    double lo = t[s], hi = t[s];
    for (std::size_t k = s + 1; k < n; ++k) {
      if (!strip[k]) continue;
      lo = std::min(lo, t[k]);
      hi = std::max(hi, t[k]);
      const bool ok = (t[s] <= lo + kGeomTol && t[k] >= hi - kGeomTol) ||
                      (t[k] <= lo + kGeomTol && t[s] >= hi - kGeomTol);
      if (ok && count[s] + 1 < count[k]) {
        count[k] = count[s] + 1;
        prev[k] = s;
      }
    }
  }
  std::vector<GeomPath> pieces;
  for (std::size_t k = n - 1; k != 0; k = prev[k]) {
    GeomPath piece;
    piece.vertices.assign(v.begin() + static_cast<std::ptrdiff_t>(prev[k]),
                          v.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    pieces.push_back(std::move(piece));
  }
  std::reverse(pieces.begin(), pieces.end());
  return pieces;
}

}  // namespace greedy
