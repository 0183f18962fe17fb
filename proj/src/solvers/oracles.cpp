#include <algorithm>
#include <cmath>
#include <numeric>

#include "greedy/solvers.hpp"
#include "solver_common.hpp"

namespace greedy {

namespace {

constexpr std::size_t kPathOracleCap = 8;
constexpr std::size_t kAnimalOracleCap = 12;

struct Enumerator {
  const std::vector<Point>& locs;
  const std::vector<double>& mass;
  const Norm& norm;
  const Point& x;
  const Point* y;
  double budget;
  double best = 0.0;
  std::vector<std::size_t> seq;
  std::vector<bool> used;

  void visit(double length, double m) {
    const double total = y ? length + norm.distance(seq.empty() ? x : locs[seq.back()], *y) : length;
    if (total <= budget) best = std::max(best, m);
    for (std::size_t j = 0; j < locs.size(); ++j) {
      if (used[j]) continue;
      const double step = norm.distance(seq.empty() ? x : locs[seq.back()], locs[j]);
      used[j] = true;
      seq.push_back(j);
      visit(length + step, m + mass[j]);
      seq.pop_back();
      used[j] = false;
    }
  }
};

double kruskal_length(const std::vector<Point>& pts, const Norm& norm) {
  const std::size_t n = pts.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) edges.emplace_back(norm.distance(pts[a], pts[b]), a, b);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  double total = 0.0;
  for (const auto& [w, a, b] : edges) {
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      total += w;
    }
  }
  return total;
}

}  // namespace

double brute_force_path_oracle(const MarkedRealization& r, const PathQuery& q) {
  const bool two = q.mode == PathQuery::Mode::two_point;
  const Point x = q.x.empty() ? Point(static_cast<std::size_t>(r.dim), 0.0) : q.x;
  const Point y = two ? q.y : x;
  if (two && q.norm.distance(x, y) > q.ell + kGeomTol) return 0.0;

  double anchored = 0.0;
  std::vector<Point> locs;
  std::vector<double> mass;
  for (const Atom& a : r.atoms) {
    if (a.loc == x || (two && a.loc == y)) {
      anchored += a.mass;
      continue;
    }
    if (a.mass <= 0.0) continue;
    if (!detail::passes_restriction(q.restriction, q.delta, x, y, a.loc)) continue;
    locs.push_back(a.loc);
    mass.push_back(a.mass);
  }
  if (locs.size() > kPathOracleCap) throw OracleRefusal("path oracle is capped at 8 atoms");

  Enumerator e{locs, mass, q.norm, x, two ? &y : nullptr, q.ell + kGeomTol, 0.0, {},
               std::vector<bool>(locs.size(), false)};
  e.visit(0.0, anchored);
  return e.best;
}

double brute_force_animal_oracle(const MarkedRealization& r, const AnimalQuery& q) {
  const bool two = q.y.has_value();
  const Point x = q.x.empty() ? Point(static_cast<std::size_t>(r.dim), 0.0) : q.x;
  const Point y = two ? *q.y : x;
  std::vector<const Atom*> atoms;
  for (const Atom& a : r.atoms) {
    if (detail::passes_restriction(q.restriction, q.delta, x, y, a.loc)) atoms.push_back(&a);
  }
  if (atoms.size() > kAnimalOracleCap) throw OracleRefusal("animal oracle is capped at 12 atoms");

  double best = 0.0;
  const std::size_t n = atoms.size();
  std::vector<Point> pts;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    pts.clear();
    double m = 0.0;
    double dx = std::numeric_limits<double>::infinity(), dy = dx;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      pts.push_back(atoms[i]->loc);
      m += atoms[i]->mass;
      dx = std::min(dx, q.norm.distance(x, atoms[i]->loc));
      dy = std::min(dy, q.norm.distance(y, atoms[i]->loc));
    }
    if (m <= best) continue;
    const double cost = kruskal_length(pts, q.norm) + dx + (two ? dy : 0.0);
    if (cost <= q.ell + kGeomTol) best = m;
  }
  return best;
}

}  // namespace greedy
