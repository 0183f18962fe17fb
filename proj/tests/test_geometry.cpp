#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "greedy/geometry.hpp"
#include "greedy/rng.hpp"

using namespace greedy;

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

Point random_point(Engine& rng, int d, double lo = -1.0, double hi = 1.0) {
  Point p(static_cast<std::size_t>(d));
  for (auto& c : p) c = lo + (hi - lo) * uniform01(rng);
  return p;
}

double naive_distance(const Point& a, const Point& b, double p) {
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = std::abs(a[i] - b[i]);
    s += std::pow(t, p);
    m = std::max(m, t);
  }
  return std::isinf(p) ? m : std::pow(s, 1.0 / p);
}

// Minimum over all n^(n-2) labelled trees, decoded from Pruefer sequences.
double cayley_min_tree(const std::vector<Point>& pts, const Norm& norm) {
  const std::size_t n = pts.size();
  if (n < 2) return 0.0;
  if (n == 2) return norm.distance(pts[0], pts[1]);
  std::vector<std::size_t> seq(n - 2, 0);
  double best = kInf;
  while (true) {
    std::vector<std::size_t> degree(n, 1);
    for (auto s : seq) ++degree[s];
    double total = 0.0;
    for (auto s : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      total += norm.distance(pts[leaf], pts[s]);
      --degree[leaf];
      --degree[s];
    }
    std::vector<std::size_t> last;
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] == 1) last.push_back(i);
    }
    total += norm.distance(pts[last[0]], pts[last[1]]);
    best = std::min(best, total);
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] == n) seq[k++] = 0;
    if (k == seq.size()) break;
  }
  return best;
}

}  // namespace

TEST_CASE("norms and path lengths") {
  const Norm l1 = Norm::l1(2);
  CHECK(path_length(GeomPath{{{0.0, 0.0}}}, l1) == 0.0);
  CHECK(path_length(GeomPath{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}}, l1) == doctest::Approx(2.0));

  Engine rng = make_engine(11);
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
    const Norm n(p, 3);
    GeomPath g;
    for (int i = 0; i < 6; ++i) g.vertices.push_back(random_point(rng, 3));
    double oracle = 0.0;
    for (std::size_t i = 1; i < g.vertices.size(); ++i) oracle += naive_distance(g.vertices[i - 1], g.vertices[i], p);
    CHECK(path_length(g, n) == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Norm(0.5, 2), InvalidInput);
  CHECK_THROWS_AS(path_length(GeomPath{}, l1), InvalidInput);
}

TEST_CASE("norm equivalence constant is tight on random vectors") {
  Engine rng = make_engine(12);
  for (double p : {1.0, 2.0, 4.0, kInf}) {
    const Norm n(p, 3);
    const double c1 = n.equivalence_constant();
    for (int i = 0; i < 2000; ++i) {
      const Point v = random_point(rng, 3);
      const double e = euclidean_norm(v);
      CHECK(e / c1 <= n(v) + 1e-12);
      CHECK(n(v) <= c1 * e + 1e-12);
    }
  }
  CHECK(Norm::l2(5).equivalence_constant() == doctest::Approx(1.0));
  CHECK(Norm::l1(4).equivalence_constant() == doctest::Approx(2.0));
}

TEST_CASE("animal length and connectivity") {
  Animal single{{{0.0, 0.0}}, {}};
  CHECK(animal_length(single, Norm::l1(2)) == 0.0);
  Animal tri{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1}, {1, 2}, {0, 2}}};
  CHECK(animal_length(tri, Norm::l1(2)) == doctest::Approx(4.0));
  Animal broken{{{0.0, 0.0}, {1.0, 0.0}, {5.0, 5.0}}, {{0, 1}}};
  CHECK_FALSE(is_connected(broken));
  CHECK_THROWS_AS(animal_length(broken, Norm::l2(2)), InvalidInput);

  Engine rng = make_engine(13);
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(random_point(rng, 2));
  const Norm l2 = Norm::l2(2);
  Animal mst{pts, mst_edges(pts, l2)};
  CHECK(animal_length(mst, l2) == doctest::Approx(mst_length(pts, l2)).epsilon(1e-12));
}

TEST_CASE("concatenation") {
  GeomPath a{{{0.0, 0.0}, {1.0, 0.0}}}, b{{{1.0, 0.0}, {1.0, 1.0}}};
  const GeomPath ab = concat_paths(a, b);
  REQUIRE(ab.vertices.size() == 3);
  CHECK(ab.vertices[2] == Point{1.0, 1.0});
  CHECK_THROWS_AS(concat_paths(a, GeomPath{{{2.0, 2.0}}}), PreconditionError);
  CHECK(path_length(ab, Norm::l2(2)) == doctest::Approx(path_length(a, Norm::l2(2)) + path_length(b, Norm::l2(2))));

  Animal x{{{0.0, 0.0}, {1.0, 0.0}}, {{0, 1}}};
  Animal y{{{1.0, 0.0}, {1.0, 2.0}}, {{0, 1}}};
  const Norm l2 = Norm::l2(2);
  const Animal xy = concat_animals(x, y);
  CHECK(xy.vertices.size() == 3);
  CHECK(animal_length(xy, l2) == doctest::Approx(animal_length(x, l2) + animal_length(y, l2)));
  const Animal xx = concat_animals(x, x);
  CHECK(xx.vertices.size() == x.vertices.size());
  CHECK(xx.edges.size() == x.edges.size());
  CHECK_THROWS_AS(concat_animals(x, Animal{{{7.0, 7.0}}, {}}), PreconditionError);
}

TEST_CASE("depth-first cover path") {
  const Norm l2 = Norm::l2(2);
  Animal edge{{{0.0, 0.0}, {3.0, 4.0}}, {{0, 1}}};
  CHECK(path_length(dfs_cover_path(edge), l2) <= 2.0 * 5.0 + 1e-12);
  Animal star{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}, {{0, 1}, {0, 2}, {0, 3}}};
  CHECK(path_length(dfs_cover_path(star), l2) <= 6.0 + 1e-12);

  Engine rng = make_engine(14);
  for (int it = 0; it < 1000; ++it) {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(random_point(rng, 2));
    // Random recursive tree.
    Animal a{pts, {}};
    for (std::size_t i = 1; i < pts.size(); ++i) {
      a.edges.push_back({static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i)), i});
    }
    const GeomPath cover = dfs_cover_path(a);
    CHECK(path_length(cover, l2) <= 2.0 * animal_length(a, l2) + 1e-9);
    std::vector<Point> seen = cover.vertices;
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    CHECK(seen.size() == pts.size());
  }
}

TEST_CASE("cones, diamonds and antidiamonds") {
  const ConeSpec cone{0.5, {0.0, 0.0}, {1.0, 0.0}};
  CHECK(in_cone(cone, Point{0.0, 0.0}));
  CHECK(in_cone(cone, Point{1.0, 1.0}));  // 1 >= 0.5 * sqrt(2)
  CHECK_FALSE(in_cone(cone, Point{-1.0, 0.1}));
  const DiamondSpec dm{0.3, {0.0, 0.0}, {4.0, 0.0}};
  for (double delta : {0.05, 0.3, 0.9}) {
    const DiamondSpec s{delta, {0.0, 0.0}, {4.0, 0.0}};
    CHECK(in_antidiamond(s, s.x));
    CHECK(in_antidiamond(s, s.y));
    CHECK(in_diamond(s, s.x));
    CHECK(in_diamond(s, s.y));
  }
  Engine rng = make_engine(15);
  for (int i = 0; i < 20000; ++i) {
    const Point z = random_point(rng, 2, -6.0, 10.0);
    if (in_diamond(dm, z)) {
      CHECK(in_antidiamond(dm, z));
      CHECK(euclidean_norm(z) <= 4.0 / (1.0 - dm.delta) + 1e-9);
    }
  }
  for (int i = 0; i <= 40; ++i) CHECK(in_antidiamond(dm, Point{0.1 * i, 0.0}));
}

TEST_CASE("projection onto a line and the cone bound") {
  const Point p = orth_project_onto_line(Point{0.0, 0.0}, Point{1.0, 0.0}, Point{3.0, 4.0});
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == doctest::Approx(0.0));
  const Point q = orth_project_onto_line(Point{1.0, 1.0}, Point{1.0, 1.0}, Point{2.0, 2.0});
  CHECK(q[0] == doctest::Approx(2.0));

  Engine rng = make_engine(16);
  for (double pn : {1.0, 2.0, kInf}) {
    const Norm n(pn, 2);
    const double c2 = n.cone_projection_constant();
    int tested = 0;
    while (tested < 10000) {
      const double delta = 0.01 + 0.98 * uniform01(rng);
      const Point u = random_point(rng, 2);
      if (euclidean_norm(u) < 1e-3) continue;
      const Point x = random_point(rng, 2);
      const Point y = add(x, random_point(rng, 2, -3.0, 3.0));
      if (!in_cone(ConeSpec{delta, x, u}, y)) continue;
      ++tested;
      const Point py = orth_project_onto_line(x, u, y);
      CHECK(n.distance(y, py) <= c2 * std::sqrt(delta) * n.distance(y, x) + 1e-9);
    }
  }
}

TEST_CASE("minimum spanning tree") {
  const Norm l2 = Norm::l2(2);
  CHECK(mst_length({{0.0, 0.0}}, l2) == 0.0);
  CHECK(mst_length({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, l2) == doctest::Approx(2.0));
  Engine rng = make_engine(17);
  for (double p : {1.0, 2.0, kInf}) {
    const Norm n(p, 2);
    for (int it = 0; it < 30; ++it) {
      std::vector<Point> pts;
      const int count = 2 + it % 6;
      for (int i = 0; i < count; ++i) pts.push_back(random_point(rng, 2));
      CHECK(mst_length(pts, n) == doctest::Approx(cayley_min_tree(pts, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cylinder decomposition reassembles the extended path") {
  Engine rng = make_engine(18);
  const Norm l2 = Norm::l2(2);
  const Point e{1.0, 0.0};
  const double ell = 20.0, delta = 0.2;
  for (int it = 0; it < 200; ++it) {
    // Staircase from the origin to (L, 0) with lateral wiggles.
    GeomPath g{{{0.0, 0.0}}};
    double x = 0.0;
    while (x < 15.0) {
      x += 0.5 + uniform01(rng);
      g.vertices.push_back({std::min(x, 15.0), (uniform01(rng) - 0.5) * 3.0});
    }
    g.vertices.push_back({15.0, 0.0});
    const auto pieces = cylinder_decompose(g, delta, ell, e, l2);
    REQUIRE_FALSE(pieces.empty());
    GeomPath joined = pieces.front();
    for (std::size_t i = 1; i < pieces.size(); ++i) joined = concat_paths(joined, pieces[i]);
    GeomPath extended{{{-delta * ell, 0.0}}};
    for (const auto& v : g.vertices) extended.vertices.push_back(v);
    extended.vertices.push_back({15.0 + delta * ell, 0.0});
    CHECK(joined.vertices == extended.vertices);
    for (const auto& piece : pieces) CHECK(is_cylinder_path(piece, delta * delta * ell, e, l2));
  }
  // A path inside the strip and monotone along the axis needs at most three pieces.
  GeomPath straight{{{0.0, 0.0}, {2.0, 0.1}, {5.0, -0.1}, {8.0, 0.0}}};
  CHECK(cylinder_decompose(straight, delta, ell, e, l2).size() <= 3);
}
