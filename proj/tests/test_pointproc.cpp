#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "greedy/pointproc.hpp"

using namespace greedy;

namespace {

Window unit_square() { return Window::box({0.5, 0.5}, {0.5, 0.5}); }

MarkedRealization hand_realization(const std::vector<std::pair<Point, double>>& atoms) {
  MarkedRealization r;
  r.dim = 2;
  r.window = Window::box({0.0, 0.0}, {10.0, 10.0});
  for (const auto& [p, m] : atoms) r.atoms.push_back({p, m});
  return r;
}

}  // namespace

TEST_CASE("poisson sampler: degenerate window and count mean") {
  CHECK_THROWS_AS(Window::box({0.0, 0.0}, {0.0, 1.0}), InvalidInput);
  CHECK(sample_poisson_marked(0.0, MarkDistribution::constant_mass(1.0), unit_square(), 1).atoms.empty());

  const std::size_t n = 100000;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = sample_poisson_marked(1.0, MarkDistribution::constant_mass(1.0), unit_square(), stream_seed(7, i));
    for (const auto& a : r.atoms) REQUIRE(unit_square().contains(a.loc));
    total += static_cast<double>(r.atoms.size());
  }
  CHECK(std::abs(total / n - 1.0) <= 3.0 * std::sqrt(1.0 / n));
}

TEST_CASE("constant marks: window mass is c times the count") {
  const Window w = Window::box({0.0, 0.0}, {3.0, 3.0});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = sample_poisson_marked(1.5, MarkDistribution::constant_mass(2.0), w, s);
    CHECK(mass_of_set(r, [&](std::span<const double> z) { return w.contains(z); }) ==
          2.0 * static_cast<double>(r.atoms.size()));
  }
}

TEST_CASE("lattice samplers") {
  const auto one = sample_lattice_iid(MarkDistribution::exponential(1.0), {{0, 0}, {0, 0}}, 3);
  REQUIRE(one.atoms.size() == 1);
  CHECK(one.atoms[0].loc == Point{0.0, 0.0});
  CHECK(one.lattice);

  const auto col = sample_lattice_columnar(MarkDistribution::exponential(1.0), {{0, 0}, {4, 4}}, 11);
  REQUIRE(col.atoms.size() == 25);
  // rows as vectors indexed by the first coordinate
  std::vector<std::vector<double>> rows(5, std::vector<double>(5, -1.0));
  for (const auto& a : col.atoms) rows[static_cast<int>(a.loc[1])][static_cast<int>(a.loc[0])] = a.mass;
  for (int v2 = 1; v2 < 5; ++v2) CHECK(rows[v2] == rows[0]);

  const double p = 0.3;
  const std::size_t reps = 10000;
  double positive = 0.0, sites = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const auto r = sample_lattice_iid(MarkDistribution::bernoulli(p), {{0, 0}, {19, 19}}, stream_seed(5, i));
    REQUIRE(r.atoms.size() == 400);
    for (const auto& a : r.atoms) positive += a.mass > 0.0 ? 1.0 : 0.0;
    sites += 400.0;
  }
  CHECK(std::abs(positive / sites - p) <= 3.0 * std::sqrt(p * (1 - p) / sites));
}

TEST_CASE("shifts") {
  const auto r = sample_poisson_marked(2.0, MarkDistribution::exponential(1.0), Window::box({0, 0}, {2, 2}), 9);
  const Point zero{0.0, 0.0};
  const auto same = shift_realization(r, zero);
  REQUIRE(same.atoms.size() == r.atoms.size());
  for (std::size_t i = 0; i < r.atoms.size(); ++i) CHECK(same.atoms[i].loc == r.atoms[i].loc);

  // Dyadic coordinates and shifts: every sum is representable, so the inverse is exact.
  Engine rng = make_engine(21);
  MarkedRealization d = hand_realization({});
  for (int i = 0; i < 50; ++i) {
    d.atoms.push_back({{std::floor(uniform01(rng) * 4096) / 1024.0, std::floor(uniform01(rng) * 4096) / 1024.0}, 1.0});
  }
  for (int k = 0; k < 20; ++k) {
    const Point z{std::floor(uniform01(rng) * 8192 - 4096) / 256.0, std::floor(uniform01(rng) * 8192 - 4096) / 256.0};
    const auto back = shift_realization(shift_realization(d, z), Point{-z[0], -z[1]});
    for (std::size_t i = 0; i < d.atoms.size(); ++i) CHECK(back.atoms[i].loc == d.atoms[i].loc);
    CHECK(back.window.center == d.window.center);
  }
  // Generic doubles come back within one rounding of each addition.
  const Point z{0.3141, -0.2718};
  const auto back = shift_realization(shift_realization(r, z), Point{-z[0], -z[1]});
  for (std::size_t i = 0; i < r.atoms.size(); ++i) {
    for (int c = 0; c < 2; ++c) CHECK(std::abs(back.atoms[i].loc[c] - r.atoms[i].loc[c]) <= 4e-16 * 4.0);
  }

  const auto lat = sample_lattice_iid(MarkDistribution::constant_mass(1.0), {{-3, -3}, {3, 3}}, 2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto sh = uniform_shift(lat, s);
    CHECK_FALSE(sh.lattice);
    for (const auto& a : sh.atoms) {
      for (double c : a.loc) CHECK(c != std::floor(c));
    }
  }
}

TEST_CASE("iid marking") {
  const Window w = Window::box({0, 0}, {1e6, 1});
  CHECK(iid_marking({}, w, MarkDistribution::exponential(1.0), 1).atoms.empty());
  std::vector<Point> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({static_cast<double>(i), 0.0});
  for (const auto& a : iid_marking(pts, w, MarkDistribution::constant_mass(2.5), 3).atoms) CHECK(a.mass == 2.5);
  CHECK_THROWS_AS(iid_marking({{0.0, 0.0}, {0.0, 0.0}}, w, MarkDistribution::constant_mass(1.0), 1), InvalidInput);

  // Pareto tail against the survival function at a few levels.
  pts.clear();
  for (int i = 0; i < 100000; ++i) pts.push_back({static_cast<double>(i), 0.0});
  const auto nu = MarkDistribution::pareto(2.5, 1.0);
  const auto r = iid_marking(pts, w, nu, 17);
  REQUIRE(r.atoms.size() == pts.size());
  for (double t : {1.0, 1.5, 2.0, 4.0}) {
    double hits = 0.0;
    for (const auto& a : r.atoms) hits += a.mass >= t ? 1.0 : 0.0;
    const double expected = std::pow(t, -2.5);
    const double n = static_cast<double>(r.atoms.size());
    CHECK(tail_function(nu, t) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(hits / n - expected) <= 4.0 * std::sqrt(expected * (1 - expected) / n) + 1e-12);
  }
}

TEST_CASE("truncation") {
  const auto r = hand_realization({{{0, 0}, 0.5}, {{1, 0}, 2.0}, {{2, 0}, 3.0}});
  CHECK(truncate(r, 10.0).atoms.empty());
  const auto all = truncate(r, 1e-12);
  REQUIRE(all.atoms.size() == 3);
  for (const auto& a : all.atoms) CHECK(a.mass == 1.0);
  const auto two = truncate(r, 1.0);
  REQUIRE(two.atoms.size() == 2);
  CHECK(two.atoms[0].loc == Point{1, 0});
  CHECK(two.atoms[1].loc == Point{2, 0});
  CHECK(two.atoms[0].mass == 1.0);
  CHECK_THROWS_AS(truncate(r, 0.0), InvalidInput);
}

TEST_CASE("set masses") {
  const auto r = hand_realization({{{0, 0}, 0.5}, {{1, 0}, 2.0}, {{2, 0}, 3.0}});
  CHECK(mass_of_set(r, [](std::span<const double>) { return false; }) == 0.0);
  CHECK(mass_of_set(r, [&](std::span<const double> z) { return r.window.contains(z); }) == 5.5);
  CHECK(mass_of_vertex_set(r, {{1, 0}, {2, 0}}) == 5.0);
  CHECK(mass_of_vertex_set(r, {{1, 0}, {2, 0}, {1, 0}, {1, 0}}) == 5.0);
  CHECK(mass_of_vertex_set(r, {{0.5, 0}}) == 0.0);
  CHECK(layer_mass(r, {{0, 0}, {1, 0}, {2, 0}, {0, 0}}) == doctest::Approx(5.5).epsilon(1e-14));
}

TEST_CASE("greedy integral") {
  for (int d : {1, 2, 3}) {
    CHECK(greedy_integral(MarkDistribution::constant_mass(2.5), d).value == doctest::Approx(2.5));
    CHECK(greedy_integral(MarkDistribution::bernoulli(0.3), d).value == doctest::Approx(std::pow(0.3, 1.0 / d)));
    // integral of exp(-r t / d) is d / r
    CHECK(greedy_integral(MarkDistribution::exponential(2.0), d).value == doctest::Approx(d / 2.0));
    const auto heavy = MarkDistribution::pareto(0.9 * d, 1.0);
    CHECK_FALSE(greedy_integral(heavy, d).finite);
    CHECK_FALSE(greedy_integral_numeric(heavy, d).finite);
    // integral is xmin (1 + 1 / (alpha / d - 1)) for alpha > d
    const auto light = MarkDistribution::pareto(2.0 * d, 1.5);
    CHECK(greedy_integral(light, d).value == doctest::Approx(1.5 * 2.0));
    for (const auto& nu : {MarkDistribution::exponential(0.7), light, MarkDistribution::bernoulli(0.4, 3.0),
                           MarkDistribution::discrete({0.5, 1.0, 4.0}, {0.2, 0.5, 0.3})}) {
      const auto a = greedy_integral(nu, d);
      const auto b = greedy_integral_numeric(nu, d);
      REQUIRE(a.finite);
      REQUIRE(b.finite);
      CHECK(b.value == doctest::Approx(a.value).epsilon(1e-5));
    }
  }
}

TEST_CASE("factorial moment estimates") {
  const Window region = Window::box({1.5, 1.5}, {1.5, 1.5});
  std::vector<MarkedRealization> batch;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    batch.push_back(sample_poisson_marked(1.0, MarkDistribution::constant_mass(1.0), region, stream_seed(3, s)));
  }
  const Window b1 = Window::box_from_corners({0, 0}, {1, 1});
  const Window b2 = Window::box_from_corners({2, 0}, {3, 1});
  const auto m1 = estimate_factorial_moment(batch, {b1}, 1);
  CHECK(std::abs(m1.mean - 1.0) <= 4.0 * m1.std_error);
  const auto same = estimate_factorial_moment(batch, {b1, b1}, 2);
  CHECK(std::abs(same.mean - 1.0) <= 4.0 * same.std_error);
  const auto apart = estimate_factorial_moment(batch, {b1, b2}, 2);
  const auto m2 = estimate_factorial_moment(batch, {b2}, 1);
  CHECK(std::abs(apart.mean - m1.mean * m2.mean) <= 4.0 * apart.std_error + 4.0 * (m1.std_error + m2.std_error));
  CHECK(m1.replicas == 4000);
}
