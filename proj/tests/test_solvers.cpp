#include <cmath>
#include <limits>

#include "doctest.h"
#include "greedy/solvers.hpp"

using namespace greedy;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MarkedRealization realization(const std::vector<std::pair<Point, double>>& atoms, double half = 10.0) {
  MarkedRealization r;
  r.dim = 2;
  r.window = Window::box({0.0, 0.0}, {half, half});
  for (const auto& [p, m] : atoms) r.atoms.push_back({p, m});
  return r;
}

MarkedRealization random_instance(std::uint64_t seed, std::size_t atoms, double spread) {
  Engine rng = make_engine(seed);
  std::vector<std::pair<Point, double>> a;
  for (std::size_t i = 0; i < atoms; ++i) {
    a.push_back({{spread * (2 * uniform01(rng) - 1), spread * (2 * uniform01(rng) - 1)}, 0.2 + 2 * uniform01(rng)});
  }
  return realization(a);
}

AnimalQuery animal(Point x, double ell, const Norm& norm, std::optional<Point> y = std::nullopt) {
  AnimalQuery q;
  q.x = std::move(x);
  q.y = std::move(y);
  q.ell = ell;
  q.norm = norm;
  return q;
}

}  // namespace

TEST_CASE("paths: trivial instances") {
  const Norm l2 = Norm::l2(2);
  CHECK(max_mass_path(realization({}), PathQuery::from_origin(3.0, l2)).value == 0.0);
  const auto far = realization({{{2.0, 0.0}, 1.7}});
  CHECK(max_mass_path(far, PathQuery::from_origin(1.9, l2)).value == 0.0);
  const auto res = max_mass_path(far, PathQuery::from_origin(2.0, l2));
  CHECK(res.value == 1.7);
  CHECK(res.proven_optimal);
  REQUIRE(res.path);
  CHECK(path_length(*res.path, l2) <= 2.0 + kGeomTol);
  CHECK_THROWS_AS(max_mass_path(realization({}, 1.0), PathQuery::from_origin(3.0, l2)), WindowError);
}

TEST_CASE("paths agree with the permutation oracle") {
  for (double p : {1.0, 2.0, kInf}) {
    const Norm norm(p, 2);
    for (std::uint64_t s = 0; s < 40; ++s) {
      const auto r = random_instance(s, 8, 1.5);
      for (double ell : {0.7, 1.5, 3.0}) {
        const auto q = PathQuery::from_origin(ell, norm);
        const auto res = max_mass_path(r, q);
        CHECK(res.value == doctest::Approx(brute_force_path_oracle(r, q)).epsilon(1e-12));
        REQUIRE(res.path);
        CHECK(path_length(*res.path, norm) <= ell + 1e-9);
        CHECK(mass_of_vertex_set(r, res.path->vertices) == doctest::Approx(res.value).epsilon(1e-12));
      }
      const auto two = PathQuery::two_point({-1.0, 0.0}, {1.0, 0.5}, 3.0, norm);
      CHECK(max_mass_path(r, two).value == doctest::Approx(brute_force_path_oracle(r, two)).epsilon(1e-12));
    }
  }
  const auto big = random_instance(1, 9, 1.0);
  CHECK_THROWS_AS(brute_force_path_oracle(big, PathQuery::from_origin(1.0, Norm::l2(2))), OracleRefusal);
}

TEST_CASE("animals: hand instances") {
  const Norm l2 = Norm::l2(2);
  const auto one = realization({{{0.0, 0.8}, 2.5}});
  CHECK(max_mass_animal_inf(one, animal({0, 0}, 0.79, l2)).value == 0.0);
  CHECK(max_mass_animal_inf(one, animal({0, 0}, 0.8, l2)).value == 2.5);

  const auto chain = realization({{{0.5, 0}, 1}, {{1.0, 0}, 1}, {{1.5, 0}, 1}, {{0, 1.2}, 2.5}});
  const auto res = max_mass_animal_inf(chain, animal({0, 0}, 1.5, l2));
  CHECK(res.value == 3.0);
  REQUIRE(res.animal);
  CHECK(animal_length(*res.animal, l2) <= 1.5 + kGeomTol);
  CHECK(max_mass_animal_inf(chain, animal({0, 0}, 1.49, l2)).value == 2.5);
  CHECK(max_mass_animal_inf(chain, animal({0, 0}, 0.99, l2)).value == 1.0);
}

TEST_CASE("animals agree with the subset oracle") {
  for (double p : {1.0, 2.0}) {
    const Norm norm(p, 2);
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto r = random_instance(100 + s, 10, 1.5);
      for (double ell : {1.0, 2.5, 4.0}) {
        const auto q = animal({0, 0}, ell, norm);
        CHECK(max_mass_animal_inf(r, q).value == doctest::Approx(brute_force_animal_oracle(r, q)).epsilon(1e-12));
        const auto q2 = animal({-1, 0}, ell + 2.0, norm, Point{1, 0});
        CHECK(max_mass_animal_inf(r, q2).value == doctest::Approx(brute_force_animal_oracle(r, q2)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("brackets") {
  const Norm l2 = Norm::l2(2);
  const auto empty = bracket_animal(realization({}), animal({0, 0}, 2.0, l2));
  CHECK(empty.lower == 0.0);
  CHECK(empty.upper == 0.0);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = random_instance(200 + s, 10, 1.5);
    auto q = animal({0, 0}, 2.0, l2);
    const auto exact = bracket_animal(r, q);
    CHECK(exact.exact);
    CHECK(exact.lower == exact.upper);
    CHECK(exact.lower == doctest::Approx(max_mass_animal_inf(r, q).value).epsilon(1e-12));
    for (double qq : {0.5, 1.0, 3.0}) {
      q.q = qq;
      const auto b = bracket_animal(r, q);
      CHECK(b.lower <= b.upper + 1e-12);
      CHECK(b.lower >= 0.0);
    }
  }
}
