#include <cmath>

#include "doctest.h"
#include "greedy/solvers.hpp"

using namespace greedy;

namespace {

MarkedRealization constant_box(int side, double c) {
  return sample_lattice_iid(MarkDistribution::constant_mass(c), {{0, 0}, {side - 1, side - 1}}, 1);
}

double mass_at(const MarkedRealization& r, const Site& s) {
  for (const auto& a : r.atoms) {
    if (a.loc[0] == s[0] && a.loc[1] == s[1]) return a.mass;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("lattice animals: trivial sizes") {
  const auto r = sample_lattice_iid(MarkDistribution::exponential(1.0), {{0, 0}, {4, 4}}, 5);
  for (const Site& s : {Site{0, 0}, Site{2, 3}, Site{4, 4}}) {
    CHECK(lattice_max_animal(r, 1, {s}).value == mass_at(r, s));
  }
  const auto c = constant_box(5, 1.75);
  for (int n = 1; n <= 10; ++n) CHECK(lattice_max_animal(c, n, {{2, 2}}).value == doctest::Approx(1.75 * n));
  CHECK(lattice_max_animal(c, 25, {{2, 2}}).value == doctest::Approx(1.75 * 25));
  CHECK_THROWS(lattice_max_animal(c, 26, {{2, 2}}));
}

TEST_CASE("lattice animals agree with the connected-set oracle") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = sample_lattice_iid(MarkDistribution::discrete({0, 1, 2, 5}, {0.4, 0.3, 0.2, 0.1}), {{0, 0}, {4, 4}}, s);
    for (int n = 1; n <= 7; ++n) {
      CHECK(lattice_max_animal(r, n, {{2, 2}}).value == brute_force_lattice_animal(r, n, {{2, 2}}));
      CHECK(lattice_max_animal(r, n, {{0, 0}, {2, 1}}).value == brute_force_lattice_animal(r, n, {{0, 0}, {2, 1}}));
    }
  }
}

TEST_CASE("lattice paths") {
  const auto r = sample_lattice_iid(MarkDistribution::exponential(1.0), {{-3, -3}, {3, 3}}, 8);
  CHECK(lattice_max_path(r, 0, false, {0, 0}).value == mass_at(r, {0, 0}));
  CHECK(lattice_max_path(r, 0, true, {0, 0}).value == mass_at(r, {0, 0}));

  // corridor of heavy sites along the first axis
  auto corridor = constant_box(7, 1.0);
  for (auto& a : corridor.atoms) {
    if (a.loc[1] == 3.0) a.mass = 10.0;
  }
  for (bool sa : {false, true}) {
    CHECK(lattice_max_path(corridor, 6, sa, {0, 3}).value == 70.0);
    CHECK(lattice_max_path(corridor, 4, sa, {0, 3}).value == 50.0);
    // one step onto the corridor first
    CHECK(lattice_max_path(corridor, 4, sa, {0, 2}).value == 1.0 + 40.0);
  }

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto q = sample_lattice_iid(MarkDistribution::bernoulli(0.4, 2.0), {{-4, -4}, {4, 4}}, 100 + s);
    for (int n = 0; n <= 8; ++n) {
      for (bool sa : {false, true}) {
        CHECK(lattice_max_path(q, n, sa, {0, 0}).value == brute_force_lattice_path(q, n, sa, {0, 0}));
      }
    }
  }
}

TEST_CASE("lattice reduction equality") {
  const auto unit = constant_box(4, 1.0);
  for (int n = 0; n <= 6; ++n) {
    for (const auto& [x, y] : std::vector<std::pair<Site, Site>>{{{0, 0}, {0, 0}}, {{0, 0}, {1, 2}}, {{3, 0}, {0, 3}}, {{1, 1}, {2, 1}}}) {
      const auto c = lattice_reduction_check(unit, x, y, n);
      CHECK(c.equal);
      CHECK(c.lattice_value == c.continuum_value);
    }
  }
  const auto zero = lattice_reduction_check(sample_lattice_iid(MarkDistribution::exponential(1.0), {{0, 0}, {3, 3}}, 4), {1, 1}, {1, 1}, 0);
  CHECK(zero.equal);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = sample_lattice_iid(MarkDistribution::bernoulli(0.5), {{0, 0}, {3, 3}}, 300 + s);
    for (int n = 1; n <= 5; ++n) CHECK(lattice_reduction_check(r, {0, 0}, {2, 1}, n).equal);
  }
}
