#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "greedy/dpp.hpp"

using namespace greedy;

TEST_CASE("identity kernel selects every cell") {
  const auto spec = DppKernelSpec::from_spectrum(4.0, 4, 2, [](const std::vector<int>&) { return 1.0; },
                                                 MarkDistribution::constant_mass(1.0));
  const DppGridSampler s(spec);
  const Eigen::MatrixXd K = s.kernel_matrix();
  CHECK((K - Eigen::MatrixXd::Identity(K.rows(), K.cols())).cwiseAbs().maxCoeff() < 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Engine rng = make_engine(seed);
    CHECK(s.sample_sites(rng).size() == spec.site_count());
    CHECK(s.sample(seed).atoms.size() == 16);
  }
}

TEST_CASE("projection kernel has fixed cardinality") {
  for (int radius : {0, 1, 2}) {
    const auto spec = DppKernelSpec::projection(8.0, 12, 2, radius, MarkDistribution::constant_mass(1.0));
    const DppGridSampler s(spec);
    const std::size_t m = static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1));
    std::size_t ones = 0;
    for (int i = 0; i < s.eigenvalues().size(); ++i) {
      CHECK(s.eigenvalues()[i] >= -1e-9);
      CHECK(s.eigenvalues()[i] <= 1.0 + 1e-9);
      if (s.eigenvalues()[i] > 0.5) ++ones;
    }
    CHECK(ones == m);
    const Eigen::MatrixXd K = s.kernel_matrix();
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((K * K - K).cwiseAbs().maxCoeff() < 1e-9);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Engine rng = make_engine(seed);
      const auto sites = s.sample_sites(rng);
      CHECK(sites.size() == m);
      std::vector<std::size_t> sorted = sites;
      std::sort(sorted.begin(), sorted.end());
      CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
  }
}

TEST_CASE("disjoint boxes are negatively correlated") {
  const auto spec = DppKernelSpec::projection(8.0, 16, 2, 2, MarkDistribution::constant_mass(1.0));
  const Window b1 = Window::box_from_corners({0, 0}, {2, 2});
  const Window b2 = Window::box_from_corners({2, 0}, {4, 2});
  const DppGridSampler s(spec);
  const int n = 4000;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    const auto r = s.sample(stream_seed(13, static_cast<std::uint64_t>(i)));
    for (const auto& a : r.atoms) {
      if (b1.contains(a.loc)) x[i] += 1.0;
      if (b2.contains(a.loc)) y[i] += 1.0;
    }
  }
  double mx = 0, my = 0, mxy = 0;
  for (int i = 0; i < n; ++i) mx += x[i], my += y[i], mxy += x[i] * y[i];
  mx /= n, my /= n, mxy /= n;
  double v = 0;
  for (int i = 0; i < n; ++i) v += std::pow(x[i] * y[i] - mxy, 2);
  const double se = std::sqrt(v / (n - 1) / n);
  // 25 points on 256 cells of area 0.25: each 2x2 box has 16 cells, mean 25 * 16 / 256
  CHECK(mx == doctest::Approx(25.0 * 16 / 256).epsilon(0.05));
  CHECK(mxy <= mx * my + 3.0 * se);
  CHECK(mxy < mx * my);
}
