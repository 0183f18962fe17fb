#include "greedy/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace greedy {

std::size_t DppKernelSpec::site_count() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(cells);
  return n;
}

namespace {

std::vector<int> unravel(std::size_t index, int cells, int dim) {
  std::vector<int> v(static_cast<std::size_t>(dim));
  for (int i = dim - 1; i >= 0; --i) {
    v[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(cells));
    index /= static_cast<std::size_t>(cells);
  }
  return v;
}

std::size_t ravel(const std::vector<int>& v, int cells) {
  std::size_t index = 0;
  for (int c : v) index = index * static_cast<std::size_t>(cells) + static_cast<std::size_t>(c);
  return index;
}

int signed_mode(int k, int cells) { return 2 * k > cells ? k - cells : k; }

}  // namespace

DppKernelSpec DppKernelSpec::from_spectrum(
    double side, int cells, int dim, const std::function<double(const std::vector<int>&)>& spectrum,
    MarkDistribution marks) {
  if (cells < 1 || dim < 1 || !(side > 0.0)) throw InvalidInput("malformed torus grid");
  DppKernelSpec spec;
  spec.side = side;
  spec.cells = cells;
  spec.dim = dim;
  spec.marks = std::move(marks);
  const std::size_t n = spec.site_count();
  std::vector<std::pair<std::vector<int>, double>> modes;
  for (std::size_t m = 0; m < n; ++m) {
    auto k = unravel(m, cells, dim);
    for (auto& c : k) c = signed_mode(c, cells);
    const double lam = spectrum(k);
    if (lam != 0.0) modes.emplace_back(std::move(k), lam);
  }
  spec.table.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto v = unravel(s, cells, dim);
    double acc = 0.0;
    for (const auto& [k, lam] : modes) {
      double phase = 0.0;
      for (int i = 0; i < dim; ++i) phase += k[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      acc += lam * std::cos(2.0 * std::numbers::pi * phase / cells);
    }
    spec.table[s] = acc / static_cast<double>(n);
  }
  return spec;
}

DppKernelSpec DppKernelSpec::projection(double side, int cells, int dim, int radius,
                                        MarkDistribution marks) {
  if (2 * radius + 1 > cells) throw InvalidInput("projection radius exceeds the grid");
  return from_spectrum(
      side, cells, dim,
      [radius](const std::vector<int>& k) {
        for (int c : k) {
          if (std::abs(c) > radius) return 0.0;
        }
        return 1.0;
      },
      std::move(marks));
}

DppGridSampler::DppGridSampler(DppKernelSpec spec) : spec_(std::move(spec)) {
  const std::size_t n = spec_.site_count();
  if (spec_.table.size() != n) throw InvalidInput("kernel table size does not match the grid");
  const Eigen::MatrixXd k = kernel_matrix();
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInput("kernel matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
  if (solver.info() != Eigen::Success) throw InvalidInput("kernel eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    const double lam = eigenvalues_[i];
    if (lam < -1e-9 || lam > 1.0 + 1e-9) {
      throw InvalidInput("kernel spectrum must lie in [0, 1]");
    }
    eigenvalues_[i] = std::clamp(lam, 0.0, 1.0);
  }
}

Eigen::MatrixXd DppGridSampler::kernel_matrix() const {
  const std::size_t n = spec_.site_count();
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    const auto va = unravel(a, spec_.cells, spec_.dim);
    for (std::size_t b = 0; b < n; ++b) {
      auto vb = unravel(b, spec_.cells, spec_.dim);
      for (std::size_t i = 0; i < vb.size(); ++i) {
        vb[i] = ((vb[i] - va[i]) % spec_.cells + spec_.cells) % spec_.cells;
      }
      k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = spec_.table[ravel(vb, spec_.cells)];
    }
  }
  return k;
}

Point DppGridSampler::site_location(std::size_t i) const {
  const auto v = unravel(i, spec_.cells, spec_.dim);
  const double h = spec_.side / spec_.cells;
  Point p(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) p[j] = (v[j] + 0.5) * h;
  return p;
}

std::vector<std::size_t> DppGridSampler::sample_sites(Engine& rng) const {
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (uniform01(rng) < eigenvalues_[i]) chosen.push_back(i);
  }
  const Eigen::Index n = eigenvectors_.rows();
  Eigen::MatrixXd v(n, static_cast<Eigen::Index>(chosen.size()));
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    v.col(static_cast<Eigen::Index>(j)) = eigenvectors_.col(chosen[j]);
  }

  std::vector<std::size_t> sites;
  while (v.cols() > 0) {
    const Eigen::VectorXd weight = v.rowwise().squaredNorm();
    const double total = weight.sum();
    double u = uniform01(rng) * total;
    Eigen::Index s = 0;
    for (; s < n - 1; ++s) {
      if (u < weight[s]) break;
      u -= weight[s];
    }
    sites.push_back(static_cast<std::size_t>(s));

    // Remove the component along e_s, then re-orthonormalise.
    Eigen::Index pivot = 0;
    v.row(s).cwiseAbs().maxCoeff(&pivot);
    const Eigen::VectorXd pc = v.col(pivot) / v(s, pivot);
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      if (c != pivot) v.col(c) -= pc * v(s, c);
    }
    if (pivot != v.cols() - 1) v.col(pivot) = v.col(v.cols() - 1);
    v.conservativeResize(Eigen::NoChange, v.cols() - 1);
    if (v.cols() > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
      v = qr.householderQ() * Eigen::MatrixXd::Identity(n, v.cols());
    }
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

MarkedRealization DppGridSampler::sample(std::uint64_t seed) const {
  Engine rng = make_engine(seed);
  const auto sites = sample_sites(rng);
  std::vector<Point> points;
  points.reserve(sites.size());
  for (std::size_t s : sites) points.push_back(site_location(s));
  const Point lo(static_cast<std::size_t>(spec_.dim), 0.0);
  const Point hi(static_cast<std::size_t>(spec_.dim), spec_.side);
  return iid_marking(points, Window::box_from_corners(lo, hi), spec_.marks, splitmix64(seed ^ 0x5bd1e995ULL));
}

MarkedRealization sample_dpp_grid(const DppKernelSpec& spec, std::uint64_t seed) {
  return DppGridSampler(spec).sample(seed);
}

}  // namespace greedy
