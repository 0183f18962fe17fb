#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "greedy/pointproc.hpp"

namespace greedy {

/// Translation-invariant kernel on the discrete torus (Z / cells Z)^dim scaled to side^dim.
/// `table` holds K(0, v) for every displacement v, last coordinate fastest.
struct DppKernelSpec {
  double side = 1.0;
  int cells = 1;
  int dim = 2;
  std::vector<double> table;
  MarkDistribution marks;

  std::size_t site_count() const;

  /// Kernel whose eigenvalue on Fourier mode k is spectrum(k); spectrum must be even in k.
  static DppKernelSpec from_spectrum(double side, int cells, int dim,
                                     const std::function<double(const std::vector<int>&)>& spectrum,
                                     MarkDistribution marks);
  /// Projection kernel onto the modes with max |k_i| <= radius, of rank (2 radius + 1)^dim.
  static DppKernelSpec projection(double side, int cells, int dim, int radius,
                                  MarkDistribution marks);
};

/// Spectral (HKPV) sampler; the eigendecomposition is computed once at construction.
class DppGridSampler {
 public:
  explicit DppGridSampler(DppKernelSpec spec);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  Eigen::MatrixXd kernel_matrix() const;
  /// Cell-centre location of site i.
  Point site_location(std::size_t i) const;

  /// Selected site indices, before marking.
  std::vector<std::size_t> sample_sites(Engine& rng) const;
  MarkedRealization sample(std::uint64_t seed) const;

 private:
  DppKernelSpec spec_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

MarkedRealization sample_dpp_grid(const DppKernelSpec& spec, std::uint64_t seed);

}  // namespace greedy
