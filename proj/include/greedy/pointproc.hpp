#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "greedy/geometry.hpp"
#include "greedy/rng.hpp"

namespace greedy {

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite simulation domain: an axis-aligned box or a p-norm ball.
struct Window {
  enum class Shape { box, ball };

  Shape shape = Shape::box;
  Point center;
  Point half_widths;  // box only
  double radius = 0.0;  // ball only
  double ball_p = 2.0;  // ball only

  static Window box(Point center, Point half_widths);
  static Window box_from_corners(const Point& lo, const Point& hi);
  static Window ball(Point center, double radius, double p);

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  bool contains(std::span<const double> z) const;
  /// True when the closed `norm`-ball of radius r around c lies inside the window.
  bool contains_ball(std::span<const double> c, double r, const Norm& norm) const;
  Window translated(std::span<const double> z) const;
};

/// Mark distribution nu on [0, inf).
struct MarkDistribution {
  enum class Kind { constant, bernoulli, exponential, pareto, discrete };

  Kind kind = Kind::constant;
  double c = 1.0;
  double p = 1.0;
  double scale = 1.0;
  double rate = 1.0;
  double alpha = 2.0;
  double xmin = 1.0;
  std::vector<double> values;
  std::vector<double> probs;

  static MarkDistribution constant_mass(double c);
  static MarkDistribution bernoulli(double p, double scale = 1.0);
  static MarkDistribution exponential(double rate);
  static MarkDistribution pareto(double alpha, double xmin);
  static MarkDistribution discrete(std::vector<double> values, std::vector<double> probs);

  double sample(Engine& rng) const;
  double mean() const;
};

/// nu([t, inf)).
double tail_function(const MarkDistribution& nu, double t);

struct GreedyIntegral {
  double value;
  bool finite;
};

/// Integral of nu([t, inf))^(1/d) over (0, inf), in closed form.
GreedyIntegral greedy_integral(const MarkDistribution& nu, int d);

/// Same integral by adaptive quadrature (relative error 1e-6); +inf is reported as not finite.
GreedyIntegral greedy_integral_numeric(const MarkDistribution& nu, int d);

struct Atom {
  Point loc;
  double mass;
};

/// Finite list of marked atoms inside a window.
/// Lattice realizations keep one atom per site, zero masses included.
struct MarkedRealization {
  int dim = 2;
  Window window;
  bool lattice = false;
  std::vector<Atom> atoms;
};

struct LatticeBox {
  std::vector<int> lo;  // inclusive
  std::vector<int> hi;  // inclusive

  int dim() const { return static_cast<int>(lo.size()); }
  std::size_t site_count() const;
};

MarkedRealization sample_poisson_marked(double lambda, const MarkDistribution& nu, const Window& w,
                                        std::uint64_t seed);
MarkedRealization sample_lattice_iid(const MarkDistribution& nu, const LatticeBox& box,
                                     std::uint64_t seed);
/// d = 2 only: X(v1, v2) = X(v1, 0) with i.i.d. column values.
MarkedRealization sample_lattice_columnar(const MarkDistribution& nu, const LatticeBox& box,
                                         std::uint64_t seed);

MarkedRealization shift_realization(const MarkedRealization& r, std::span<const double> z);
MarkedRealization uniform_shift(const MarkedRealization& r, std::uint64_t seed);

/// Attaches i.i.d. nu marks to distinct points. Zero marks are dropped.
MarkedRealization iid_marking(const std::vector<Point>& points, const Window& w,
                              const MarkDistribution& nu, std::uint64_t seed);

/// Atoms with mass >= t, each given mass 1.
MarkedRealization truncate(const MarkedRealization& r, double t);

double mass_of_set(const MarkedRealization& r, const std::function<bool(std::span<const double>)>& region);
/// Mass of the set of vertices; repeated vertices count once.
double mass_of_vertex_set(const MarkedRealization& r, const std::vector<Point>& vertices);

/// Mass recomputed from truncation layers: sum over distinct mass levels t_i of
/// (t_i - t_{i-1}) times the mass of the vertex set in truncate(r, t_i).
double layer_mass(const MarkedRealization& r, const std::vector<Point>& vertices);

struct MomentEstimate {
  double mean;
  double std_error;
  std::size_t replicas;
};

/// Monte Carlo estimate of the k-th factorial moment measure of boxes[0] x ... x boxes[k-1].
MomentEstimate estimate_factorial_moment(const std::vector<MarkedRealization>& batch,
                                         const std::vector<Window>& boxes, int k);

/// Location lookup for exact vertex matching.
class AtomIndex {
 public:
  explicit AtomIndex(const MarkedRealization& r);
  /// Index of the atom at z, or -1.
  long find(std::span<const double> z) const;

 private:
  std::map<Point, long> index_;
};

}  // namespace greedy
