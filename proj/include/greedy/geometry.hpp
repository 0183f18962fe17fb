#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace greedy {

using Point = std::vector<double>;

/// Raised on malformed geometric input (empty paths, disconnected animals, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation's precondition on its arguments is violated.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Absolute tolerance used by every geometric comparison.
inline constexpr double kGeomTol = 1e-9;

/// A p-norm on R^d, p in [1, inf].
class Norm {
 public:
  Norm(double p, int dim);

  static Norm l1(int dim) { return Norm(1.0, dim); }
  static Norm l2(int dim) { return Norm(2.0, dim); }
  static Norm linf(int dim) { return Norm(std::numeric_limits<double>::infinity(), dim); }

  double p() const { return p_; }
  int dim() const { return dim_; }
  bool is_inf() const { return p_ == std::numeric_limits<double>::infinity(); }

  double operator()(std::span<const double> v) const;
  double distance(std::span<const double> a, std::span<const double> b) const;

  /// Smallest C1 with ||.||_2 / C1 <= ||.|| <= C1 ||.||_2 on R^d.
  double equivalence_constant() const;

  /// Constant of the cone projection bound: ||y - p(y)|| <= C2 sqrt(delta) ||y - x||.
  double cone_projection_constant() const;

 private:
  double p_;
  int dim_;
};

double dot(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> v);
Point sub(std::span<const double> a, std::span<const double> b);
Point add(std::span<const double> a, std::span<const double> b);
Point scale(std::span<const double> a, double s);

struct GeomPath {
  std::vector<Point> vertices;
};

struct Animal {
  std::vector<Point> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

double path_length(const GeomPath& path, const Norm& norm);

/// Sum of edge lengths. Throws InvalidInput unless the animal is a valid connected graph.
double animal_length(const Animal& animal, const Norm& norm);

bool is_connected(const Animal& animal);

/// Path viewed as an animal: one edge per consecutive pair of vertices.
Animal path_as_animal(const GeomPath& path);

GeomPath concat_paths(const GeomPath& first, const GeomPath& second);

/// Union of vertex sets (exact coordinate equality) and of edge sets.
Animal concat_animals(const Animal& first, const Animal& second);

/// Walk along a depth-first traversal from vertex 0, children in index order.
/// Visits every vertex; the trailing walk back to the root is dropped.
GeomPath dfs_cover_path(const Animal& animal);

struct ConeSpec {
  double delta;
  Point apex;
  Point direction;
};

struct DiamondSpec {
  double delta;
  Point x;
  Point y;
};

using AntidiamondSpec = DiamondSpec;

bool in_cone(const ConeSpec& cone, std::span<const double> z);
bool in_diamond(const DiamondSpec& diamond, std::span<const double> z);
bool in_antidiamond(const AntidiamondSpec& anti, std::span<const double> z);

/// Orthogonal (Euclidean) projection of y onto the line x + R v.
Point orth_project_onto_line(std::span<const double> x, std::span<const double> v,
                             std::span<const double> y);

double mst_length(const std::vector<Point>& points, const Norm& norm);

/// Edges of a minimum spanning tree (Prim, O(n^2)).
std::vector<std::pair<std::size_t, std::size_t>> mst_edges(const std::vector<Point>& points,
                                                           const Norm& norm);

/// Splits the stub-extended path (x - delta*ell*e, x, ..., y, y + delta*ell*e) into the
/// fewest delta^2*ell-cylinder paths around the axis R e. Consecutive pieces share their
/// junction vertex, so concatenating them gives back the extended path.
///
/// A piece is a cylinder path when both endpoints lie in the strip
/// {z : ||z - p(z)|| <= delta^2 ell} and realise the minimum and maximum of <z, e> over the
/// piece's vertices inside that strip. Requires 0 < delta < 1/4 and both endpoints of the
/// input on the axis.
std::vector<GeomPath> cylinder_decompose(const GeomPath& path, double delta, double ell,
                                         std::span<const double> axis, const Norm& norm);

/// True when `piece` is an h-cylinder path around R e.
bool is_cylinder_path(const GeomPath& piece, double h, std::span<const double> axis,
                      const Norm& norm);

}  // namespace greedy
