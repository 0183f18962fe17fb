#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "greedy/geometry.hpp"
#include "greedy/pointproc.hpp"

namespace greedy {

enum class Restriction { none, diamond, antidiamond };

struct PathQuery {
  enum class Mode { from_origin, two_point };

  Mode mode = Mode::from_origin;
  Point x;  // start; the origin when empty
  Point y;  // two_point only
  double ell = 0.0;
  Restriction restriction = Restriction::none;
  double delta = 0.5;
  Norm norm = Norm::l2(2);

  static PathQuery from_origin(double ell, Norm norm);
  static PathQuery two_point(Point x, Point y, double ell, Norm norm,
                             Restriction restriction = Restriction::none, double delta = 0.5);
};

/// Animal query. q = inf is the exact mode (vertices restricted to atoms); finite q is only
/// supported through bracket_animal.
struct AnimalQuery {
  Point x;
  std::optional<Point> y;
  double ell = 0.0;
  double q = std::numeric_limits<double>::infinity();
  Restriction restriction = Restriction::none;
  double delta = 0.5;
  Norm norm = Norm::l2(2);
};

struct SolveOptions {
  std::uint64_t node_budget = 20'000'000;
  /// Refuse queries whose reachable region leaves the realization window.
  bool check_window = true;
};

struct SolveResult {
  double value = 0.0;
  std::optional<GeomPath> path;
  std::optional<Animal> animal;
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = true;
  bool infeasible = false;
};

class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SolveResult max_mass_path(const MarkedRealization& r, const PathQuery& q,
                          const SolveOptions& opts = {});

SolveResult max_mass_animal_inf(const MarkedRealization& r, const AnimalQuery& q,
                                const SolveOptions& opts = {});

struct Bracket {
  double lower;
  double upper;
  bool exact;
  bool proven_optimal;
};

/// lower <= A^(q)(l) <= upper. For one anchor the path bounds start at x; for two anchors
/// they run from x to y.
Bracket bracket_animal(const MarkedRealization& r, const AnimalQuery& q,
                       const SolveOptions& opts = {});

using Site = std::vector<int>;

/// Heaviest connected set of at most n sites of the realization's lattice box containing all
/// anchors (one or two). Sites are nearest-neighbour adjacent.
SolveResult lattice_max_animal(const MarkedRealization& r, int n, const std::vector<Site>& anchors,
                               const SolveOptions& opts = {});

/// Heaviest vertex set of an n-step nearest-neighbour walk from the anchor inside the box.
SolveResult lattice_max_path(const MarkedRealization& r, int n, bool self_avoiding,
                             const Site& anchor, const SolveOptions& opts = {});

struct ReductionCheck {
  bool equal;
  double lattice_value;
  double continuum_value;
};

/// Compares the lattice animal value with n + 1 sites against the l1 animal value at length n.
ReductionCheck lattice_reduction_check(const MarkedRealization& r, const Site& x, const Site& y,
                                       int n);

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration of ordered atom subsets; at most 8 atoms.
double brute_force_path_oracle(const MarkedRealization& r, const PathQuery& q);
/// Exhaustive enumeration of atom subsets with Kruskal spanning trees; at most 12 atoms.
double brute_force_animal_oracle(const MarkedRealization& r, const AnimalQuery& q);
/// All connected site sets grown by breadth-first closure; boxes of at most 64 sites.
double brute_force_lattice_animal(const MarkedRealization& r, int n, const std::vector<Site>& anchors);
/// Every walk of n steps, with no pruning.
double brute_force_lattice_path(const MarkedRealization& r, int n, bool self_avoiding,
                                const Site& anchor);

}  // namespace greedy
