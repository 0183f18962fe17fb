#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "greedy/dpp.hpp"
#include "greedy/solvers.hpp"

namespace greedy {

constexpr double kZ95 = 1.96;
constexpr std::size_t kReplicaFloor = 50;

struct Summary {
  double mean = 0.0;
  double std_dev = 0.0;
  double ci_half_width = 0.0;
  std::size_t replicas = 0;
};

/// Sample mean with a normal-approximation interval z * sd / sqrt(n). Needs n >= 2.
Summary summarize(const std::vector<double>& xs, double z = kZ95);

/// Frequency of `hits` among n trials with its normal-approximation half-width.
Summary summarize_frequency(std::size_t hits, std::size_t n, double z = kZ95);

/// Random environment sampled around each query.
struct ProcessSpec {
  enum class Kind { poisson, lattice_iid, lattice_columnar, dpp_grid, single_atom, empty };

  Kind kind = Kind::poisson;
  int dim = 2;
  double lambda = 1.0;
  MarkDistribution marks = MarkDistribution::constant_mass(1.0);
  // dpp_grid: projection kernel on a torus of the given side split into cells per axis.
  double dpp_side = 8.0;
  int dpp_cells = 16;
  int dpp_radius = 2;
};

/// Realization covering the norm ball of radius `reach` around `center`. Lattice kinds cover
/// the sites within l-infinity distance ceil(reach) of the rounded centre.
MarkedRealization sample_process(const ProcessSpec& p, const Point& center, double reach,
                                 std::uint64_t seed);

struct GridPoint {
  double parameter = 0.0;
  double mean = 0.0;
  double ci_half_width = 0.0;
  std::size_t replicas = 0;
  std::size_t unproven = 0;  // solves that hit the node budget
};

struct EstimateReport {
  std::string label;
  std::vector<GridPoint> grid;
  std::uint64_t master_seed = 0;
  /// Replica j at grid index i uses stream_seed(master_seed, (i << 32) | j).
  std::string stream_scheme = "grid_index << 32 | replica";
  std::size_t unproven_total = 0;
  std::optional<double> fekete_estimate;
};

std::uint64_t replica_seed(std::uint64_t master, std::size_t grid_index, std::size_t replica);

enum class SolverMode { path, animal_inf, lattice_animal, lattice_path, lattice_sa_path };

struct RunOptions {
  int jobs = 1;
  SolveOptions solve;
};

/// Mean and interval of value(l) / l over replicas for every l of an increasing grid; lattice
/// modes read l as the cardinality or step count.
EstimateReport estimate_lln_curve(const ProcessSpec& process, SolverMode mode, const Norm& norm,
                                  const std::vector<double>& ell_grid, std::size_t replicas,
                                  std::uint64_t seed, const RunOptions& run = {});

struct DirectionalQuery {
  Point direction;
  std::vector<double> beta_grid;
  double delta = 0.3;
  std::vector<double> ell_grid;
  double a = -0.5;
  double b = 0.5;
  /// Which family is maximised: animals (exact q = inf mode) or paths.
  bool animals = true;
  Norm norm = Norm::l2(2);
};

/// Estimates at one length: unrestricted, diamond and antidiamond, each over the beta grid.
/// Restricted estimates are undefined at beta = 0 and are left out there.
struct DirectionalLevel {
  double ell = 0.0;
  EstimateReport unrestricted;
  EstimateReport diamond;
  EstimateReport antidiamond;
};

struct DirectionalReport {
  std::vector<DirectionalLevel> levels;
  /// Estimate of g(beta e) used by the shape checks: the unrestricted curve at the largest l.
  EstimateReport g_hat;
};

/// Value of G(l a beta e, l b beta e, (b - a) l) / ((b - a) l); every replica solves all three
/// restrictions on one realization.
DirectionalReport estimate_directional_limit(const DirectionalQuery& q, const ProcessSpec& process,
                                             std::size_t replicas, std::uint64_t seed,
                                             const RunOptions& run = {});

struct TimeSample {
  double t;
  double mean;
  double ci_half_width = 0.0;
};

struct FeketeResult {
  double estimate;
  bool superadditive_compatible;
  std::vector<std::string> violations;
};

/// max over samples of mean / t, with a check of mean(t1 + t2) >= mean(t1) + mean(t2) within
/// the summed intervals wherever the grid allows it.
FeketeResult fekete_time_constant(const std::vector<TimeSample>& samples);

struct CheckItem {
  std::string label;
  double margin;  // >= 0 passes
  bool pass;
};

struct Diagnostic {
  std::string name;
  bool pass = true;
  bool structural = false;  // exact assertions; statistical ones carry interval slack
  bool unproven = false;    // some solve hit its node budget
  double worst_margin = 0.0;
  std::vector<CheckItem> items;
  nlohmann::json details = nlohmann::json::object();

  void add(std::string label, double margin);
  /// Like add, but keeps the item only when it fails (at most kMaxKeptItems of them).
  void tally(const std::string& label, double margin);
  std::size_t checked = 0;
  std::size_t failed = 0;
};

constexpr std::size_t kMaxKeptItems = 20;

/// Midpoint tests g(b1) + g(b2) <= 2 g((b1 + b2) / 2) + summed half-widths over all grid pairs
/// whose midpoint is on the grid.
Diagnostic check_concavity(const EstimateReport& r);
/// |g(b) - g(-b)| <= summed half-widths for every b with -b on the grid.
Diagnostic check_symmetry(const EstimateReport& r);
/// g nonincreasing on the nonnegative part of the grid, up to summed half-widths.
Diagnostic check_monotonicity(const EstimateReport& r);

/// Frequency of sup over 1 <= l <= ell_max of P(l) / l >= alpha for Poisson unit masses under
/// the l1 norm, against 2^(d+1) e lambda alpha^-d.
Diagnostic tail_bound_check(double lambda, int dim, const std::vector<double>& alpha_grid,
                            double ell_max, std::size_t replicas, std::uint64_t seed,
                            const RunOptions& run = {});

enum class MomentMode { factorization, upper_bound };

/// Second factorial moment of each pair against C^2 times the product of the first moments.
/// factorization: |M2 - C^2 m1 m2| <= 3 sigma; upper_bound: M2 <= C^2 m1 m2 + 3 sigma.
Diagnostic moment_property_check(const std::vector<MarkedRealization>& batch,
                                 const std::vector<std::pair<Window, Window>>& box_pairs, double C,
                                 MomentMode mode);

/// Poisson atoms each doubled by a nearby copy.
MarkedRealization sample_doubled_poisson(double lambda, const Window& w, double jitter,
                                         std::uint64_t seed);

/// Certified constant of the strip sweep: length <= few_tsp_constant(d) n^((d-1)/d) L in l1,
/// hence in every p-norm.
double few_tsp_constant(int d);

struct SweepPath {
  GeomPath path;
  double length;
  double ratio;  // length / (n^((d-1)/d) L)
};

/// Strip sweep from the origin through every point of [0, L]^d.
SweepPath few_tsp_path(const std::vector<Point>& points, double L, int d,
                       const Norm& norm = Norm::l1(2));

/// Family of superadditive processes X(s, t), s < t.
struct SuperadditiveSpec {
  enum class Kind { additive, max_of_sums, diamond_restricted };

  Kind kind = Kind::additive;
  double c = 1.0;  // additive rate
  // max_of_sums: X(s, t) = (sum over integer i in [s, t) of max(xi_i, eta_i) - h)^+.
  double rate = 1.0;
  double h = 0.5;
  // diamond_restricted: X(s, t) = G(s u, t u, t - s) over the diamond of width delta.
  Point u;
  double delta = 0.3;
  bool animals = false;
  ProcessSpec process;
  Norm norm = Norm::l2(2);
};

/// Exact time constant when it is known in closed form.
std::optional<double> known_time_constant(const SuperadditiveSpec& spec);

/// Values X(s_i, s_j) for all pairs of an increasing list of times on one realization.
class SuperadditiveSampler {
 public:
  SuperadditiveSampler(const SuperadditiveSpec& spec, std::uint64_t seed, double lo, double hi,
                       const SolveOptions& solve = {});
  double value(double s, double t);
  bool proven() const { return proven_; }

 private:
  SuperadditiveSpec spec_;
  SolveOptions solve_;
  MarkedRealization r_;
  std::vector<double> marks_;  // max(xi_i, eta_i) for i = lo .. hi - 1
  long first_ = 0;
  bool proven_ = true;
};

class SuperadditivityViolation : public std::runtime_error {
 public:
  SuperadditivityViolation(const std::string& what, nlohmann::json triple)
      : std::runtime_error(what), triple_(std::move(triple)) {}
  const nlohmann::json& triple() const { return triple_; }

 private:
  nlohmann::json triple_;
};

/// Samples `count` triples s1 < s2 < s3 in [0, span] and checks X(s1, s3) >= X(s1, s2) + X(s2, s3)
/// exactly; throws SuperadditivityViolation with the triple on the first failure.
Diagnostic superadditivity_check(const SuperadditiveSpec& spec, std::size_t count, double span,
                                 std::uint64_t seed, const RunOptions& run = {});

/// Frequency of sup over 1 <= n <= n_max of X(-n, n) / 2n > alpha against 3 TC / alpha, with TC the
/// closed form when known and the Fekete estimate from the same runs otherwise.
Diagnostic maximal_inequality_check(const SuperadditiveSpec& spec, const std::vector<double>& alpha_grid,
                                    int n_max, std::size_t replicas, std::uint64_t seed,
                                    std::size_t precheck_triples = 200, const RunOptions& run = {});

struct DivergenceSpec {
  enum class Kind { columnar, poisson_pareto };

  Kind kind = Kind::columnar;
  MarkDistribution marks = MarkDistribution::exponential(0.5);
  double lambda = 1.0;  // poisson_pareto intensity in d = 2
  std::vector<int> windows{64, 128, 256};
  std::vector<double> thresholds{2.0, 4.0, 8.0};
  /// "divergence" or "plateau"; when set, the diagnostic passes iff the classification matches.
  std::string expect;
};

/// Lower bounds for P(W) / W on growing windows W. Columnar: along row 0 to a column, then up
/// that column. Poisson: the heaviest single atom within distance W. Divergence-consistent when
/// the largest window beats every threshold and the trend rises beyond the intervals.
Diagnostic divergence_probe(const DivergenceSpec& spec, std::size_t replicas, std::uint64_t seed,
                            const RunOptions& run = {});

struct SuiteSpec {
  enum class Kind { poisson, lattice };

  Kind kind = Kind::poisson;
  ProcessSpec process;
  double half_width = 1.5;     // poisson instances live in [-half_width, half_width]^d
  std::size_t max_atoms = 12;  // poisson instances are resampled until they fit the oracles
  std::vector<double> ell_grid{0.5, 1.0, 1.5, 2.0};
  int lattice_side = 5;
  std::vector<int> lattice_animal_n{2, 3, 4, 5, 6, 7};
  std::vector<int> lattice_path_n{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> reduction_n{1, 2, 3, 4, 5, 6};

  bool sandwich = true;
  bool restriction = true;
  bool certificates = true;
  bool layers = true;
  bool path_oracle = false;
  bool animal_oracle = false;
  bool lattice_oracle = false;
  bool reduction = false;
};

/// Per instance: sandwich chain, layer identity, restriction monotonicity, oracle agreement and
/// (lattice) the reduction equality. Failing instances are attached to the details.
Diagnostic sandwich_and_identity_suite(const SuiteSpec& spec, std::size_t instance_count,
                                       std::uint64_t seed, const RunOptions& run = {});

/// Relative error of the layer reconstruction on random vertex sets.
Diagnostic layer_identity_check(const ProcessSpec& process, std::size_t sets, std::uint64_t seed,
                                const RunOptions& run = {});

}  // namespace greedy
