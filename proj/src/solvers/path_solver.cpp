#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "greedy/solvers.hpp"
#include "solver_common.hpp"

namespace greedy {

PathQuery PathQuery::from_origin(double ell, Norm norm) {
  PathQuery q;
  q.mode = Mode::from_origin;
  q.ell = ell;
  q.norm = norm;
  q.x = Point(static_cast<std::size_t>(norm.dim()), 0.0);
  return q;
}

PathQuery PathQuery::two_point(Point x, Point y, double ell, Norm norm, Restriction restriction,
                               double delta) {
  PathQuery q;
  q.mode = Mode::two_point;
  q.x = std::move(x);
  q.y = std::move(y);
  q.ell = ell;
  q.norm = norm;
  q.restriction = restriction;
  q.delta = delta;
  return q;
}

namespace {

constexpr std::size_t kMaxPathCandidates = 128;
constexpr std::size_t kMemoCap = 1u << 21;
using Mask = std::bitset<kMaxPathCandidates>;

struct MemoKey {
  Mask mask;
  std::size_t cur;
  bool operator==(const MemoKey&) const = default;
};

struct MemoHash {
  std::size_t operator()(const MemoKey& k) const {
    return std::hash<Mask>()(k.mask) * 0x9e3779b97f4a7c15ULL ^ k.cur;
  }
};

struct Item {
  double mass;
  double cost;
};

// Fractional knapsack: an upper bound on the mass packable within `capacity`.
double fractional_knapsack(std::vector<Item>& items, double capacity) {
  if (capacity < 0.0) return 0.0;
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.mass * b.cost > b.mass * a.cost;
  });
  double total = 0.0;
  for (const auto& it : items) {
    if (it.cost <= capacity) {
      total += it.mass;
      capacity -= it.cost;
    } else {
      total += it.mass * (capacity / it.cost);
      break;
    }
  }
  return total;
}

class PathSearch {
 public:
  PathSearch(std::vector<double> masses, std::vector<std::vector<double>> dist, bool two_point,
             double budget, std::uint64_t node_budget)
      : mass_(std::move(masses)),
        d_(std::move(dist)),
        m_(mass_.size()),
        start_(m_),
        end_(m_ + 1),
        two_point_(two_point),
        budget_(budget),
        node_budget_(node_budget) {
    integral_ = std::all_of(mass_.begin(), mass_.end(), [](double v) { return v == std::floor(v); });
  }

  void run(double base_mass) {
    best_ = base_mass;
    Mask mask;
    dfs(start_, 0.0, base_mass, mask);
  }

  double best() const { return best_; }
  const std::vector<std::size_t>& best_sequence() const { return best_seq_; }
  std::uint64_t nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }

 private:
  double tail_leg(std::size_t j) const { return two_point_ ? d_[j][end_] : 0.0; }

  void dfs(std::size_t cur, double used, double mass, Mask& mask) {
    if (aborted_) return;
    if (++nodes_ > node_budget_) {
      aborted_ = true;
      return;
    }
    if (cur != start_) {
      MemoKey key{mask, cur};
      auto it = memo_.find(key);
      if (it != memo_.end()) {
        if (it->second <= used) return;
        it->second = used;
      } else if (memo_.size() < kMemoCap) {
        memo_.emplace(key, used);
      }
    }
    if (mass > best_) {
      best_ = mass;
      best_seq_ = seq_;
    }

    const double rem = budget_ - used;
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < m_; ++j) {
      if (!mask[j] && d_[cur][j] + tail_leg(j) <= rem) open.push_back(j);
    }
    if (open.empty()) return;
    if (mass + bound(cur, rem, open) <= best_) return;

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(open.size());
    for (std::size_t j : open) order.emplace_back(-mass_[j] / (d_[cur][j] + 1e-9), j);
    std::sort(order.begin(), order.end());
    for (const auto& [key, j] : order) {
      mask.set(j);
      seq_.push_back(j);
      dfs(j, used + d_[cur][j], mass + mass_[j], mask);
      seq_.pop_back();
      mask.reset(j);
      if (aborted_) return;
    }
  }

  double bound(std::size_t cur, double rem, const std::vector<std::size_t>& open) const {
    std::vector<Item> in_edge, degree;
    in_edge.reserve(open.size());
    degree.reserve(open.size());
    double min_to_end = std::numeric_limits<double>::infinity();
    double min_from_cur = std::numeric_limits<double>::infinity();
    double max_second = 0.0;
    for (std::size_t j : open) {
      // Nearest possible predecessor, nearest possible successor, and the two nearest
      // distinct neighbours of j.
      double pred = d_[cur][j];
      double succ = two_point_ ? d_[j][end_] : std::numeric_limits<double>::infinity();
      double a = d_[cur][j], b = std::numeric_limits<double>::infinity();
      auto push = [&](double v) {
        if (v < a) {
          b = a;
          a = v;
        } else if (v < b) {
          b = v;
        }
      };
      for (std::size_t k : open) {
        if (k == j) continue;
        pred = std::min(pred, d_[k][j]);
        succ = std::min(succ, d_[k][j]);
        push(d_[k][j]);
      }
      if (two_point_) {
        push(d_[j][end_]);
        min_to_end = std::min(min_to_end, d_[j][end_]);
      }
      min_from_cur = std::min(min_from_cur, d_[cur][j]);
      if (!std::isfinite(b)) b = a;
      in_edge.push_back({mass_[j], pred});
      double c = 0.5 * (a + b);
      if (two_point_) c = std::max(c, 0.5 * (pred + succ));
      degree.push_back({mass_[j], c});
      max_second = std::max(max_second, b);
    }
    // Every edge of the remaining path is counted by its endpoints among the new vertices;
    // the first and last edges have only one such endpoint.
    const double cap_in = two_point_ ? rem - min_to_end : rem;
    const double cap_deg =
        two_point_ ? rem - 0.5 * (min_from_cur + min_to_end) : rem + 0.5 * max_second - 0.5 * min_from_cur;
    double ub = std::min(fractional_knapsack(in_edge, cap_in), fractional_knapsack(degree, cap_deg));
    // Integral masses can only add up to integers.
    if (integral_) ub = std::floor(ub + 1e-9);
    return ub;
  }

  std::vector<double> mass_;
  std::vector<std::vector<double>> d_;
  std::size_t m_;
  std::size_t start_;
  std::size_t end_;
  bool two_point_;
  bool integral_ = false;
  double budget_;
  std::uint64_t node_budget_;

  double best_ = 0.0;
  std::vector<std::size_t> seq_;
  std::vector<std::size_t> best_seq_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::unordered_map<MemoKey, double, MemoHash> memo_;
};

}  // namespace

SolveResult max_mass_path(const MarkedRealization& r, const PathQuery& q, const SolveOptions& opts) {
  if (!(q.ell > 0.0)) throw InvalidInput("path length budget must be positive");
  const Norm& norm = q.norm;
  const bool two_point = q.mode == PathQuery::Mode::two_point;
  const Point x = q.x.empty() ? Point(static_cast<std::size_t>(r.dim), 0.0) : q.x;
  const Point y = two_point ? q.y : x;
  if (static_cast<int>(x.size()) != r.dim || static_cast<int>(y.size()) != r.dim) {
    throw InvalidInput("anchor dimension does not match the realization");
  }
  if (q.restriction != Restriction::none && x == y) {
    throw PreconditionError("restricted queries need distinct anchors");
  }

  if (opts.check_window) {
    if (two_point) {
      detail::require_window(r, scale(add(x, y), 0.5), 0.5 * q.ell, norm);
    } else {
      detail::require_window(r, x, q.ell, norm);
    }
  }

  SolveResult res;
  if (two_point && norm.distance(x, y) > q.ell + kGeomTol) {
    res.infeasible = true;
    return res;
  }

  const double budget = q.ell + kGeomTol;
  double base = 0.0;
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < r.atoms.size(); ++i) {
    const Atom& a = r.atoms[i];
    if (a.loc == x || (two_point && a.loc == y)) {
      base += a.mass;
      continue;
    }
    if (!(a.mass > 0.0)) continue;
    if (!detail::passes_restriction(q.restriction, q.delta, x, y, a.loc)) continue;
    const double reach = norm.distance(x, a.loc) + (two_point ? norm.distance(a.loc, y) : 0.0);
    if (reach <= budget) cand.push_back(i);
  }
  if (cand.size() > kMaxPathCandidates) {
    throw InvalidInput("path query has more reachable atoms than the solver supports");
  }

  const std::size_t m = cand.size();
  std::vector<double> masses(m);
  std::vector<const Point*> locs(m + 2);
  for (std::size_t j = 0; j < m; ++j) {
    masses[j] = r.atoms[cand[j]].mass;
    locs[j] = &r.atoms[cand[j]].loc;
  }
  locs[m] = &x;
  locs[m + 1] = &y;
  std::vector<std::vector<double>> dist(m + 2, std::vector<double>(m + 2, 0.0));
  for (std::size_t a = 0; a < m + 2; ++a) {
    for (std::size_t b = a + 1; b < m + 2; ++b) {
      dist[a][b] = dist[b][a] = norm.distance(*locs[a], *locs[b]);
    }
  }

  PathSearch search(masses, std::move(dist), two_point, budget, opts.node_budget);
  search.run(base);

  res.value = search.best();
  res.nodes_explored = search.nodes();
  res.proven_optimal = !search.aborted();
  GeomPath cert;
  cert.vertices.push_back(x);
  for (std::size_t j : search.best_sequence()) cert.vertices.push_back(*locs[j]);
  if (two_point) cert.vertices.push_back(y);
  res.path = std::move(cert);
  return res;
}

}  // namespace greedy
