#include <algorithm>
#include <cmath>
#include <numeric>

#include "greedy/solvers.hpp"
#include "solver_common.hpp"

namespace greedy {

namespace {

struct Item {
  double mass;
  double cost;
};

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

// Every vertex set is generated once, in the order Prim's algorithm would add it after its
// vertex nearest to x. Index m is x, m + 1 is y.
class AnimalSearch {
 public:
  AnimalSearch(std::vector<double> masses, std::vector<std::vector<double>> dist, bool two_anchor,
               double budget, std::uint64_t node_budget)
      : mass_(std::move(masses)),
        d_(std::move(dist)),
        m_(mass_.size()),
        two_(two_anchor),
        budget_(budget),
        node_budget_(node_budget) {
    integral_ = std::all_of(mass_.begin(), mass_.end(), [](double v) { return v == std::floor(v); });
  }

  void run() {
    best_ = 0.0;
    std::vector<std::size_t> roots(m_);
    std::iota(roots.begin(), roots.end(), std::size_t{0});
    std::stable_sort(roots.begin(), roots.end(),
                     [&](std::size_t a, std::size_t b) { return d_[a][m_] < d_[b][m_]; });
    // Roots closer to x than the chosen one are excluded from its subtree.
    std::vector<char> allowed(m_, 1);
    for (std::size_t v : roots) {
      allowed[v] = 0;
      const double used = d_[v][m_];
      if (used > budget_) continue;
      std::vector<double> key(m_, std::numeric_limits<double>::infinity());
      for (std::size_t u = 0; u < m_; ++u) {
        if (allowed[u]) key[u] = d_[v][u];
      }
      in_.assign(1, v);
      grow(allowed, key, used, mass_[v], two_ ? d_[v][m_ + 1] : 0.0);
      if (aborted_) return;
    }
  }

  double best() const { return best_; }
  const std::vector<std::size_t>& best_set() const { return best_set_; }
  std::uint64_t nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }

 private:
  // used: x leg plus the spanning tree of in_; y_leg: distance from y to in_.
  void grow(const std::vector<char>& allowed, const std::vector<double>& key, double used,
            double mass, double y_leg) {
    if (aborted_) return;
    if (++nodes_ > node_budget_) {
      aborted_ = true;
      return;
    }
    if (used + y_leg <= budget_ && mass > best_) {
      best_ = mass;
      best_set_ = in_;
    }

    // Keys only shrink as the set grows, so every allowed vertex may still join.
    std::vector<std::size_t> live, open;
    double y_lb = y_leg;
    for (std::size_t u = 0; u < m_; ++u) {
      if (!allowed[u]) continue;
      live.push_back(u);
      if (used + key[u] <= budget_) open.push_back(u);
      if (two_) y_lb = std::min(y_lb, d_[u][m_ + 1]);
    }
    if (open.empty()) return;

    // Each added vertex costs at least its distance to the nearest other possible vertex.
    std::vector<Item> items;
    items.reserve(live.size());
    for (std::size_t u : live) {
      double c = key[u];
      for (std::size_t w : live) {
        if (w != u) c = std::min(c, d_[u][w]);
      }
      items.push_back({mass_[u], c});
    }
    double ub = fractional_knapsack(items, budget_ - used - (two_ ? y_lb : 0.0));
    if (integral_) ub = std::floor(ub + 1e-9);
    if (mass + ub <= best_) return;

    std::vector<std::size_t> order = open;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mass_[a] * (key[b] + 1e-9) > mass_[b] * (key[a] + 1e-9);
    });
    std::vector<char> next_allowed(m_);
    std::vector<double> next_key(m_);
    for (std::size_t w : order) {
      const double kw = key[w];
      // Vertices that Prim would have taken before w cannot join later.
      for (std::size_t u = 0; u < m_; ++u) {
        next_allowed[u] = allowed[u] && u != w && (key[u] > kw || (key[u] == kw && u > w));
        next_key[u] = next_allowed[u] ? std::min(key[u], d_[w][u]) : key[u];
      }
      in_.push_back(w);
      grow(next_allowed, next_key, used + kw, mass + mass_[w],
           two_ ? std::min(y_leg, d_[w][m_ + 1]) : 0.0);
      in_.pop_back();
      if (aborted_) return;
    }
  }

  std::vector<double> mass_;
  std::vector<std::vector<double>> d_;
  std::size_t m_;
  bool two_;
  bool integral_ = false;
  double budget_;
  std::uint64_t node_budget_;

  double best_ = 0.0;
  std::vector<std::size_t> in_;
  std::vector<std::size_t> best_set_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

SolveResult max_mass_animal_inf(const MarkedRealization& r, const AnimalQuery& q,
                                const SolveOptions& opts) {
  if (!(q.ell >= 0.0)) throw InvalidInput("animal length budget must be nonnegative");
  if (!std::isinf(q.q)) {
    throw UnsupportedError("finite penalisation is only available through bracket_animal");
  }
  const Norm& norm = q.norm;
  const bool two = q.y.has_value();
  const Point x = q.x.empty() ? Point(static_cast<std::size_t>(r.dim), 0.0) : q.x;
  const Point y = two ? *q.y : x;
  if (static_cast<int>(x.size()) != r.dim || static_cast<int>(y.size()) != r.dim) {
    throw InvalidInput("anchor dimension does not match the realization");
  }
  if (q.restriction != Restriction::none && x == y) {
    throw PreconditionError("restricted queries need distinct anchors");
  }
  const double dxy = norm.distance(x, y);
  if (opts.check_window) {
    if (two) {
      detail::require_window(r, scale(add(x, y), 0.5), std::max(q.ell - 0.5 * dxy, 0.0), norm);
    } else {
      detail::require_window(r, x, q.ell, norm);
    }
  }

  const double budget = q.ell + kGeomTol;
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < r.atoms.size(); ++i) {
    const Atom& a = r.atoms[i];
    if (!detail::passes_restriction(q.restriction, q.delta, x, y, a.loc)) continue;
    // A tree through x, a and y is at least half the perimeter of their triangle.
    const double reach = two ? 0.5 * (norm.distance(x, a.loc) + norm.distance(a.loc, y) + dxy)
                             : norm.distance(x, a.loc);
    if (reach <= budget) cand.push_back(i);
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

  AnimalSearch search(masses, std::move(dist), two, budget, opts.node_budget);
  search.run();

  SolveResult res;
  res.value = search.best();
  res.nodes_explored = search.nodes();
  res.proven_optimal = !search.aborted();
  if (!search.best_set().empty()) {
    Animal a;
    for (std::size_t j : search.best_set()) a.vertices.push_back(*locs[j]);
    a.edges = mst_edges(a.vertices, norm);
    res.animal = std::move(a);
  }
  return res;
}

Bracket bracket_animal(const MarkedRealization& r, const AnimalQuery& q, const SolveOptions& opts) {
  if (!(q.q >= 0.0)) throw InvalidInput("penalisation must be nonnegative");
  AnimalQuery exact = q;
  exact.q = std::numeric_limits<double>::infinity();
  const SolveResult inf = max_mass_animal_inf(r, exact, opts);
  if (std::isinf(q.q)) return {inf.value, inf.value, true, inf.proven_optimal};

  PathQuery pq;
  if (q.y) {
    pq = PathQuery::two_point(q.x, *q.y, q.ell, q.norm, q.restriction, q.delta);
  } else {
    pq = PathQuery::from_origin(q.ell, q.norm);
    if (!q.x.empty()) pq.x = q.x;
  }
  const SolveResult p = max_mass_path(r, pq, opts);
  pq.ell = 2.0 * q.ell;
  SolveOptions wide = opts;
  wide.check_window = false;
  const SolveResult p2 = max_mass_path(r, pq, wide);
  return {std::max(p.value, inf.value), p2.value, false,
          inf.proven_optimal && p.proven_optimal && p2.proven_optimal};
}

}  // namespace greedy
