#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "greedy/solvers.hpp"
#include "solver_common.hpp"

namespace greedy {

namespace {

// Dense view of a lattice realization's box; missing sites carry mass 0.
class LatticeGrid {
 public:
  explicit LatticeGrid(const MarkedRealization& r) : dim_(r.dim) {
    if (!r.lattice) throw InvalidInput("lattice solver needs a lattice realization");
    const Window& w = r.window;
    if (w.shape != Window::Shape::box) throw InvalidInput("lattice realization needs a box window");
    for (int i = 0; i < dim_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      lo_.push_back(static_cast<int>(std::ceil(w.center[ui] - w.half_widths[ui] - kGeomTol)));
      hi_.push_back(static_cast<int>(std::floor(w.center[ui] + w.half_widths[ui] + kGeomTol)));
      if (hi_.back() < lo_.back()) throw InvalidInput("lattice window holds no site");
    }
    std::size_t n = 1;
    for (int i = 0; i < dim_; ++i) n *= static_cast<std::size_t>(side(i));
    mass_.assign(n, 0.0);
    for (const auto& a : r.atoms) {
      Site s(a.loc.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = static_cast<int>(std::lround(a.loc[i]));
        if (std::abs(a.loc[i] - s[i]) > kGeomTol) throw InvalidInput("lattice atom off the lattice");
      }
      if (!inside(s)) throw InvalidInput("lattice atom outside its window");
      mass_[index(s)] += a.mass;
    }
    neighbours_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      Site s = site(v);
      for (int i = 0; i < dim_; ++i) {
        for (int step : {-1, 1}) {
          s[static_cast<std::size_t>(i)] += step;
          if (inside(s)) neighbours_[v].push_back(index(s));
          s[static_cast<std::size_t>(i)] -= step;
        }
      }
    }
  }

  std::size_t size() const { return mass_.size(); }
  double mass(std::size_t v) const { return mass_[v]; }
  const std::vector<std::size_t>& neighbours(std::size_t v) const { return neighbours_[v]; }
  int side(int i) const { return hi_[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)] + 1; }

  bool inside(const Site& s) const {
    if (static_cast<int>(s.size()) != dim_) return false;
    for (int i = 0; i < dim_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (s[ui] < lo_[ui] || s[ui] > hi_[ui]) return false;
    }
    return true;
  }

  std::size_t index(const Site& s) const {
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      k = k * static_cast<std::size_t>(side(i)) + static_cast<std::size_t>(s[ui] - lo_[ui]);
    }
    return k;
  }

  Site site(std::size_t k) const {
    Site s(static_cast<std::size_t>(dim_));
    for (int i = dim_ - 1; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto w = static_cast<std::size_t>(side(i));
      s[ui] = lo_[ui] + static_cast<int>(k % w);
      k /= w;
    }
    return s;
  }

  int l1(std::size_t a, std::size_t b) const {
    const Site sa = site(a), sb = site(b);
    int d = 0;
    for (std::size_t i = 0; i < sa.size(); ++i) d += std::abs(sa[i] - sb[i]);
    return d;
  }

  std::size_t anchor_index(const Site& s) const {
    if (!inside(s)) throw InvalidInput("anchor outside the lattice window");
    return index(s);
  }

  Point location(std::size_t v) const {
    const Site s = site(v);
    return Point(s.begin(), s.end());
  }

 private:
  int dim_;
  std::vector<int> lo_, hi_;
  std::vector<double> mass_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

Animal lattice_certificate(const LatticeGrid& g, const std::vector<std::size_t>& sites) {
  Animal a;
  std::vector<long> local(g.size(), -1);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    local[sites[i]] = static_cast<long>(i);
    a.vertices.push_back(g.location(sites[i]));
  }
  // Breadth-first spanning tree of the site set.
  std::vector<bool> reached(sites.size(), false);
  std::deque<std::size_t> queue{0};
  reached[0] = true;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t w : g.neighbours(sites[i])) {
      const long j = local[w];
      if (j >= 0 && !reached[static_cast<std::size_t>(j)]) {
        reached[static_cast<std::size_t>(j)] = true;
        a.edges.emplace_back(i, static_cast<std::size_t>(j));
        queue.push_back(static_cast<std::size_t>(j));
      }
    }
  }
  return a;
}

// Redelmeier enumeration of connected sets containing the root, with a top-k mass bound.
class AnimalEnumerator {
 public:
  AnimalEnumerator(const LatticeGrid& g, int n, std::size_t root, long target,
                   std::uint64_t node_budget)
      : g_(g), n_(n), root_(root), target_(target), node_budget_(node_budget) {
    by_mass_.resize(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) by_mass_[v] = v;
    std::stable_sort(by_mass_.begin(), by_mass_.end(),
                     [&](std::size_t a, std::size_t b) { return g.mass(a) > g.mass(b); });
    seen_.assign(g.size(), false);
    in_untried_.assign(g.size(), false);
    in_set_.assign(g.size(), false);
  }

  void run() {
    seen_[root_] = true;
    in_untried_[root_] = true;
    std::vector<std::size_t> untried{root_};
    grow(untried, 0.0, target_ < 0 ? 0 : g_.l1(root_, static_cast<std::size_t>(target_)));
  }

  double best() const { return best_; }
  bool found() const { return found_; }
  const std::vector<std::size_t>& best_set() const { return best_set_; }
  std::uint64_t nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }

 private:
  double top_k(int k) const {
    double s = 0.0;
    for (std::size_t v : by_mass_) {
      if (k == 0) break;
      if (in_set_[v] || (seen_[v] && !in_untried_[v])) continue;
      s += g_.mass(v);
      --k;
    }
    return s;
  }

  void grow(std::vector<std::size_t> untried, double mass, int target_gap) {
    // Sites popped here stay untried for the caller's remaining siblings.
    struct Restore {
      std::vector<bool>& flags;
      std::vector<std::size_t> sites;
      ~Restore() {
        for (std::size_t v : sites) flags[v] = true;
      }
    } restore{in_untried_, untried};
    while (!untried.empty()) {
      if (aborted_) return;
      const int room = n_ - static_cast<int>(set_.size());
      if (target_ >= 0 && !in_set_[static_cast<std::size_t>(target_)] && target_gap > room) return;
      if (found_ && mass + top_k(room) <= best_) return;

      const std::size_t v = untried.back();
      untried.pop_back();
      in_untried_[v] = false;
      if (++nodes_ > node_budget_) {
        aborted_ = true;
        return;
      }

      set_.push_back(v);
      in_set_[v] = true;
      const double with = mass + g_.mass(v);
      const bool has_target = target_ < 0 || in_set_[static_cast<std::size_t>(target_)];
      if (has_target && (!found_ || with > best_)) {
        found_ = true;
        best_ = with;
        best_set_ = set_;
      }
      if (static_cast<int>(set_.size()) < n_) {
        std::vector<std::size_t> fresh;
        for (std::size_t w : g_.neighbours(v)) {
          if (!seen_[w]) {
            seen_[w] = true;
            in_untried_[w] = true;
            fresh.push_back(w);
          }
        }
        std::vector<std::size_t> next = untried;
        next.insert(next.end(), fresh.begin(), fresh.end());
        const int gap = target_ < 0 ? 0
                                    : std::min(target_gap, g_.l1(v, static_cast<std::size_t>(target_)));
        grow(std::move(next), with, gap);
        for (std::size_t w : fresh) {
          seen_[w] = false;
          in_untried_[w] = false;
        }
      }
      in_set_[v] = false;
      set_.pop_back();
    }
  }

  const LatticeGrid& g_;
  int n_;
  std::size_t root_;
  long target_;
  std::uint64_t node_budget_;
  std::vector<std::size_t> by_mass_;
  std::vector<bool> seen_, in_untried_, in_set_;
  std::vector<std::size_t> set_, best_set_;
  double best_ = 0.0;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

class WalkSearch {
 public:
  WalkSearch(const LatticeGrid& g, int n, bool self_avoiding, std::size_t start,
             std::uint64_t node_budget)
      : g_(g), n_(n), sa_(self_avoiding), start_(start), node_budget_(node_budget) {
    visits_.assign(g.size(), 0);
    by_mass_.resize(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) by_mass_[v] = v;
    std::stable_sort(by_mass_.begin(), by_mass_.end(),
                     [&](std::size_t a, std::size_t b) { return g.mass(a) > g.mass(b); });
  }

  void run() {
    visits_[start_] = 1;
    walk_.push_back(start_);
    step(start_, n_, g_.mass(start_));
  }

  double best() const { return best_; }
  bool found() const { return found_; }
  const std::vector<std::size_t>& best_walk() const { return best_walk_; }
  std::uint64_t nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }

 private:
  // Each remaining step adds at most one new site within reach.
  double bound(std::size_t cur, int left) const {
    double s = 0.0;
    int k = left;
    for (std::size_t v : by_mass_) {
      if (k == 0 || g_.mass(v) <= 0.0) break;
      if (visits_[v] > 0 || g_.l1(cur, v) > left) continue;
      s += g_.mass(v);
      --k;
    }
    return s;
  }

  void step(std::size_t cur, int left, double mass) {
    if (aborted_) return;
    if (++nodes_ > node_budget_) {
      aborted_ = true;
      return;
    }
    if (left == 0) {
      if (!found_ || mass > best_) {
        found_ = true;
        best_ = mass;
        best_walk_ = walk_;
      }
      return;
    }
    if (found_ && mass + bound(cur, left) <= best_) return;
    for (std::size_t w : g_.neighbours(cur)) {
      if (sa_ && visits_[w] > 0) continue;
      const double gain = visits_[w] == 0 ? g_.mass(w) : 0.0;
      ++visits_[w];
      walk_.push_back(w);
      step(w, left - 1, mass + gain);
      walk_.pop_back();
      --visits_[w];
      if (aborted_) return;
    }
  }

  const LatticeGrid& g_;
  int n_;
  bool sa_;
  std::size_t start_;
  std::uint64_t node_budget_;
  std::vector<int> visits_;
  std::vector<std::size_t> by_mass_;
  std::vector<std::size_t> walk_, best_walk_;
  double best_ = 0.0;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

SolveResult lattice_max_animal(const MarkedRealization& r, int n, const std::vector<Site>& anchors,
                               const SolveOptions& opts) {
  const LatticeGrid g(r);
  if (n < 1) throw InvalidInput("lattice animal cardinality must be at least 1");
  if (static_cast<std::size_t>(n) > g.size()) {
    throw InvalidInput("lattice animal cardinality exceeds the window capacity");
  }
  if (anchors.empty() || anchors.size() > 2) throw InvalidInput("need one or two anchors");
  const std::size_t root = g.anchor_index(anchors[0]);
  long target = -1;
  if (anchors.size() == 2) {
    const std::size_t t = g.anchor_index(anchors[1]);
    if (t != root) target = static_cast<long>(t);
  }
  AnimalEnumerator e(g, n, root, target, opts.node_budget);
  e.run();
  SolveResult res;
  res.nodes_explored = e.nodes();
  res.proven_optimal = !e.aborted();
  if (!e.found()) {
    res.infeasible = true;
    return res;
  }
  res.value = e.best();
  res.animal = lattice_certificate(g, e.best_set());
  return res;
}

SolveResult lattice_max_path(const MarkedRealization& r, int n, bool self_avoiding,
                             const Site& anchor, const SolveOptions& opts) {
  const LatticeGrid g(r);
  if (n < 0) throw InvalidInput("lattice path length must be nonnegative");
  if (self_avoiding && static_cast<std::size_t>(n) >= g.size()) {
    throw InvalidInput("self-avoiding path length exceeds the window capacity");
  }
  WalkSearch w(g, n, self_avoiding, g.anchor_index(anchor), opts.node_budget);
  w.run();
  SolveResult res;
  res.nodes_explored = w.nodes();
  res.proven_optimal = !w.aborted();
  if (!w.found()) {
    res.infeasible = true;
    return res;
  }
  res.value = w.best();
  GeomPath p;
  for (std::size_t v : w.best_walk()) p.vertices.push_back(g.location(v));
  res.path = std::move(p);
  return res;
}

ReductionCheck lattice_reduction_check(const MarkedRealization& r, const Site& x, const Site& y,
                                       int n) {
  if (n < 0) throw InvalidInput("reduction check needs n >= 0");
  const SolveResult lat = lattice_max_animal(r, n + 1, {x, y});
  AnimalQuery q;
  q.x = Point(x.begin(), x.end());
  q.y = Point(y.begin(), y.end());
  q.ell = static_cast<double>(n);
  q.norm = Norm::l1(r.dim);
  SolveOptions opts;
  opts.check_window = false;
  const SolveResult cont = max_mass_animal_inf(r, q, opts);
  return {lat.value == cont.value, lat.value, cont.value};
}

double brute_force_lattice_animal(const MarkedRealization& r, int n,
                                  const std::vector<Site>& anchors) {
  const LatticeGrid g(r);
  if (g.size() > 64) throw OracleRefusal("lattice animal oracle is capped at 64 sites");
  if (n < 1 || static_cast<std::size_t>(n) > g.size()) throw InvalidInput("bad cardinality");
  std::uint64_t need = 0;
  for (const auto& a : anchors) need |= std::uint64_t{1} << g.anchor_index(a);
  const std::size_t root = g.anchor_index(anchors.at(0));

  std::set<std::uint64_t> level{std::uint64_t{1} << root};
  double best = 0.0;
  bool found = false;
  for (int size = 1; size <= n; ++size) {
    for (std::uint64_t s : level) {
      if ((s & need) != need) continue;
      double m = 0.0;
      for (std::size_t v = 0; v < g.size(); ++v) {
        if (s >> v & 1U) m += g.mass(v);
      }
      if (!found || m > best) {
        best = m;
        found = true;
      }
    }
    if (size == n) break;
    std::set<std::uint64_t> next;
    for (std::uint64_t s : level) {
      for (std::size_t v = 0; v < g.size(); ++v) {
        if (!(s >> v & 1U)) continue;
        for (std::size_t w : g.neighbours(v)) {
          if (!(s >> w & 1U)) next.insert(s | std::uint64_t{1} << w);
        }
      }
    }
    level = std::move(next);
  }
  return found ? best : 0.0;
}

double brute_force_lattice_path(const MarkedRealization& r, int n, bool self_avoiding,
                                const Site& anchor) {
  const LatticeGrid g(r);
  if (n > 12) throw OracleRefusal("lattice path oracle is capped at 12 steps");
  std::vector<std::size_t> walk{g.anchor_index(anchor)};
  double best = 0.0;
  bool found = false;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(walk.size()) == n + 1) {
      std::set<std::size_t> sites(walk.begin(), walk.end());
      double m = 0.0;
      for (std::size_t v : sites) m += g.mass(v);
      if (!found || m > best) best = m;
      found = true;
      return;
    }
    for (std::size_t w : g.neighbours(walk.back())) {
      if (self_avoiding && std::find(walk.begin(), walk.end(), w) != walk.end()) continue;
      walk.push_back(w);
      self(self);
      walk.pop_back();
    }
  };
  rec(rec);
  return best;
}

}  // namespace greedy
