#include "greedy/pointproc.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <set>

namespace greedy {

Window Window::box(Point center, Point half_widths) {
  if (center.size() != half_widths.size() || center.empty()) {
    throw InvalidInput("box center and half-widths must have the same positive dimension");
  }
  for (double h : half_widths) {
    if (!(h > 0.0)) throw InvalidInput("box half-widths must be positive");
  }
  Window w;
  w.shape = Shape::box;
  w.center = std::move(center);
  w.half_widths = std::move(half_widths);
  return w;
}

Window Window::box_from_corners(const Point& lo, const Point& hi) {
  Point c(lo.size()), h(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    c[i] = 0.5 * (lo[i] + hi[i]);
    h[i] = 0.5 * (hi[i] - lo[i]);
  }
  return box(std::move(c), std::move(h));
}

Window Window::ball(Point center, double radius, double p) {
  if (center.empty()) throw InvalidInput("ball center must have positive dimension");
  if (!(radius > 0.0)) throw InvalidInput("ball radius must be positive");
  if (!(p >= 1.0)) throw InvalidInput("ball norm exponent must be >= 1");
  Window w;
  w.shape = Shape::ball;
  w.center = std::move(center);
  w.radius = radius;
  w.ball_p = p;
  return w;
}

double Window::volume() const {
  const int d = dim();
  if (shape == Shape::box) {
    double v = 1.0;
    for (double h : half_widths) v *= 2.0 * h;
    return v;
  }
  if (std::isinf(ball_p)) return std::pow(2.0 * radius, d);
  const double unit = std::pow(2.0 * std::tgamma(1.0 + 1.0 / ball_p), d) /
                      std::tgamma(1.0 + d / ball_p);
  return unit * std::pow(radius, d);
}

bool Window::contains(std::span<const double> z) const {
  if (shape == Shape::box) {
    for (std::size_t i = 0; i < center.size(); ++i) {
      if (std::abs(z[i] - center[i]) > half_widths[i]) return false;
    }
    return true;
  }
  return Norm(ball_p, dim()).distance(z, center) <= radius;
}

bool Window::contains_ball(std::span<const double> c, double r, const Norm& norm) const {
  if (shape == Shape::box) {
    // Every p-norm unit ball reaches exactly 1 along each axis.
    for (std::size_t i = 0; i < center.size(); ++i) {
      if (std::abs(c[i] - center[i]) + r > half_widths[i] + kGeomTol) return false;
    }
    return true;
  }
  const Norm own(ball_p, dim());
  if (own.p() == norm.p()) return own.distance(c, center) + r <= radius + kGeomTol;
  // The query ball sits in the cube of half-width r around c.
  const Point ones(center.size(), 1.0);
  return own.distance(c, center) + r * own(ones) <= radius + kGeomTol;
}

Window Window::translated(std::span<const double> z) const {
  Window w = *this;
  w.center = add(center, z);
  return w;
}

MarkDistribution MarkDistribution::constant_mass(double c) {
  if (!(c > 0.0)) throw InvalidInput("constant mark must be positive");
  MarkDistribution m;
  m.kind = Kind::constant;
  m.c = c;
  return m;
}

MarkDistribution MarkDistribution::bernoulli(double p, double scale) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("bernoulli p must lie in [0, 1]");
  if (!(scale > 0.0)) throw InvalidInput("bernoulli scale must be positive");
  MarkDistribution m;
  m.kind = Kind::bernoulli;
  m.p = p;
  m.scale = scale;
  return m;
}

MarkDistribution MarkDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidInput("exponential rate must be positive");
  MarkDistribution m;
  m.kind = Kind::exponential;
  m.rate = rate;
  return m;
}

MarkDistribution MarkDistribution::pareto(double alpha, double xmin) {
  if (!(alpha > 0.0) || !(xmin > 0.0)) throw InvalidInput("pareto parameters must be positive");
  MarkDistribution m;
  m.kind = Kind::pareto;
  m.alpha = alpha;
  m.xmin = xmin;
  return m;
}

MarkDistribution MarkDistribution::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw InvalidInput("discrete marks need matching non-empty values and probabilities");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !(probs[i] >= 0.0)) {
      throw InvalidInput("discrete values and probabilities must be nonnegative");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("discrete probabilities must sum to 1");
  MarkDistribution m;
  m.kind = Kind::discrete;
  // Sorted by value so tails and integrals can sweep once.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  for (std::size_t i : order) {
    m.values.push_back(values[i]);
    m.probs.push_back(probs[i]);
  }
  return m;
}

double MarkDistribution::sample(Engine& rng) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::bernoulli:
      return uniform01(rng) < p ? scale : 0.0;
    case Kind::exponential:
      return std::exponential_distribution<double>(rate)(rng);
    case Kind::pareto: {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      return xmin * std::pow(u, -1.0 / alpha);
    }
    case Kind::discrete: {
      double u = uniform01(rng);
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (u < probs[i]) return values[i];
        u -= probs[i];
      }
      return values.back();
    }
  }
  return 0.0;
}

double MarkDistribution::mean() const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::bernoulli:
      return p * scale;
    case Kind::exponential:
      return 1.0 / rate;
    case Kind::pareto:
      return alpha > 1.0 ? alpha * xmin / (alpha - 1.0) : std::numeric_limits<double>::infinity();
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * probs[i];
      return s;
    }
  }
  return 0.0;
}

double tail_function(const MarkDistribution& nu, double t) {
  if (t < 0.0) throw InvalidInput("tail_function needs t >= 0");
  using K = MarkDistribution::Kind;
  switch (nu.kind) {
    case K::constant:
      return t <= nu.c ? 1.0 : 0.0;
    case K::bernoulli:
      if (t == 0.0) return 1.0;
      return t <= nu.scale ? nu.p : 0.0;
    case K::exponential:
      return std::exp(-nu.rate * t);
    case K::pareto:
      return t <= nu.xmin ? 1.0 : std::pow(nu.xmin / t, nu.alpha);
    case K::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < nu.values.size(); ++i) {
        if (nu.values[i] >= t) s += nu.probs[i];
      }
      return std::min(s, 1.0);
    }
  }
  return 0.0;
}

GreedyIntegral greedy_integral(const MarkDistribution& nu, int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  const double inv_d = 1.0 / d;
  using K = MarkDistribution::Kind;
  switch (nu.kind) {
    case K::constant:
      return {nu.c, true};
    case K::bernoulli:
      return {nu.scale * std::pow(nu.p, inv_d), true};
    case K::exponential:
      return {d / nu.rate, true};
    case K::pareto:
      if (nu.alpha <= d) return {std::numeric_limits<double>::infinity(), false};
      return {nu.xmin * nu.alpha / (nu.alpha - d), true};
    case K::discrete: {
      double total = 0.0, prev = 0.0, tail = 1.0;
      for (std::size_t i = 0; i < nu.values.size(); ++i) {
        total += (nu.values[i] - prev) * std::pow(std::max(tail, 0.0), inv_d);
        prev = nu.values[i];
        tail -= nu.probs[i];
      }
      return {total, true};
    }
  }
  return {0.0, true};
}

GreedyIntegral greedy_integral_numeric(const MarkDistribution& nu, int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  const double inv_d = 1.0 / d;
  auto f = [&](double t) { return std::pow(tail_function(nu, t), inv_d); };
  using K = MarkDistribution::Kind;

  // Breakpoints of the tail; the last one starts the unbounded piece.
  std::vector<double> cuts{0.0};
  switch (nu.kind) {
    case K::constant:
      cuts.push_back(nu.c);
      break;
    case K::bernoulli:
      cuts.push_back(nu.scale);
      break;
    case K::pareto:
      cuts.push_back(nu.xmin);
      break;
    case K::discrete:
      for (double v : nu.values) {
        if (v > cuts.back()) cuts.push_back(v);
      }
      break;
    case K::exponential:
      break;
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double mid = 0.5 * (a + b);
    // The tail is constant on each open piece for the step families.
    if (nu.kind == K::pareto) {
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-10);
    } else {
      total += (b - a) * f(mid);
    }
  }
  if (nu.kind == K::exponential || nu.kind == K::pareto) {
    if (nu.kind == K::pareto && nu.alpha <= d) {
      // The integrand decays like t^(-alpha/d), which is not integrable; quadrature cannot
      // certify a divergent integral, so probe the growth of partial integrals instead.
      auto partial = [&](double upper) {
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts.back(), upper,
                                                                             30, 1e-10);
      };
      const double lo = partial(cuts.back() * 1e4), hi = partial(cuts.back() * 1e8);
      if (hi > 1.5 * lo) return {std::numeric_limits<double>::infinity(), false};
    }
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    try {
      total += integrator.integrate(f, cuts.back(), std::numeric_limits<double>::infinity(), 1e-9,
                                    &err);
    } catch (const std::exception&) {
      return {std::numeric_limits<double>::infinity(), false};
    }
    if (!std::isfinite(total)) return {std::numeric_limits<double>::infinity(), false};
  }
  return {total, true};
}

std::size_t LatticeBox::site_count() const {
  if (lo.size() != hi.size() || lo.empty()) throw InvalidInput("malformed lattice box");
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) throw InvalidInput("lattice box has an empty side");
    n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  }
  return n;
}

namespace {

Window lattice_window(const LatticeBox& box) {
  Point lo(box.lo.size()), hi(box.lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] = box.lo[i] - 0.5;
    hi[i] = box.hi[i] + 0.5;
  }
  return Window::box_from_corners(lo, hi);
}

// Visits every site in lexicographic order, last coordinate fastest.
template <class F>
void for_each_site(const LatticeBox& box, F&& f) {
  const std::size_t n = box.site_count();
  const std::size_t d = box.lo.size();
  std::vector<int> v = box.lo;
  for (std::size_t k = 0; k < n; ++k) {
    f(v);
    for (std::size_t i = d; i-- > 0;) {
      if (++v[i] <= box.hi[i]) break;
      v[i] = box.lo[i];
    }
  }
}

Point uniform_in(const Window& w, Engine& rng) {
  const std::size_t d = w.center.size();
  Point z(d);
  if (w.shape == Window::Shape::box) {
    for (std::size_t i = 0; i < d; ++i) {
      z[i] = w.center[i] + w.half_widths[i] * (2.0 * uniform01(rng) - 1.0);
    }
    return z;
  }
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) z[i] = w.center[i] + w.radius * (2.0 * uniform01(rng) - 1.0);
    if (w.contains(z)) return z;
  }
}

}  // namespace

MarkedRealization sample_poisson_marked(double lambda, const MarkDistribution& nu, const Window& w,
                                        std::uint64_t seed) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("intensity must be finite and nonnegative");
  const double vol = w.volume();
  if (!(vol > 0.0)) throw InvalidInput("window volume must be positive");
  Engine rng = make_engine(seed);
  MarkedRealization r;
  r.dim = w.dim();
  r.window = w;
  if (lambda == 0.0) return r;
  const auto count = std::poisson_distribution<long>(lambda * vol)(rng);
  r.atoms.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Point z = uniform_in(w, rng);
    const double m = nu.sample(rng);
    if (m > 0.0) r.atoms.push_back({std::move(z), m});
  }
  return r;
}

MarkedRealization sample_lattice_iid(const MarkDistribution& nu, const LatticeBox& box,
                                     std::uint64_t seed) {
  Engine rng = make_engine(seed);
  MarkedRealization r;
  r.dim = box.dim();
  r.window = lattice_window(box);
  r.lattice = true;
  r.atoms.reserve(box.site_count());
  for_each_site(box, [&](const std::vector<int>& v) {
    r.atoms.push_back({Point(v.begin(), v.end()), nu.sample(rng)});
  });
  return r;
}

MarkedRealization sample_lattice_columnar(const MarkDistribution& nu, const LatticeBox& box,
                                         std::uint64_t seed) {
  if (box.dim() != 2) throw UnsupportedError("columnar environment is only defined for d = 2");
  Engine rng = make_engine(seed);
  std::vector<double> column;
  for (int v1 = box.lo[0]; v1 <= box.hi[0]; ++v1) column.push_back(nu.sample(rng));
  MarkedRealization r;
  r.dim = 2;
  r.window = lattice_window(box);
  r.lattice = true;
  for_each_site(box, [&](const std::vector<int>& v) {
    r.atoms.push_back({Point(v.begin(), v.end()), column[static_cast<std::size_t>(v[0] - box.lo[0])]});
  });
  return r;
}

MarkedRealization shift_realization(const MarkedRealization& r, std::span<const double> z) {
  MarkedRealization out = r;
  out.window = r.window.translated(z);
  for (auto& a : out.atoms) a.loc = add(a.loc, z);
  bool integral = r.lattice;
  for (double c : z) integral = integral && c == std::floor(c);
  out.lattice = integral;
  return out;
}

MarkedRealization uniform_shift(const MarkedRealization& r, std::uint64_t seed) {
  Engine rng = make_engine(seed);
  Point u(static_cast<std::size_t>(r.dim));
  for (auto& c : u) c = uniform01(rng);
  return shift_realization(r, u);
}

MarkedRealization iid_marking(const std::vector<Point>& points, const Window& w,
                              const MarkDistribution& nu, std::uint64_t seed) {
  std::set<Point> seen;
  for (const auto& p : points) {
    if (!seen.insert(p).second) throw InvalidInput("iid_marking needs pairwise distinct points");
  }
  Engine rng = make_engine(seed);
  MarkedRealization r;
  r.dim = w.dim();
  r.window = w;
  for (const auto& p : points) {
    const double m = nu.sample(rng);
    if (m > 0.0) r.atoms.push_back({p, m});
  }
  return r;
}

MarkedRealization truncate(const MarkedRealization& r, double t) {
  if (!(t > 0.0)) throw InvalidInput("truncation level must be positive");
  MarkedRealization out;
  out.dim = r.dim;
  out.window = r.window;
  out.lattice = r.lattice;
  for (const auto& a : r.atoms) {
    if (a.mass >= t) out.atoms.push_back({a.loc, 1.0});
  }
  return out;
}

double mass_of_set(const MarkedRealization& r,
                   const std::function<bool(std::span<const double>)>& region) {
  double s = 0.0;
  for (const auto& a : r.atoms) {
    if (region(a.loc)) s += a.mass;
  }
  return s;
}

AtomIndex::AtomIndex(const MarkedRealization& r) {
  for (std::size_t i = 0; i < r.atoms.size(); ++i) {
    index_.emplace(r.atoms[i].loc, static_cast<long>(i));
  }
}

long AtomIndex::find(std::span<const double> z) const {
  const auto it = index_.find(Point(z.begin(), z.end()));
  return it == index_.end() ? -1 : it->second;
}

double mass_of_vertex_set(const MarkedRealization& r, const std::vector<Point>& vertices) {
  const AtomIndex index(r);
  std::set<long> hit;
  for (const auto& v : vertices) {
    const long i = index.find(v);
    if (i >= 0) hit.insert(i);
  }
  double s = 0.0;
  for (long i : hit) s += r.atoms[static_cast<std::size_t>(i)].mass;
  return s;
}

double layer_mass(const MarkedRealization& r, const std::vector<Point>& vertices) {
  std::set<double> levels;
  for (const auto& a : r.atoms) {
    if (a.mass > 0.0) levels.insert(a.mass);
  }
  double total = 0.0, prev = 0.0;
  for (double t : levels) {
    total += (t - prev) * mass_of_vertex_set(truncate(r, t), vertices);
    prev = t;
  }
  return total;
}

MomentEstimate estimate_factorial_moment(const std::vector<MarkedRealization>& batch,
                                         const std::vector<Window>& boxes, int k) {
  if (batch.empty()) throw InvalidInput("factorial moment estimate needs a non-empty batch");
  if (k != 1 && k != 2) throw InvalidInput("factorial moments are implemented for k = 1, 2");
  if (boxes.size() != static_cast<std::size_t>(k)) throw InvalidInput("need one box per factor");
  std::vector<double> samples;
  samples.reserve(batch.size());
  for (const auto& r : batch) {
    double n1 = 0.0, n2 = 0.0, both = 0.0;
    for (const auto& a : r.atoms) {
      const bool in1 = boxes[0].contains(a.loc);
      const bool in2 = k == 2 && boxes[1].contains(a.loc);
      n1 += in1;
      n2 += in2;
      both += in1 && in2;
    }
    // Ordered pairs of distinct atoms: N1 N2 minus the diagonal.
    samples.push_back(k == 1 ? n1 : n1 * n2 - both);
  }
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(n), samples.size()};
}

}  // namespace greedy
