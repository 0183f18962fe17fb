#include <algorithm>
#include <cmath>
#include <map>

#include "greedy/estimators.hpp"

namespace greedy {

// Strip sweep. With k the least integer such that k^d >= n, the first d - 1 coordinates are cut
// into k slabs each, giving k^(d-1) columns of side L / k, visited in boustrophedon order so that
// consecutive columns are adjacent. Inside a nonempty column the points are taken by increasing
// or decreasing last coordinate, alternating between consecutive nonempty columns.
//
// Let m be the number of nonempty columns and s = n^((d-1)/d). Measured in l1:
//   leg from the origin to the first point             <= d L
//   last coordinate, inside columns                    <= m L
//   last coordinate, between nonempty columns          <= (m - 1) L
//   first d - 1 coordinates, inside columns            <= (n - m)(d - 1) L / k
//   first d - 1 coordinates, between nonempty columns  <= (k^(d-1) - 1) L / k + (m - 1)(d - 1) L / k
// The last line holds because the index distance between two columns is at most the number of
// sweep steps separating them, and each coordinate gains at most one extra slab width.
// Using k >= n^(1/d), k <= 2 n^(1/d), m <= k^(d-1) <= 2^(d-1) s and s >= 1:
//   length <= (d + 2^d + (d - 1) + 2^(d-2)) s L - L <= (2d - 1 + 2^d + 2^(d-2)) s L.
// For d = 2 the constant is 8, for d = 3 it is 15. Any p-norm length is at most the l1 length.
double few_tsp_constant(int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  if (d == 1) return 1.0;
  return 2.0 * d - 1.0 + std::pow(2.0, d) + std::pow(2.0, d - 2);
}

SweepPath few_tsp_path(const std::vector<Point>& points, double L, int d, const Norm& norm) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  if (!(L > 0.0)) throw InvalidInput("side must be positive");
  if (norm.dim() != d) throw InvalidInput("norm dimension mismatch");
  if (points.empty()) throw InvalidInput("need at least one point");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d) throw InvalidInput("point dimension mismatch");
    for (double c : p) {
      if (!(c >= 0.0 && c <= L)) throw InvalidInput("point outside the cube");
    }
  }
  const std::size_t n = points.size();

  SweepPath out;
  out.path.vertices.push_back(Point(static_cast<std::size_t>(d), 0.0));
  if (d == 1) {
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    for (auto& p : sorted) out.path.vertices.push_back(std::move(p));
  } else {
    long k = 1;
    while (std::pow(static_cast<double>(k), d) < static_cast<double>(n)) ++k;
    // Boustrophedon rank of a column: odometer over the first d - 1 slab indices where every
    // digit runs backwards whenever the sum of the higher digits is odd.
    auto rank = [&](const std::vector<long>& idx) {
      long r = 0;
      long parity = 0;
      for (int i = 0; i < d - 1; ++i) {
        const long digit = (parity % 2 == 0) ? idx[i] : k - 1 - idx[i];
        r = r * k + digit;
        parity += idx[i];
      }
      return r;
    };
    std::map<long, std::vector<const Point*>> columns;
    for (const auto& p : points) {
      std::vector<long> idx(static_cast<std::size_t>(d - 1));
      for (int i = 0; i < d - 1; ++i) {
        idx[i] = std::min(k - 1, static_cast<long>(std::floor(p[i] * static_cast<double>(k) / L)));
      }
      columns[rank(idx)].push_back(&p);
    }
    bool up = true;
    for (auto& [r, col] : columns) {
      std::stable_sort(col.begin(), col.end(), [&](const Point* a, const Point* b) {
        return up ? (*a)[d - 1] < (*b)[d - 1] : (*a)[d - 1] > (*b)[d - 1];
      });
      for (const Point* p : col) out.path.vertices.push_back(*p);
      up = !up;
    }
  }
  out.length = path_length(out.path, norm);
  const double s = std::pow(static_cast<double>(n), static_cast<double>(d - 1) / d);
  out.ratio = out.length / (s * L);
  return out;
}

}  // namespace greedy
