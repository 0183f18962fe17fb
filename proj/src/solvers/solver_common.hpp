#pragma once

#include "greedy/solvers.hpp"

namespace greedy::detail {

inline void require_window(const MarkedRealization& r, std::span<const double> center, double radius,
                           const Norm& norm) {
  if (!r.window.contains_ball(center, radius, norm)) {
    throw WindowError("query reach exceeds the realization window");
  }
}

inline bool passes_restriction(Restriction restriction, double delta, const Point& x, const Point& y,
                               std::span<const double> z) {
  switch (restriction) {
    case Restriction::none:
      return true;
    case Restriction::diamond:
      return in_diamond({delta, x, y}, z);
    case Restriction::antidiamond:
      return in_antidiamond({delta, x, y}, z);
  }
  return true;
}

}  // namespace greedy::detail
