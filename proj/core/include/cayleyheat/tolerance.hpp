#pragma once

#include <algorithm>
#include <cmath>

namespace cayleyheat {

inline constexpr double kRelTol = 1e-10;
inline constexpr double kAbsTol = 1e-14;

/// |a - b| <= max(abs_tol, rel_tol * max(|a|, |b|))
inline bool approx_equal(double a, double b, double rel_tol = kRelTol,
                         double abs_tol = kAbsTol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * scale);
}

}  // namespace cayleyheat
