#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>

namespace cayleyheat {

/// Outcome of an inequality or monotonicity sweep. worst_margin is the minimum
/// of (RHS - LHS) over the tested instances, in the units stated by the check.
struct CheckReport {
  std::string name;
  bool passed = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string witness;
  std::size_t count = 0;
  double tolerance = 0.0;

  /// Records one instance; keeps the argmin witness.
  void observe(double margin, const std::string& where);
  void observe(double margin, double instance_tolerance, const std::string& where);
  /// Folds another report into this one.
  void merge(const CheckReport& other);
};

inline CheckReport make_report(std::string name, double tolerance) {
  CheckReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

}  // namespace cayleyheat
