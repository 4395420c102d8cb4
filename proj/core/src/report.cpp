#include "cayleyheat/report.hpp"

namespace cayleyheat {

void CheckReport::observe(double margin, const std::string& where) {
  observe(margin, tolerance, where);
}

// Instances may carry their own slack (truncation-aware checks); pass/fail
// is decided per instance and the worst raw margin is kept for reporting.
void CheckReport::observe(double margin, double instance_tolerance, const std::string& where) {
  ++count;
  if (margin < -instance_tolerance) passed = false;
  if (margin < worst_margin || count == 1) {
    worst_margin = margin;
    witness = where;
  }
}

void CheckReport::merge(const CheckReport& other) {
  if (other.count == 0) return;
  passed = passed && other.passed;
  if (count == 0 || other.worst_margin < worst_margin) {
    worst_margin = other.worst_margin;
    witness = other.witness;
  }
  count += other.count;
}

}  // namespace cayleyheat
