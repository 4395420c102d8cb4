#pragma once

// Command-line front end: argument handling, weight-file parsing and the
// JSON/CSV report envelope. Kept in a library so tests can drive it in-process.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cayleyheat/cayley.hpp"
#include "cayleyheat/report.hpp"

namespace cayleyheat::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kNumericalGuard = 3 };

/// Parses {"group": "Z12", "weights": {"1": 2.5, "3": 1.0}}. Keys are element
/// indices; each entry is mirrored to its inverse. Throws ParseError or
/// DomainError with a diagnostic.
CayleyWeights parse_weights_json(const std::string& text, const std::optional<std::string>& group_override);

struct ReportRow {
  std::string name;
  bool passed;
  double worst_margin;
  std::string witness;
  std::size_t count;
};

/// CSV with header name,passed,worst_margin,witness,count; doubles use 17
/// significant digits, text fields are quoted when needed.
std::string reports_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_reports_csv(const std::string& csv);

ReportRow to_row(const CheckReport& r);

/// Runs the CLI; argv[0] is the program name. Output goes to `out` unless
/// --output names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cayleyheat::cli
