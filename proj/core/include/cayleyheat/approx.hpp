#pragma once

// Approximation of cexp(alpha * phi) by convolution powers of one-dimensional
// lattice pushforwards chi_n ~ delta + alpha phi / n, and the elementary
// power-difference bounds behind the convergence argument.

#include <vector>

#include "cayleyheat/group.hpp"
#include "cayleyheat/lattice.hpp"

namespace cayleyheat {

struct ApproxSequenceConfig {
  double alpha;  // >= 0; alpha = 0 yields chi_n = delta
  GroupElement g0;
  long long n;   // n > alpha, n >= 2
};

struct RateReport {
  std::vector<long long> ns;
  std::vector<double> errors;  // sup-norm errors, one per n
  double fitted_order = 0.0;   // least-squares slope of ln(error) against ln(n)
  bool passed = false;
};

/// |a^n - b^n| <= n C^{n-1} |a - b| (with 1e-12 slack) for a, b in [0, C].
bool check_power_diff(double a, double b, double c, int n);

/// r_n = sqrt(ln(n/alpha)/pi); returns the pushforward of r_n Z under r_n -> g0.
PushforwardResult build_chi_n(const ApproxSequenceConfig& cfg, const FiniteAbelianGroup& group,
                              double epsilon = 1e-15);

/// r_n for the chi_n lattice.
double chi_n_spacing(double alpha, long long n);

/// ||delta + alpha phi/n - chi_n||_inf
double chi_n_error(const ApproxSequenceConfig& cfg, const FiniteAbelianGroup& group,
                   double epsilon = 1e-15);

/// f^{*n} computed as idft(dft(f)^n).
GroupFunction convolution_power(const GroupFunction& f, long long n);

/// Least-squares slope of ln(y) on ln(x).
double fit_log_log_slope(const std::vector<long long>& xs, const std::vector<double>& ys);

/// Errors e_n = ||delta + alpha phi/n - chi_n||; passes when the fitted
/// order is <= -3.5.
RateReport rate_check_lemma35(double alpha, const GroupElement& g0, const FiniteAbelianGroup& group,
                              const std::vector<long long>& ns, double epsilon = 1e-15);

/// d_n = ||chi_n^{*n} - cexp(alpha phi)||; passes when d_n strictly decreases
/// over ns and the last error is below a quarter of the first.
RateReport convergence_check_lemma37(double alpha, const GroupElement& g0,
                                     const FiniteAbelianGroup& group,
                                     const std::vector<long long>& ns, double epsilon = 1e-15);

/// Builds cexp(upsilon) as the convolution over phi-basis terms of chi_{n,i}^{*n}.
GroupFunction cexp_pushforward_factorized(const GroupFunction& upsilon, long long n,
                                          double epsilon = 1e-15);

}  // namespace cayleyheat
