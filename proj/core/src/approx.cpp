#include "cayleyheat/approx.hpp"

#include <cmath>
#include <numbers>

#include "cayleyheat/errors.hpp"

namespace cayleyheat {

bool check_power_diff(double a, double b, double c, int n) {
  if (n < 1) throw DomainError("check_power_diff: n must be >= 1");
  if (!(a >= 0.0 && b >= 0.0 && a <= c && b <= c)) {
    throw DomainError("check_power_diff: require 0 <= a, b <= C");
  }
  const double lhs = std::abs(std::pow(a, n) - std::pow(b, n));
  const double rhs = n * std::pow(c, n - 1) * std::abs(a - b);
  return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

double chi_n_spacing(double alpha, long long n) {
  if (!(alpha > 0.0)) throw DomainError("chi_n_spacing: alpha must be positive");
  if (!(static_cast<double>(n) > alpha)) throw DomainError("chi_n_spacing: need n > alpha");
  return std::sqrt(std::log(static_cast<double>(n) / alpha) / std::numbers::pi);
}

PushforwardResult build_chi_n(const ApproxSequenceConfig& cfg, const FiniteAbelianGroup& group,
                              double epsilon) {
  if (cfg.n < 2) throw DomainError("build_chi_n: n must be >= 2");
  if (cfg.alpha < 0.0) throw DomainError("build_chi_n: alpha must be nonnegative");
  if (!(static_cast<double>(cfg.n) > cfg.alpha)) throw DomainError("build_chi_n: need n > alpha");
  if (!group.contains(cfg.g0)) throw StructuralError("build_chi_n: g0 not in group");
  if (cfg.alpha == 0.0) {
    // r_n -> infinity: only the origin survives.
    return pushforward(LatticeHom(Lattice(Eigen::MatrixXd(0, 0)), group, {}), epsilon);
  }
  Eigen::MatrixXd basis(1, 1);
  basis(0, 0) = chi_n_spacing(cfg.alpha, cfg.n);
  return pushforward(LatticeHom(Lattice(std::move(basis)), group, {cfg.g0}), epsilon);
}

double chi_n_error(const ApproxSequenceConfig& cfg, const FiniteAbelianGroup& group,
                   double epsilon) {
  const PushforwardResult chi = build_chi_n(cfg, group, epsilon);
  GroupFunction target = delta(group) + phi(group, cfg.g0) * (cfg.alpha / static_cast<double>(cfg.n));
  return max_abs_diff(target, chi.chi);
}

GroupFunction convolution_power(const GroupFunction& f, long long n) {
  if (n < 0) throw DomainError("convolution_power: n must be >= 0");
  SpectrumFunction s = dft(f);
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::complex<double> base = s[k];
    std::complex<double> acc = 1.0;
    for (long long e = n; e > 0; e >>= 1) {
      if (e & 1) acc *= base;
      base *= base;
    }
    s[k] = acc;
  }
  return idft(s);
}

double fit_log_log_slope(const std::vector<long long>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("fit_log_log_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) throw DomainError("fit_log_log_slope: errors must be positive");
    mx += std::log(static_cast<double>(xs[i]));
    my += std::log(ys[i]);
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(static_cast<double>(xs[i])) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

void require_increasing(const std::vector<long long>& ns) {
  if (ns.size() < 2) throw DomainError("rate check: need at least two values of n");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw DomainError("rate check: ns must be strictly increasing");
  }
}

}  // namespace

RateReport rate_check_lemma35(double alpha, const GroupElement& g0, const FiniteAbelianGroup& group,
                              const std::vector<long long>& ns, double epsilon) {
  require_increasing(ns);
  RateReport report;
  report.ns = ns;
  for (long long n : ns) report.errors.push_back(chi_n_error({alpha, g0, n}, group, epsilon));
  report.fitted_order = fit_log_log_slope(report.ns, report.errors);
  report.passed = report.fitted_order <= -3.5;
  return report;
}

RateReport convergence_check_lemma37(double alpha, const GroupElement& g0,
                                     const FiniteAbelianGroup& group,
                                     const std::vector<long long>& ns, double epsilon) {
  require_increasing(ns);
  const GroupFunction target = cexp_spectral(phi(group, g0) * alpha);
  RateReport report;
  report.ns = ns;
  for (long long n : ns) {
    const PushforwardResult chi = build_chi_n({alpha, g0, n}, group, epsilon);
    report.errors.push_back(max_abs_diff(convolution_power(chi.chi, n), target));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < report.errors.size(); ++i) {
    if (!(report.errors[i] < report.errors[i - 1])) decreasing = false;
  }
  const bool all_positive = std::all_of(report.errors.begin(), report.errors.end(),
                                        [](double e) { return e > 0.0; });
  report.fitted_order = all_positive ? fit_log_log_slope(report.ns, report.errors) : 0.0;
  report.passed = decreasing && report.errors.back() < report.errors.front() / 4.0;
  return report;
}

GroupFunction cexp_pushforward_factorized(const GroupFunction& upsilon, long long n,
                                          double epsilon) {
  const FiniteAbelianGroup& group = upsilon.group();
  GroupFunction result = delta(group);
  for (const PhiTerm& term : phi_basis_decompose(upsilon)) {
    const PushforwardResult chi = build_chi_n({term.alpha, term.g0, n}, group, epsilon);
    result = convolve(result, convolution_power(chi.chi, n), ConvolutionMethod::direct);
  }
  return result;
}

}  // namespace cayleyheat
