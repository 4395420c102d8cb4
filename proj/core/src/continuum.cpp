#include "cayleyheat/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "cayleyheat/errors.hpp"

namespace cayleyheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw DomainError("t_grid needs at least two points");
  if (!(t_grid.front() > 0.0)) throw DomainError("t_grid must be positive");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("t_grid must be strictly increasing");
  }
}

// Kernel values with absolute error bounds; closed forms carry zero error.
struct Value {
  double v;
  double err;
};

struct FourPoint {
  Value ab, bc, ac, asc, aa;
};

void observe_inequality(CheckReport& report, const FourPoint& k, double tol,
                        const std::string& where) {
  const double scale = std::pow(k.aa.v, 4);
  const double lhs = k.ab.v * k.ab.v * k.bc.v * k.bc.v;
  const double rhs = k.ac.v * k.asc.v * k.aa.v * k.aa.v;
  const double A = std::abs(k.ab.v) + k.ab.err, B = std::abs(k.bc.v) + k.bc.err;
  const double C = std::abs(k.ac.v) + k.ac.err, D = std::abs(k.asc.v) + k.asc.err;
  const double E = std::abs(k.aa.v) + k.aa.err;
  const double dl = 2 * A * B * B * k.ab.err + 2 * A * A * B * k.bc.err;
  const double dr = D * E * E * k.ac.err + C * E * E * k.asc.err + 2 * C * D * E * k.aa.err;
  report.observe((rhs - lhs) / scale, tol + 10.0 * (dl + dr) / scale, where);
}

void observe_lemma(CheckReport& report, const FourPoint& k, double tol, const std::string& where) {
  const double e = k.aa.v;
  const double lhs = k.ab.v * k.bc.v / e;
  const double rhs = 0.5 * (k.ac.v + k.asc.v);
  const double A = std::abs(k.ab.v) + k.ab.err, B = std::abs(k.bc.v) + k.bc.err;
  const double dl = (B * k.ab.err + A * k.bc.err) / e + A * B * k.aa.err / (e * e);
  const double dr = 0.5 * (k.ac.err + k.asc.err);
  report.observe((rhs - lhs) / e, tol + 10.0 * (dl + dr) / e, where);
}

// H3 kernels divided by H(a,a): exact closed form, no error term.
double h3_ratio(double d, double t) { return d_over_sinh(d) * std::exp(-d * d / (4.0 * t)); }

FourPoint h3_four_point(const HyperboloidPoint& a, const HyperboloidPoint& b,
                        const HyperboloidPoint& c, double t) {
  if (!(t > 0.0)) throw DomainError("h3: t must be positive");
  const HyperboloidPoint sc = h3_point_symmetry(b, c);
  return {{h3_ratio(h3_distance(a, b), t), 0.0},
          {h3_ratio(h3_distance(b, c), t), 0.0},
          {h3_ratio(h3_distance(a, c), t), 0.0},
          {h3_ratio(h3_distance(a, sc), t), 0.0},
          {1.0, 0.0}};
}

Value series_kernel(Space space, double cos_theta, double t, int l_max) {
  const SeriesValue s = space == Space::rp2 ? rp2_heat(cos_theta, t, l_max)
                                            : sphere_heat(cos_theta, t, l_max);
  return {s.value, s.error_bound()};
}

FourPoint sphere_four_point(Space space, const SpherePoint& a, const SpherePoint& b,
                            const SpherePoint& c, double t, int l_max) {
  if (space == Space::h3) throw DomainError("sphere_four_point: not a series space");
  const SpherePoint sc = sphere_point_symmetry(b, c);
  return {series_kernel(space, a.dot(b), t, l_max), series_kernel(space, b.dot(c), t, l_max),
          series_kernel(space, a.dot(c), t, l_max), series_kernel(space, a.dot(sc), t, l_max),
          series_kernel(space, 1.0, t, l_max)};
}

SeriesValue legendre_series(double x, double t, int l_max, bool even_only) {
  if (!(t > 0.0)) throw DomainError("series heat kernel: t must be positive");
  if (l_max < 1) throw DomainError("series heat kernel: l_max must be >= 1");
  x = std::clamp(x, -1.0, 1.0);
  double p_prev = 1.0;  // P_{l-1}
  double p = x;         // P_l
  double sum = 0.0;
  double weighted_abs = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    const double pl = (l == 0) ? 1.0 : p;
    if (!even_only || l % 2 == 0) {
      const double coef = (2.0 * l + 1.0) / (4.0 * kPi) * std::exp(-l * (l + 1.0) * t);
      sum += coef * pl;
      weighted_abs += coef * (l + 1.0);
    }
    if (l >= 1) {
      // (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}
      const double next = ((2.0 * l + 1.0) * x * p - l * p_prev) / (l + 1.0);
      p_prev = p;
      p = next;
    }
  }
  double tail = 0.0;
  for (int l = l_max + 1; l < l_max + 1000000; ++l) {
    if (even_only && l % 2 != 0) continue;
    const double term = (2.0 * l + 1.0) / (4.0 * kPi) * std::exp(-l * (l + 1.0) * t);
    tail += term;
    // terms decrease once 2(l+1)t > ln((2l+3)/(2l+1)), which holds from here on
    if (term == 0.0 || (term < 1e-30 * tail && 2.0 * (l + 1.0) * t > 1.0)) break;
  }
  SeriesValue out{sum, tail, 4.0 * kEps * weighted_abs};
  if (out.truncation_bound > 1e-3 * std::abs(out.value)) {
    throw NumericalError("series heat kernel: truncation bound " + fmt(out.truncation_bound) +
                         " exceeds 1e-3 of the value at t=" + fmt(t) + "; raise l_max or t");
  }
  return out;
}

std::array<double, 9> random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double q[4];
  double norm = 0.0;
  for (double& v : q) {
    v = n(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : q) v /= norm;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
          2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
          2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperbolic 3-space

HyperboloidPoint::HyperboloidPoint(std::array<double, 4> x) : x_(x) {
  const double q = x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
  if (!(x[0] >= 1.0 - 1e-10) || std::abs(q - 1.0) > 1e-10 * std::max(1.0, x[0] * x[0])) {
    throw DomainError("point is not on the upper sheet of the hyperboloid");
  }
}

double minkowski(const HyperboloidPoint& x, const HyperboloidPoint& y) {
  return x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3];
}

double h3_distance(const HyperboloidPoint& x, const HyperboloidPoint& y) {
  const double p = minkowski(x, y);
  const double slack = 1e-9 * std::max(1.0, x[0] * y[0]);
  if (p < 1.0 - slack) throw DomainError("h3_distance: Minkowski pairing below 1; invalid points");
  return std::acosh(std::max(p, 1.0));
}

double d_over_sinh(double d) {
  d = std::abs(d);
  if (d < 1e-4) {
    const double d2 = d * d;
    return 1.0 - d2 / 6.0 + 7.0 * d2 * d2 / 360.0;
  }
  if (d > 700.0) return std::exp(log_d_over_sinh(d));
  return d / std::sinh(d);
}

double log_d_over_sinh(double d) {
  d = std::abs(d);
  if (d < 1e-4) return std::log(d_over_sinh(d));
  if (d < 20.0) return std::log(d / std::sinh(d));
  // sinh d = e^d (1 - e^{-2d}) / 2
  return std::log(2.0 * d) - d - std::log1p(-std::exp(-2.0 * d));
}

double h3_log_heat(double d, double t) {
  if (!(t > 0.0)) throw DomainError("h3_heat: t must be positive");
  return -1.5 * std::log(4.0 * kPi * t) + log_d_over_sinh(d) - t - d * d / (4.0 * t);
}

double h3_heat(double d, double t) { return std::exp(h3_log_heat(d, t)); }

H3Triple h3_abc(double d1) {
  if (!(d1 > 0.0)) throw DomainError("h3_abc: d1 must be positive");
  const double ch = std::cosh(d1), sh = std::sinh(d1);
  return {HyperboloidPoint({ch, sh, 0.0, 0.0}), HyperboloidPoint::origin(),
          HyperboloidPoint({ch, 0.0, sh, 0.0})};
}

HyperboloidPoint h3_point_symmetry(const HyperboloidPoint& b, const HyperboloidPoint& c) {
  const double s = 2.0 * minkowski(b, c);
  return HyperboloidPoint({s * b[0] - c[0], s * b[1] - c[1], s * b[2] - c[2], s * b[3] - c[3]});
}

HyperboloidPoint h3_transform(const HyperboloidPoint& p, const std::array<double, 9>& r, double eta) {
  std::array<double, 3> s{};
  for (int i = 0; i < 3; ++i) {
    s[i] = r[3 * i] * p[1] + r[3 * i + 1] * p[2] + r[3 * i + 2] * p[3];
  }
  const double ch = std::cosh(eta), sh = std::sinh(eta);
  return HyperboloidPoint({ch * p[0] + sh * s[0], sh * p[0] + ch * s[0], s[1], s[2]});
}

H3ReducedCheck h3_reduced_check(double d1, double t) {
  if (!(t > 0.0)) throw DomainError("h3_reduced_check: t must be positive");
  const H3Triple tri = h3_abc(d1);
  const double ch = std::cosh(d1);
  H3ReducedCheck out{};
  out.d1 = d1;
  out.d2 = std::acosh(ch * ch);
  out.log_ls = 2.0 * log_d_over_sinh(d1) - d1 * d1 / (2.0 * t);
  out.log_rs = log_d_over_sinh(out.d2) - out.d2 * out.d2 / (4.0 * t);
  out.ls = std::exp(out.log_ls);
  out.rs = std::exp(out.log_rs);
  out.violated = out.log_ls > out.log_rs;

  const HyperboloidPoint sc = h3_point_symmetry(tri.b, tri.c);
  const double log_aa = h3_log_heat(0.0, t);
  const double log_lhs = 2.0 * h3_log_heat(h3_distance(tri.a, tri.b), t) +
                         2.0 * h3_log_heat(h3_distance(tri.b, tri.c), t);
  const double log_rhs = h3_log_heat(h3_distance(tri.a, tri.c), t) +
                         h3_log_heat(h3_distance(tri.a, sc), t) + 2.0 * log_aa;
  out.unreduced_log_ls = 0.5 * (log_lhs - 4.0 * log_aa);
  out.unreduced_log_rs = 0.5 * (log_rhs - 4.0 * log_aa);
  return out;
}

QuadraticFit fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw DomainError("fit_quadratic: need >= 3 points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = xs[i] * xs[i];
    a(r, 1) = xs[i];
    a(r, 2) = 1.0;
    y(r) = ys[i];
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
  return {coef(0), coef(1), coef(2)};
}

H3Asymptotics h3_asymptotic_fit(const std::vector<double>& d1s, double t) {
  std::vector<double> ls, rs;
  for (double d1 : d1s) {
    const H3ReducedCheck r = h3_reduced_check(d1, t);
    ls.push_back(r.log_ls);
    rs.push_back(r.log_rs);
  }
  return {fit_quadratic(d1s, ls), fit_quadratic(d1s, rs)};
}

CheckReport h3_monotone_check(double d, const std::vector<double>& t_grid, double tol) {
  require_grid(t_grid);
  CheckReport report = make_report("h3_monotone", tol);
  double prev = h3_ratio(d, t_grid.front());
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double cur = h3_ratio(d, t_grid[k]);
    report.observe(cur - prev, "d=" + fmt(d) + " t=" + fmt(t_grid[k - 1]) + " t'=" + fmt(t_grid[k]));
    prev = cur;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sphere and projective plane

SpherePoint::SpherePoint(std::array<double, 3> u) : u_(u) {
  const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  if (!(std::abs(n - 1.0) <= 1e-12)) throw DomainError("SpherePoint: vector is not a unit vector");
}

SpherePoint SpherePoint::normalized(std::array<double, 3> v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(n > 0.0)) throw DomainError("SpherePoint: cannot normalize a zero vector");
  return SpherePoint({v[0] / n, v[1] / n, v[2] / n});
}

double SpherePoint::dot(const SpherePoint& o) const {
  return std::clamp(u_[0] * o.u_[0] + u_[1] * o.u_[1] + u_[2] * o.u_[2], -1.0, 1.0);
}

SpherePoint sphere_point_symmetry(const SpherePoint& b, const SpherePoint& c) {
  const double s = 2.0 * b.dot(c);
  const auto& bu = b.coords();
  const auto& cu = c.coords();
  return SpherePoint::normalized({s * bu[0] - cu[0], s * bu[1] - cu[1], s * bu[2] - cu[2]});
}

SeriesValue sphere_heat(double cos_theta, double t, int l_max) {
  return legendre_series(cos_theta, t, l_max, false);
}

SeriesValue rp2_heat(double cos_theta, double t, int l_max) {
  SeriesValue s = legendre_series(cos_theta, t, l_max, true);
  return {2.0 * s.value, 2.0 * s.truncation_bound, 2.0 * s.rounding_bound};
}

CheckReport symmetric_ineq_check(const HyperboloidPoint& a, const HyperboloidPoint& b,
                                 const HyperboloidPoint& c, double t, double tol) {
  CheckReport report = make_report("symmetric_inequality_h3", tol);
  observe_inequality(report, h3_four_point(a, b, c, t), tol, "t=" + fmt(t));
  return report;
}

CheckReport symmetric_ineq_check(Space space, const SpherePoint& a, const SpherePoint& b,
                                 const SpherePoint& c, double t, double tol, int l_max) {
  CheckReport report = make_report(space == Space::rp2 ? "symmetric_inequality_rp2"
                                                 : "symmetric_inequality_s2", tol);
  observe_inequality(report, sphere_four_point(space, a, b, c, t, l_max), tol, "t=" + fmt(t));
  return report;
}

CheckReport heat_lemma_check(const HyperboloidPoint& a, const HyperboloidPoint& b,
                             const HyperboloidPoint& c, double t, double tol) {
  CheckReport report = make_report("heat_lemma_h3", tol);
  observe_lemma(report, h3_four_point(a, b, c, t), tol, "t=" + fmt(t));
  return report;
}

CheckReport heat_lemma_check(Space space, const SpherePoint& a, const SpherePoint& b,
                             const SpherePoint& c, double t, double tol, int l_max) {
  CheckReport report = make_report(space == Space::rp2 ? "heat_lemma_rp2" : "heat_lemma_s2", tol);
  observe_lemma(report, sphere_four_point(space, a, b, c, t, l_max), tol, "t=" + fmt(t));
  return report;
}

CheckReport sphere_monotone_check(double cos_theta, const std::vector<double>& t_grid, int l_max,
                                  Space space) {
  require_grid(t_grid);
  if (space == Space::h3) throw DomainError("sphere_monotone_check: not a series space");
  CheckReport report = make_report(space == Space::rp2 ? "rp2_monotone" : "s2_monotone", 0.0);
  auto ratio = [&](double t) {
    const Value h = series_kernel(space, cos_theta, t, l_max);
    const Value h0 = series_kernel(space, 1.0, t, l_max);
    const double r = h.v / h0.v;
    return Value{r, (h.err + std::abs(r) * h0.err) / h0.v};
  };
  Value prev = ratio(t_grid.front());
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const Value cur = ratio(t_grid[k]);
    report.observe(cur.v - prev.v, 10.0 * (cur.err + prev.err),
                   "cos=" + fmt(cos_theta) + " t=" + fmt(t_grid[k - 1]) + " t'=" + fmt(t_grid[k]));
    prev = cur;
  }
  return report;
}

SymmetricSweep sphere_sweep(Space space, std::size_t triples, const std::vector<double>& ts,
                            std::uint64_t seed, double tol, int l_max) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  auto draw = [&] { return SpherePoint::normalized({n(rng), n(rng), n(rng)}); };
  SymmetricSweep sweep;
  sweep.inequality.name = space == Space::rp2 ? "symmetric_inequality_rp2" : "symmetric_inequality_s2";
  sweep.lemma.name = space == Space::rp2 ? "heat_lemma_rp2" : "heat_lemma_s2";
  sweep.inequality.tolerance = sweep.lemma.tolerance = tol;
  for (std::size_t i = 0; i < triples; ++i) {
    const SpherePoint a = draw(), b = draw(), c = draw();
    for (double t : ts) {
      const FourPoint k = sphere_four_point(space, a, b, c, t, l_max);
      const std::string where = "triple=" + std::to_string(i) + " t=" + fmt(t);
      CheckReport ineq = make_report("", tol), lemma = make_report("", tol);
      observe_inequality(ineq, k, tol, where);
      observe_lemma(lemma, k, tol, where);
      if (ineq.passed && !lemma.passed) ++sweep.implication_failures;
      sweep.inequality.merge(ineq);
      sweep.lemma.merge(lemma);
    }
  }
  return sweep;
}

SymmetricSweep h3_sweep(const std::vector<double>& d1s, const std::vector<double>& ts,
                        std::size_t boosts_per_config, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rapidity(-1.5, 1.5);
  SymmetricSweep sweep;
  sweep.inequality.name = "symmetric_inequality_h3";
  sweep.lemma.name = "heat_lemma_h3";
  sweep.inequality.tolerance = sweep.lemma.tolerance = tol;
  for (double d1 : d1s) {
    const H3Triple base = h3_abc(d1);
    for (std::size_t k = 0; k <= boosts_per_config; ++k) {
      // k == 0 is the untransformed configuration
      const auto rot = k == 0 ? std::array<double, 9>{1, 0, 0, 0, 1, 0, 0, 0, 1} : random_rotation(rng);
      const double eta = k == 0 ? 0.0 : rapidity(rng);
      const HyperboloidPoint a = h3_transform(base.a, rot, eta);
      const HyperboloidPoint b = h3_transform(base.b, rot, eta);
      const HyperboloidPoint c = h3_transform(base.c, rot, eta);
      for (double t : ts) {
        const FourPoint fp = h3_four_point(a, b, c, t);
        const std::string where = "d1=" + fmt(d1) + " boost=" + std::to_string(k) + " t=" + fmt(t);
        CheckReport ineq = make_report("", tol), lemma = make_report("", tol);
        observe_inequality(ineq, fp, tol, where);
        observe_lemma(lemma, fp, tol, where);
        if (ineq.passed && !lemma.passed) ++sweep.implication_failures;
        sweep.inequality.merge(ineq);
        sweep.lemma.merge(lemma);
      }
    }
  }
  return sweep;
}

}  // namespace cayleyheat
