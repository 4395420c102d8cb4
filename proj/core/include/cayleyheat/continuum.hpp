#pragma once

// Continuum heat kernels on three symmetric spaces: hyperbolic 3-space
// (closed form, hyperboloid model), the 2-sphere and the real projective
// plane (truncated Legendre series). Checks of the four-point inequality
//   H(a,b)^2 H(b,c)^2 <= H(a,c) H(a,s_b(c)) H(a,a)^2,
// its averaged form, and monotonic diffusion.

#include <array>
#include <cstdint>
#include <vector>

#include "cayleyheat/report.hpp"

namespace cayleyheat {

// --- Hyperbolic 3-space ------------------------------------------------------

/// Point on the upper sheet x0^2 - x1^2 - x2^2 - x3^2 = 1.
class HyperboloidPoint {
 public:
  explicit HyperboloidPoint(std::array<double, 4> x);
  static HyperboloidPoint origin() { return HyperboloidPoint({1.0, 0.0, 0.0, 0.0}); }

  const std::array<double, 4>& coords() const { return x_; }
  double operator[](std::size_t i) const { return x_[i]; }

 private:
  std::array<double, 4> x_;
};

double minkowski(const HyperboloidPoint& x, const HyperboloidPoint& y);

/// arccosh of the Minkowski pairing; pairings in [1 - 1e-9, 1) clamp to 0.
double h3_distance(const HyperboloidPoint& x, const HyperboloidPoint& y);

/// d / sinh(d) with a Taylor branch below 1e-4.
double d_over_sinh(double d);
/// ln(d / sinh(d)), finite for every d >= 0.
double log_d_over_sinh(double d);

/// (4 pi t)^{-3/2} (d / sinh d) exp(-t - d^2 / 4t)
double h3_heat(double d, double t);
double h3_log_heat(double d, double t);

struct H3Triple {
  HyperboloidPoint a, b, c;
};

/// a = (cosh d1, sinh d1, 0, 0), b = origin, c = (cosh d1, 0, sinh d1, 0).
H3Triple h3_abc(double d1);

/// Geodesic reflection through b: 2 <b, c>_M b - c.
HyperboloidPoint h3_point_symmetry(const HyperboloidPoint& b, const HyperboloidPoint& c);

/// Lorentz transform: rotation of the spatial part by the orthogonal matrix
/// `rotation` (row-major 3x3) followed by a boost of rapidity `eta` along x1.
HyperboloidPoint h3_transform(const HyperboloidPoint& p, const std::array<double, 9>& rotation,
                              double eta);

struct H3ReducedCheck {
  double d1;
  double d2;
  double ls;  // (d1^2 / sinh^2 d1) exp(-d1^2 / 2t)
  double rs;  // (d2 / sinh d2) exp(-d2^2 / 4t)
  double log_ls;
  double log_rs;
  bool violated;  // LS > RS
  // The same two sides rebuilt from h3_heat on the explicit points, with the
  // common H(a,a)^4 scale removed.
  double unreduced_log_ls;
  double unreduced_log_rs;
};

H3ReducedCheck h3_reduced_check(double d1, double t);

struct QuadraticFit {
  double a, b, c;  // y ~ a x^2 + b x + c
};
QuadraticFit fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys);

/// Quadratic coefficients of ln LS and ln RS as functions of d1 over `d1s`.
struct H3Asymptotics {
  QuadraticFit log_ls;
  QuadraticFit log_rs;
};
H3Asymptotics h3_asymptotic_fit(const std::vector<double>& d1s, double t);

/// (d / sinh d) exp(-d^2 / 4t) nondecreasing along the grid.
CheckReport h3_monotone_check(double d, const std::vector<double>& t_grid, double tol = 0.0);

// --- Sphere and projective plane ----------------------------------------------

class SpherePoint {
 public:
  explicit SpherePoint(std::array<double, 3> u);
  /// Normalizes a nonzero vector.
  static SpherePoint normalized(std::array<double, 3> v);

  const std::array<double, 3>& coords() const { return u_; }
  double dot(const SpherePoint& other) const;

 private:
  std::array<double, 3> u_;
};

/// 2 (b.c) b - c, renormalized.
SpherePoint sphere_point_symmetry(const SpherePoint& b, const SpherePoint& c);

inline constexpr int kDefaultLmax = 200;

struct SeriesValue {
  double value;
  double truncation_bound;  // sum of |terms| beyond l_max
  double rounding_bound;    // floating-point error estimate of the partial sum
  double error_bound() const { return truncation_bound + rounding_bound; }
};

/// sum_{l <= l_max} (2l+1)/(4 pi) e^{-l(l+1)t} P_l(cos theta). Throws
/// NumericalError when the truncation bound exceeds 1e-3 of |value|.
SeriesValue sphere_heat(double cos_theta, double t, int l_max = kDefaultLmax);

/// Twice the even-l part of the sphere series.
SeriesValue rp2_heat(double cos_theta, double t, int l_max = kDefaultLmax);

enum class Space { h3, s2, rp2 };

/// Four-point inequality at one triple. Margins are divided by H(a,a)^4.
/// Series kernels count as a violation only when the deficit exceeds ten
/// times the propagated kernel error bounds plus tol.
CheckReport symmetric_ineq_check(const HyperboloidPoint& a, const HyperboloidPoint& b,
                                 const HyperboloidPoint& c, double t, double tol);
CheckReport symmetric_ineq_check(Space space, const SpherePoint& a, const SpherePoint& b,
                                 const SpherePoint& c, double t, double tol,
                                 int l_max = kDefaultLmax);

/// H(a,b) H(b,c) / H(a,a) <= (H(a,c) + H(a,s_b(c))) / 2, divided by H(a,a).
CheckReport heat_lemma_check(const HyperboloidPoint& a, const HyperboloidPoint& b,
                             const HyperboloidPoint& c, double t, double tol);
CheckReport heat_lemma_check(Space space, const SpherePoint& a, const SpherePoint& b,
                             const SpherePoint& c, double t, double tol, int l_max = kDefaultLmax);

/// H_t(theta) / H_t(0) nondecreasing along the grid, truncation-aware.
CheckReport sphere_monotone_check(double cos_theta, const std::vector<double>& t_grid,
                                  int l_max = kDefaultLmax, Space space = Space::s2);

struct SymmetricSweep {
  CheckReport inequality;  // four-point inequality
  CheckReport lemma;       // averaged form
  std::size_t implication_failures = 0;  // instances passing the first and failing the second
};

/// Uniform random triples (normalized Gaussian vectors) on S^2 or RP^2,
/// every triple evaluated at every t.
SymmetricSweep sphere_sweep(Space space, std::size_t triples, const std::vector<double>& ts,
                            std::uint64_t seed, double tol = 1e-12, int l_max = kDefaultLmax);

/// Random Lorentz images of the fixed family h3_abc(d1) for d1 in d1s.
SymmetricSweep h3_sweep(const std::vector<double>& d1s, const std::vector<double>& ts,
                        std::size_t boosts_per_config, std::uint64_t seed, double tol = 1e-12);

}  // namespace cayleyheat
