#pragma once

// Full-rank lattices in R^d, their Gaussian mass rho(L) = sum exp(-pi |x|^2),
// homomorphisms L -> G and the pushforward chi(g) = rho(h^{-1}(g)).

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cayleyheat/group.hpp"
#include "cayleyheat/report.hpp"

namespace cayleyheat {

inline constexpr double kDefaultTailEpsilon = 1e-12;
inline constexpr std::size_t kDefaultPointCap = 10'000'000;

/// Lattice spanned by the columns of a square basis matrix. Dimension 0 is the
/// trivial lattice {0}.
class Lattice {
 public:
  explicit Lattice(Eigen::MatrixXd basis);

  /// Convenience: basis vectors given as rows of a nested list.
  static Lattice from_vectors(const std::vector<std::vector<double>>& vectors);

  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  double min_singular_value() const { return sigma_min_; }
  double shortest_basis_norm() const;

 private:
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd gram_;
  double sigma_min_ = 0.0;
};

/// Homomorphism from a lattice to a finite Abelian group, fixed by the images
/// of the basis vectors.
class LatticeHom {
 public:
  LatticeHom(Lattice lattice, FiniteAbelianGroup target, std::vector<GroupElement> images);

  const Lattice& lattice() const { return lattice_; }
  const FiniteAbelianGroup& target() const { return target_; }
  const std::vector<GroupElement>& images() const { return images_; }

  /// h(sum c_i b_i) as an element index.
  std::size_t apply_index(std::span<const long long> coeffs) const;
  GroupElement apply(std::span<const long long> coeffs) const;

 private:
  Lattice lattice_;
  FiniteAbelianGroup target_;
  std::vector<GroupElement> images_;
  std::vector<std::size_t> image_index_;
};

struct GaussianMass {
  double mass;
  double tail_bound;
};

struct PushforwardResult {
  GroupFunction chi;
  double tail_bound;  // certified per-entry truncation error (values underestimate)
  double epsilon;
};

double rho_point(std::span<const double> x);

/// Sum of rho over the lattice points inside the enumeration ball, plus a
/// certified bound (<= epsilon) on the mass outside it.
GaussianMass gaussian_mass(const Lattice& lattice, double epsilon = kDefaultTailEpsilon,
                           std::size_t point_cap = kDefaultPointCap);

PushforwardResult pushforward(const LatticeHom& hom, double epsilon = kDefaultTailEpsilon,
                              std::size_t point_cap = kDefaultPointCap);

/// Orthogonal direct sum L1 + L2 with (x1, x2) -> h1(x1) + h2(x2).
LatticeHom direct_sum(const LatticeHom& h1, const LatticeHom& h2);

/// Sublattice {(x1, x2) : h1(x1) = h2(x2)} of L1 + L2 with (x1, x2) -> h1(x1).
LatticeHom fiber_product(const LatticeHom& h1, const LatticeHom& h2);

/// Integer coefficient vectors (relative to the fiber product basis, expressed
/// in the L1 + L2 coordinate system) spanning the fiber product sublattice.
std::vector<std::vector<long long>> fiber_product_coefficients(const LatticeHom& h1,
                                                               const LatticeHom& h2);

// --- Inequality checks -----------------------------------------------------

/// chi(g1)^2 chi(g2)^2 <= chi(g1+g2) chi(g1-g2) chi(0)^2 + tol, margin = RHS - LHS.
CheckReport check_rsd(const GroupFunction& chi, const GroupElement& g1, const GroupElement& g2,
                      double tol);

/// chi(g1) chi(g2) / chi(0) <= (chi(g1+g2) + chi(g1-g2)) / 2 + tol.
CheckReport check_mean_ineq(const GroupFunction& chi, const GroupElement& g1,
                            const GroupElement& g2, double tol);

/// All (g1, g2) pairs of check_rsd; margins are divided by chi(0)^4 and
/// compared against rel_tol.
CheckReport sweep_rsd(const GroupFunction& chi, double rel_tol);

/// All (g1, g2) pairs of check_mean_ineq; margins divided by chi(0).
CheckReport sweep_mean_ineq(const GroupFunction& chi, double rel_tol);

/// With omega = chi * upsilon: chi(g)/chi(0) <= omega(g)/omega(0) + tol for all g.
CheckReport check_convolve_even(const GroupFunction& chi, const GroupFunction& upsilon,
                                double tol);

}  // namespace cayleyheat
