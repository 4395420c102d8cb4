#pragma once

// Finite Abelian groups Z_{n1} x ... x Z_{nk}, dense real functions on them,
// convolution, the character transform and the convolutional exponential.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cayleyheat {

inline constexpr std::size_t kDefaultMaxOrder = 4096;

/// Residue vector of a group element; residues[i] lives in [0, n_i).
struct GroupElement {
  std::vector<int> residues;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Product of cyclic groups. Elements are indexed lexicographically with the
/// last factor varying fastest.
class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<int> factor_sizes,
                              std::size_t max_order = kDefaultMaxOrder);

  /// Parses "Z12xZ2" (case-insensitive, whitespace tolerated).
  static FiniteAbelianGroup parse(std::string_view spec,
                                  std::size_t max_order = kDefaultMaxOrder);

  const std::vector<int>& factor_sizes() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  std::size_t order() const { return order_; }

  GroupElement zero() const;
  GroupElement element(std::size_t index) const;
  std::size_t index_of(const GroupElement& g) const;
  bool contains(const GroupElement& g) const;

  /// Componentwise sum mod factor sizes; throws StructuralError on elements
  /// that do not belong to this group.
  GroupElement add(const GroupElement& g, const GroupElement& h) const;
  GroupElement negate(const GroupElement& g) const;
  GroupElement scale(const GroupElement& g, long long k) const;

  // Index-level arithmetic used by the dense kernels.
  std::size_t add_index(std::size_t i, std::size_t j) const;
  std::size_t sub_index(std::size_t i, std::size_t j) const;
  std::size_t neg_index(std::size_t i) const { return neg_[i]; }

  std::string to_string() const;
  std::string element_to_string(const GroupElement& g) const;

  friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    return a.factors_ == b.factors_;
  }

 private:
  std::vector<int> factors_;
  std::vector<std::size_t> strides_;
  std::size_t order_ = 1;
  std::vector<std::size_t> neg_;
};

/// Dense real-valued function on a finite Abelian group.
class GroupFunction {
 public:
  explicit GroupFunction(FiniteAbelianGroup group);
  GroupFunction(FiniteAbelianGroup group, std::vector<double> values);

  const FiniteAbelianGroup& group() const { return group_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(const GroupElement& g) const { return values_[group_.index_of(g)]; }

  double sup_norm() const;
  double l1_norm() const;
  double l2_norm_squared() const;
  double sum() const;

  bool is_even(double rel_tol = 1e-10, double abs_tol = 1e-14) const;
  bool is_nonnegative() const;

  GroupFunction& operator+=(const GroupFunction& other);
  GroupFunction& operator-=(const GroupFunction& other);
  GroupFunction& operator*=(double s);

  friend GroupFunction operator+(GroupFunction a, const GroupFunction& b) { return a += b; }
  friend GroupFunction operator-(GroupFunction a, const GroupFunction& b) { return a -= b; }
  friend GroupFunction operator*(GroupFunction a, double s) { return a *= s; }
  friend GroupFunction operator*(double s, GroupFunction a) { return a *= s; }

 private:
  FiniteAbelianGroup group_;
  std::vector<double> values_;
};

/// Character-indexed spectrum; entry k pairs with the character
/// g -> exp(2 pi i sum_j k_j g_j / n_j), with k indexed like group elements.
class SpectrumFunction {
 public:
  SpectrumFunction(FiniteAbelianGroup group, std::vector<std::complex<double>> values);

  const FiniteAbelianGroup& group() const { return group_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<std::complex<double>>& values() const { return values_; }
  std::complex<double> operator[](std::size_t k) const { return values_[k]; }
  std::complex<double>& operator[](std::size_t k) { return values_[k]; }

  double sup_norm() const;
  double max_imag() const;

 private:
  FiniteAbelianGroup group_;
  std::vector<std::complex<double>> values_;
};

/// Sup-norm of the difference; groups must match.
double max_abs_diff(const GroupFunction& a, const GroupFunction& b);

GroupFunction delta(const FiniteAbelianGroup& group);

/// delta(. - g0) + delta(. + g0); equals 2 at g0 when 2 g0 = 0.
GroupFunction phi(const FiniteAbelianGroup& group, const GroupElement& g0);

/// f^(k) = sum_g f(g) conj(chi_k(g)).
SpectrumFunction dft(const GroupFunction& f);

/// Inverse transform with the 1/|G| factor. Throws NumericalError when the
/// imaginary residue exceeds 1e-8 * sup|s|.
GroupFunction idft(const SpectrumFunction& s);

enum class ConvolutionMethod { direct, spectral };

/// (f * g)(x) = sum_y f(x - y) g(y)
GroupFunction convolve(const GroupFunction& f, const GroupFunction& g,
                       ConvolutionMethod method = ConvolutionMethod::direct);

/// Pointwise product.
GroupFunction multiply(const GroupFunction& f, const GroupFunction& g);

/// Partial sums of sum_n u^{*n}/n! (direct convolutions) until the next term
/// is below tol relative to the running sum and the terms are contracting.
GroupFunction cexp_series(const GroupFunction& upsilon, double tol = 1e-15);

/// idft(exp(dft(u)))
GroupFunction cexp_spectral(const GroupFunction& upsilon);

struct PhiTerm {
  double alpha;
  GroupElement g0;
};

/// Writes an even nonnegative function as sum alpha_i phi(g0_i) with one
/// representative (the smallest index) per orbit {g0, -g0}. Self-inverse
/// orbits, including {0}, get alpha = u(g0)/2 since phi(g0) = 2 delta_{g0}.
std::vector<PhiTerm> phi_basis_decompose(const GroupFunction& upsilon);

GroupFunction phi_basis_compose(const FiniteAbelianGroup& group,
                                const std::vector<PhiTerm>& terms);

}  // namespace cayleyheat
