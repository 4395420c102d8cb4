#include "cayleyheat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cayleyheat/errors.hpp"
#include "cayleyheat/integer_kernel.hpp"

namespace cayleyheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinSingular = 1e-9;

// Upper bound on #{c in Z^d : |Bc| <= r} from |c_i| <= r * |row_i(B^-1)|.
double count_bound(const Eigen::VectorXd& inv_row_norms, double r) {
  double n = 1.0;
  for (Eigen::Index i = 0; i < inv_row_norms.size(); ++i) {
    n *= 2.0 * std::floor(r * inv_row_norms(i)) + 1.0;
  }
  return n;
}

// Certified bound on sum of rho(x) over lattice points with |x| > r, summing
// shells [r + k h, r + (k+1) h) with the crude count bound per shell.
double tail_bound(const Eigen::VectorXd& inv_row_norms, double r) {
  constexpr double h = 0.05;
  double total = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double inner = r + k * h;
    const double term = count_bound(inv_row_norms, inner + h) * std::exp(-kPi * inner * inner);
    total += term;
    if (k > 4 && term < total * 1e-18) break;
  }
  return total;
}

struct Region {
  double radius;
  double tail;
};

Region choose_region(const Lattice& lattice, const Eigen::VectorXd& inv_row_norms,
                     double epsilon) {
  const double d = static_cast<double>(lattice.dim());
  const double sigma = lattice.min_singular_value();
  // R = sqrt(ln(N/eps)/pi) with N = (2R/sigma + 1)^d, solved by fixed point.
  double r = std::sqrt(std::log(1.0 / epsilon) / kPi);
  for (int it = 0; it < 50; ++it) {
    const double nb = std::pow(2.0 * r / sigma + 1.0, d);
    const double next = std::sqrt(std::max(0.0, std::log(nb / epsilon)) / kPi);
    if (std::abs(next - r) < 1e-12) break;
    r = next;
  }
  r = std::max(r, lattice.shortest_basis_norm());
  // The crude formula is not itself a certificate; grow until the shell bound is.
  double tail = tail_bound(inv_row_norms, r);
  while (tail > epsilon) {
    r *= 1.05;
    tail = tail_bound(inv_row_norms, r);
  }
  return {r, tail};
}

// Fincke-Pohst style enumeration of integer c with |Bc| <= radius; calls
// visit(c, |Bc|^2) for each point.
template <typename Visit>
void enumerate_ball(const Lattice& lattice, double radius, std::size_t point_cap, Visit&& visit) {
  const Eigen::Index d = static_cast<Eigen::Index>(lattice.dim());
  const Eigen::MatrixXd& b = lattice.basis();
  Eigen::LLT<Eigen::MatrixXd> llt(lattice.gram());
  if (llt.info() != Eigen::Success) throw DomainError("lattice gram matrix is not positive definite");
  const Eigen::MatrixXd r_mat = llt.matrixU();
  const double r2 = radius * radius * (1.0 + 1e-12);

  std::vector<long long> c(static_cast<std::size_t>(d), 0);
  std::vector<double> partial(static_cast<std::size_t>(d) + 1, 0.0);  // norm^2 of levels > i
  std::size_t visited = 0;
  Eigen::VectorXd x(d);

  auto recurse = [&](auto&& self, Eigen::Index level) -> void {
    const std::size_t lv = static_cast<std::size_t>(level);
    double center = 0.0;
    for (Eigen::Index j = level + 1; j < d; ++j) {
      center -= r_mat(level, j) * static_cast<double>(c[static_cast<std::size_t>(j)]);
    }
    const double diag = r_mat(level, level);
    center /= diag;
    const double rem = r2 - partial[lv + 1];
    if (rem < 0.0) return;
    const double half = std::sqrt(rem) / diag;
    const long long lo = static_cast<long long>(std::ceil(center - half));
    const long long hi = static_cast<long long>(std::floor(center + half));
    for (long long ci = lo; ci <= hi; ++ci) {
      c[lv] = ci;
      const double t = diag * (static_cast<double>(ci) - center);
      partial[lv] = partial[lv + 1] + t * t;
      if (partial[lv] > r2) continue;
      if (level == 0) {
        if (++visited > point_cap) {
          throw NumericalError("lattice enumeration exceeded point cap " + std::to_string(point_cap));
        }
        for (Eigen::Index i = 0; i < d; ++i) x(i) = static_cast<double>(c[static_cast<std::size_t>(i)]);
        const double norm2 = (b * x).squaredNorm();
        visit(std::span<const long long>(c), norm2);
      } else {
        self(self, level - 1);
      }
    }
    c[lv] = 0;
  };
  recurse(recurse, d - 1);
}

Eigen::VectorXd inverse_row_norms(const Lattice& lattice) {
  const Eigen::MatrixXd inv = lattice.basis().inverse();
  return inv.rowwise().norm();
}

}  // namespace

// ---------------------------------------------------------------------------

Lattice::Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.rows() != basis_.cols()) throw DomainError("lattice basis must be square (full rank)");
  if (!basis_.allFinite()) throw DomainError("lattice basis has non-finite entries");
  gram_ = basis_.transpose() * basis_;
  if (basis_.cols() == 0) {
    sigma_min_ = std::numeric_limits<double>::infinity();
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis_);
  sigma_min_ = svd.singularValues().minCoeff();
  if (!(sigma_min_ > kMinSingular)) {
    throw DomainError("lattice basis is rank deficient (smallest singular value " +
                      std::to_string(sigma_min_) + ")");
  }
}

Lattice Lattice::from_vectors(const std::vector<std::vector<double>>& vectors) {
  const Eigen::Index d = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd b(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (static_cast<Eigen::Index>(vectors[static_cast<std::size_t>(j)].size()) != d) {
      throw DomainError("lattice basis vectors must have length equal to their count");
    }
    for (Eigen::Index i = 0; i < d; ++i) b(i, j) = vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  return Lattice(std::move(b));
}

double Lattice::shortest_basis_norm() const {
  if (dim() == 0) return 0.0;
  return basis_.colwise().norm().minCoeff();
}

LatticeHom::LatticeHom(Lattice lattice, FiniteAbelianGroup target, std::vector<GroupElement> images)
    : lattice_(std::move(lattice)), target_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != lattice_.dim()) {
    throw StructuralError("LatticeHom: need one image per basis vector");
  }
  image_index_.reserve(images_.size());
  for (const auto& g : images_) image_index_.push_back(target_.index_of(g));
}

GroupElement LatticeHom::apply(std::span<const long long> coeffs) const {
  if (coeffs.size() != images_.size()) throw StructuralError("LatticeHom: coefficient count mismatch");
  GroupElement out = target_.zero();
  const auto& n = target_.factor_sizes();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    for (std::size_t f = 0; f < n.size(); ++f) {
      long long k = coeffs[i] % n[f];
      if (k < 0) k += n[f];
      out.residues[f] = static_cast<int>((out.residues[f] + k * images_[i].residues[f]) % n[f]);
    }
  }
  return out;
}

std::size_t LatticeHom::apply_index(std::span<const long long> coeffs) const {
  return target_.index_of(apply(coeffs));
}

double rho_point(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::exp(-kPi * s);
}

GaussianMass gaussian_mass(const Lattice& lattice, double epsilon, std::size_t point_cap) {
  if (!(epsilon > 0.0)) throw DomainError("gaussian_mass: epsilon must be positive");
  if (lattice.dim() == 0) return {1.0, 0.0};
  const Eigen::VectorXd inv_norms = inverse_row_norms(lattice);
  const Region region = choose_region(lattice, inv_norms, epsilon);
  double mass = 0.0;
  enumerate_ball(lattice, region.radius, point_cap,
                 [&](std::span<const long long>, double norm2) { mass += std::exp(-kPi * norm2); });
  return {mass, region.tail};
}

PushforwardResult pushforward(const LatticeHom& hom, double epsilon, std::size_t point_cap) {
  if (!(epsilon > 0.0)) throw DomainError("pushforward: epsilon must be positive");
  const FiniteAbelianGroup& g = hom.target();
  if (hom.lattice().dim() == 0) return {delta(g), 0.0, epsilon};
  const Eigen::VectorXd inv_norms = inverse_row_norms(hom.lattice());
  const Region region = choose_region(hom.lattice(), inv_norms, epsilon);
  std::vector<double> chi(g.order(), 0.0);
  const auto& n = g.factor_sizes();
  const auto& images = hom.images();
  std::vector<std::size_t> strides(n.size(), 1);
  for (std::size_t f = n.size(); f-- > 1;) strides[f - 1] = strides[f] * static_cast<std::size_t>(n[f]);
  enumerate_ball(hom.lattice(), region.radius, point_cap,
                 [&](std::span<const long long> c, double norm2) {
                   std::size_t index = 0;
                   for (std::size_t f = 0; f < n.size(); ++f) {
                     long long r = 0;
                     for (std::size_t i = 0; i < c.size(); ++i) {
                       long long k = c[i] % n[f];
                       if (k < 0) k += n[f];
                       r = (r + k * images[i].residues[f]) % n[f];
                     }
                     index += static_cast<std::size_t>(r) * strides[f];
                   }
                   chi[index] += std::exp(-kPi * norm2);
                 });
  return {GroupFunction(g, std::move(chi)), region.tail, epsilon};
}

LatticeHom direct_sum(const LatticeHom& h1, const LatticeHom& h2) {
  if (!(h1.target() == h2.target())) throw StructuralError("direct_sum: target groups differ");
  const Eigen::Index d1 = static_cast<Eigen::Index>(h1.lattice().dim());
  const Eigen::Index d2 = static_cast<Eigen::Index>(h2.lattice().dim());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
  b.topLeftCorner(d1, d1) = h1.lattice().basis();
  b.bottomRightCorner(d2, d2) = h2.lattice().basis();
  std::vector<GroupElement> images = h1.images();
  images.insert(images.end(), h2.images().begin(), h2.images().end());
  return LatticeHom(Lattice(std::move(b)), h1.target(), std::move(images));
}

std::vector<std::vector<long long>> fiber_product_coefficients(const LatticeHom& h1,
                                                               const LatticeHom& h2) {
  if (!(h1.target() == h2.target())) throw StructuralError("fiber_product: target groups differ");
  const auto& n = h1.target().factor_sizes();
  const std::size_t d1 = h1.lattice().dim();
  const std::size_t d2 = h2.lattice().dim();
  // h1(c1) - h2(c2) = 0 mod n_f, one row per cyclic factor.
  IntMatrix m(n.size(), std::vector<long long>(d1 + d2, 0));
  std::vector<long long> moduli(n.begin(), n.end());
  for (std::size_t f = 0; f < n.size(); ++f) {
    for (std::size_t i = 0; i < d1; ++i) m[f][i] = h1.images()[i].residues[f];
    for (std::size_t j = 0; j < d2; ++j) m[f][d1 + j] = (n[f] - h2.images()[j].residues[f]) % n[f];
  }
  return integer_kernel_mod(m, moduli);
}

LatticeHom fiber_product(const LatticeHom& h1, const LatticeHom& h2) {
  const auto coeffs = fiber_product_coefficients(h1, h2);
  const Eigen::Index d1 = static_cast<Eigen::Index>(h1.lattice().dim());
  const Eigen::Index d2 = static_cast<Eigen::Index>(h2.lattice().dim());
  const Eigen::Index d = d1 + d2;
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(d, d);
  block.topLeftCorner(d1, d1) = h1.lattice().basis();
  block.bottomRightCorner(d2, d2) = h2.lattice().basis();
  Eigen::MatrixXd c(d, d);
  std::vector<GroupElement> images;
  images.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& v = coeffs[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < d; ++i) c(i, j) = static_cast<double>(v[static_cast<std::size_t>(i)]);
    images.push_back(h1.apply(std::span<const long long>(v.data(), static_cast<std::size_t>(d1))));
  }
  return LatticeHom(Lattice(block * c), h1.target(), std::move(images));
}

// ---------------------------------------------------------------------------

namespace {

std::string pair_witness(const FiniteAbelianGroup& g, const GroupElement& a, const GroupElement& b) {
  return "g1=" + g.element_to_string(a) + " g2=" + g.element_to_string(b);
}

double rsd_margin(const GroupFunction& chi, std::size_t i1, std::size_t i2) {
  const FiniteAbelianGroup& g = chi.group();
  const double lhs = chi[i1] * chi[i1] * chi[i2] * chi[i2];
  const double rhs = chi[g.add_index(i1, i2)] * chi[g.sub_index(i1, i2)] * chi[0] * chi[0];
  return rhs - lhs;
}

double mean_margin(const GroupFunction& chi, std::size_t i1, std::size_t i2) {
  const FiniteAbelianGroup& g = chi.group();
  const double lhs = chi[i1] * chi[i2] / chi[0];
  const double rhs = 0.5 * (chi[g.add_index(i1, i2)] + chi[g.sub_index(i1, i2)]);
  return rhs - lhs;
}

void require_positive_origin(const GroupFunction& chi, const char* what) {
  if (!(chi[0] > 0.0)) throw DomainError(std::string(what) + ": chi(0) must be positive");
}

}  // namespace

CheckReport check_rsd(const GroupFunction& chi, const GroupElement& g1, const GroupElement& g2,
                      double tol) {
  require_positive_origin(chi, "check_rsd");
  const FiniteAbelianGroup& g = chi.group();
  CheckReport report = make_report("rsd_inequality", tol);
  report.observe(rsd_margin(chi, g.index_of(g1), g.index_of(g2)), pair_witness(g, g1, g2));
  return report;
}

CheckReport check_mean_ineq(const GroupFunction& chi, const GroupElement& g1,
                            const GroupElement& g2, double tol) {
  require_positive_origin(chi, "check_mean_ineq");
  const FiniteAbelianGroup& g = chi.group();
  CheckReport report = make_report("mean_inequality", tol);
  report.observe(mean_margin(chi, g.index_of(g1), g.index_of(g2)), pair_witness(g, g1, g2));
  return report;
}

CheckReport sweep_rsd(const GroupFunction& chi, double rel_tol) {
  require_positive_origin(chi, "sweep_rsd");
  const FiniteAbelianGroup& g = chi.group();
  const double scale = std::pow(chi[0], 4);
  CheckReport report = make_report("rsd_inequality_sweep", rel_tol);
  std::size_t worst1 = 0, worst2 = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.order(); ++i) {
    for (std::size_t j = 0; j < g.order(); ++j) {
      const double m = rsd_margin(chi, i, j) / scale;
      ++report.count;
      if (m < worst) {
        worst = m;
        worst1 = i;
        worst2 = j;
      }
    }
  }
  report.worst_margin = worst;
  report.passed = worst >= -rel_tol;
  report.witness = pair_witness(g, g.element(worst1), g.element(worst2));
  return report;
}

CheckReport sweep_mean_ineq(const GroupFunction& chi, double rel_tol) {
  require_positive_origin(chi, "sweep_mean_ineq");
  const FiniteAbelianGroup& g = chi.group();
  CheckReport report = make_report("mean_inequality_sweep", rel_tol);
  std::size_t worst1 = 0, worst2 = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.order(); ++i) {
    for (std::size_t j = 0; j < g.order(); ++j) {
      const double m = mean_margin(chi, i, j) / chi[0];
      ++report.count;
      if (m < worst) {
        worst = m;
        worst1 = i;
        worst2 = j;
      }
    }
  }
  report.worst_margin = worst;
  report.passed = worst >= -rel_tol;
  report.witness = pair_witness(g, g.element(worst1), g.element(worst2));
  return report;
}

CheckReport check_convolve_even(const GroupFunction& chi, const GroupFunction& upsilon, double tol) {
  require_positive_origin(chi, "check_convolve_even");
  if (!upsilon.is_even() || !upsilon.is_nonnegative()) {
    throw DomainError("check_convolve_even: upsilon must be even and nonnegative");
  }
  const GroupFunction omega = convolve(chi, upsilon);
  if (omega[0] == 0.0) throw DomainError("check_convolve_even: omega(0) = 0");
  const FiniteAbelianGroup& g = chi.group();
  CheckReport report = make_report("convolve_even", tol);
  for (std::size_t i = 0; i < g.order(); ++i) {
    report.observe(omega[i] / omega[0] - chi[i] / chi[0], "g=" + g.element_to_string(g.element(i)));
  }
  return report;
}

}  // namespace cayleyheat
