#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cayleyheat/errors.hpp"
#include "cayleyheat/lattice.hpp"

using namespace cayleyheat;

namespace {

constexpr double kPi = 3.14159265358979323846;

// sum over |k| <= 10 of exp(-pi k^2); the omitted tail is below exp(-100 pi).
double theta_z(int parity = -1) {
  double s = 0.0;
  for (int k = -10; k <= 10; ++k) {
    if (parity >= 0 && std::abs(k) % 2 != parity) continue;
    s += std::exp(-kPi * k * k);
  }
  return s;
}

LatticeHom random_hom(const FiniteAbelianGroup& g, std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim) * 0.9;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b(i, j) += u(rng);
  std::vector<GroupElement> images;
  for (int i = 0; i < dim; ++i) images.push_back(g.element(rng() % g.order()));
  return LatticeHom(Lattice(b), g, images);
}

// Direct enumeration of a 1- or 2-dim lattice over a coefficient box.
GroupFunction brute_pushforward(const LatticeHom& h, int range) {
  GroupFunction chi(h.target());
  const auto& b = h.lattice().basis();
  const int d = static_cast<int>(h.lattice().dim());
  std::vector<long long> c(d);
  if (d == 1) {
    for (c[0] = -range; c[0] <= range; ++c[0]) {
      const double x = b(0, 0) * c[0];
      chi[h.apply_index(c)] += std::exp(-kPi * x * x);
    }
  } else {
    for (c[0] = -range; c[0] <= range; ++c[0])
      for (c[1] = -range; c[1] <= range; ++c[1]) {
        const Eigen::Vector2d x = b * Eigen::Vector2d(double(c[0]), double(c[1]));
        chi[h.apply_index(c)] += std::exp(-kPi * x.squaredNorm());
      }
  }
  return chi;
}

}  // namespace

TEST(Rho, PointValues) {
  const double zero[2] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(rho_point(zero), 1.0);
  const double unit[2] = {0.6, 0.8};
  EXPECT_NEAR(rho_point(unit), 0.0432139183, 1e-10);
  const double x[3] = {0.3, -0.2, 0.7}, mx[3] = {-0.3, 0.2, -0.7};
  EXPECT_DOUBLE_EQ(rho_point(x), rho_point(mx));
}

TEST(Lattice, Validation) {
  EXPECT_THROW(Lattice(Eigen::MatrixXd::Zero(2, 2)), DomainError);
  EXPECT_THROW(Lattice::from_vectors({{1.0, 0.0}, {2.0, 0.0}}), DomainError);
  EXPECT_THROW(Lattice::from_vectors({{1.0, 0.0}}), DomainError);
  EXPECT_EQ(Lattice(Eigen::MatrixXd(0, 0)).dim(), 0u);
}

TEST(GaussianMass, IntegerLattice) {
  const auto m = gaussian_mass(Lattice::from_vectors({{1.0}}));
  EXPECT_NEAR(m.mass, 1.0864348112, 1e-10);
  EXPECT_NEAR(m.mass, theta_z(), 1e-12);
  EXPECT_LE(m.tail_bound, kDefaultTailEpsilon);
}

TEST(GaussianMass, ProductLatticeFactorizes) {
  const double eps = 1e-12;
  const auto m2 = gaussian_mass(Lattice::from_vectors({{1.0, 0.0}, {0.0, 1.0}}), eps);
  EXPECT_NEAR(m2.mass, theta_z() * theta_z(), 2 * eps);
  const auto m3 = gaussian_mass(Lattice(Eigen::MatrixXd::Identity(3, 3)), eps);
  EXPECT_NEAR(m3.mass, std::pow(theta_z(), 3), 3 * eps);
}

TEST(GaussianMass, SparseLatticeApproachesOne) {
  EXPECT_NEAR(gaussian_mass(Lattice::from_vectors({{6.0}})).mass, 1.0, 1e-40);
  EXPECT_DOUBLE_EQ(gaussian_mass(Lattice(Eigen::MatrixXd(0, 0))).mass, 1.0);
}

TEST(GaussianMass, SkewedBasisMatchesReduced) {
  // same lattice Z^2, different bases
  const auto a = gaussian_mass(Lattice::from_vectors({{1.0, 0.0}, {0.0, 1.0}}));
  const auto b = gaussian_mass(Lattice::from_vectors({{1.0, 0.0}, {5.0, 1.0}}));
  EXPECT_NEAR(a.mass, b.mass, 1e-12);
}

TEST(Pushforward, TrivialTarget) {
  const auto g = FiniteAbelianGroup(std::vector<int>{});
  ASSERT_EQ(g.order(), 1u);
  const Lattice l = Lattice::from_vectors({{0.8, 0.1}, {0.2, 1.1}});
  const LatticeHom h(l, g, {g.zero(), g.zero()});
  EXPECT_NEAR(pushforward(h).chi[0], gaussian_mass(l).mass, 1e-13);
}

TEST(Pushforward, ParitySplit) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const LatticeHom h(Lattice::from_vectors({{1.0}}), z2, {z2.element(1)});
  const auto pf = pushforward(h);
  EXPECT_NEAR(pf.chi[0], theta_z(0), 1e-12);
  EXPECT_NEAR(pf.chi[1], theta_z(1), 1e-12);
  EXPECT_NEAR(pf.chi.sum(), 1.0864348112, 1e-10);
}

TEST(Pushforward, MatchesBoxEnumeration) {
  std::mt19937_64 rng(11);
  const auto g = FiniteAbelianGroup::parse("Z3xZ4");
  for (int k = 0; k < 10; ++k) {
    const auto h = random_hom(g, rng, 1 + k % 2);
    EXPECT_LT(max_abs_diff(pushforward(h).chi, brute_pushforward(h, 12)), 1e-12);
  }
}

TEST(Pushforward, EvenAndNonnegative) {
  std::mt19937_64 rng(12);
  const auto g = FiniteAbelianGroup::parse("Z2xZ6");
  for (int k = 0; k < 10; ++k) {
    const auto pf = pushforward(random_hom(g, rng, 2));
    EXPECT_TRUE(pf.chi.is_nonnegative());
    for (std::size_t i = 0; i < g.order(); ++i)
      EXPECT_NEAR(pf.chi[i], pf.chi[g.neg_index(i)], 1e-13 + pf.tail_bound);
  }
}

TEST(Pushforward, RejectsBadEpsilonAndMismatchedImages) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const LatticeHom h(Lattice::from_vectors({{1.0}}), z2, {z2.element(1)});
  EXPECT_THROW(pushforward(h, 0.0), DomainError);
  EXPECT_THROW(LatticeHom(Lattice::from_vectors({{1.0}}), z2, {}), StructuralError);
}

TEST(Pushforward, PointCapGuards) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const LatticeHom h(Lattice(Eigen::MatrixXd::Identity(3, 3) * 0.05), z2,
                     {z2.zero(), z2.zero(), z2.zero()});
  EXPECT_THROW(pushforward(h, 1e-12, 1000), NumericalError);
}

TEST(DirectSum, MatchesConvolution) {
  std::mt19937_64 rng(13);
  for (const char* spec : {"Z6", "Z2xZ4", "Z12"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    for (int k = 0; k < 5; ++k) {
      const auto h1 = random_hom(g, rng, 1 + k % 2), h2 = random_hom(g, rng, 1);
      const auto lhs = pushforward(direct_sum(h1, h2)).chi;
      const auto rhs = convolve(pushforward(h1).chi, pushforward(h2).chi);
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-8) << spec;
    }
  }
}

TEST(DirectSum, BlockDiagonalGramAndTrivialSummand) {
  std::mt19937_64 rng(14);
  const auto g = FiniteAbelianGroup::parse("Z5");
  const auto h1 = random_hom(g, rng, 2), h2 = random_hom(g, rng, 1);
  const auto s = direct_sum(h1, h2);
  EXPECT_EQ(s.lattice().dim(), 3u);
  const auto& gram = s.lattice().gram();
  EXPECT_DOUBLE_EQ(gram(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(gram(1, 2), 0.0);

  const LatticeHom trivial(Lattice(Eigen::MatrixXd(0, 0)), g, {});
  EXPECT_LT(max_abs_diff(pushforward(direct_sum(h1, trivial)).chi, pushforward(h1).chi), 1e-14);
}

TEST(FiberProduct, MatchesPointwiseProduct) {
  std::mt19937_64 rng(15);
  for (const char* spec : {"Z2", "Z2xZ3", "Z4", "Z6"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    for (int k = 0; k < 5; ++k) {
      const auto h1 = random_hom(g, rng, 1 + k % 2), h2 = random_hom(g, rng, 1);
      const auto lhs = pushforward(fiber_product(h1, h2)).chi;
      const auto rhs = multiply(pushforward(h1).chi, pushforward(h2).chi);
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-8) << spec;
    }
  }
}

TEST(FiberProduct, ConcreteParityCase) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const LatticeHom h(Lattice::from_vectors({{1.0}}), z2, {z2.element(1)});
  const auto chi = pushforward(fiber_product(h, h)).chi;
  EXPECT_NEAR(chi[0], theta_z(0) * theta_z(0), 1e-12);
  EXPECT_NEAR(chi[1], theta_z(1) * theta_z(1), 1e-12);
}

TEST(FiberProduct, KernelVectorsSatisfyConstraint) {
  std::mt19937_64 rng(16);
  const auto g = FiniteAbelianGroup::parse("Z3xZ4");
  const auto h1 = random_hom(g, rng, 2), h2 = random_hom(g, rng, 2);
  const auto coeffs = fiber_product_coefficients(h1, h2);
  ASSERT_EQ(coeffs.size(), 4u);
  for (const auto& c : coeffs) {
    ASSERT_EQ(c.size(), 4u);
    const std::vector<long long> c1(c.begin(), c.begin() + 2), c2(c.begin() + 2, c.end());
    EXPECT_EQ(h1.apply(c1), h2.apply(c2));
  }
}

TEST(FiberProduct, TargetMismatchThrows) {
  const auto a = FiniteAbelianGroup::parse("Z2"), b = FiniteAbelianGroup::parse("Z3");
  const LatticeHom h1(Lattice::from_vectors({{1.0}}), a, {a.element(1)});
  const LatticeHom h2(Lattice::from_vectors({{1.0}}), b, {b.element(1)});
  EXPECT_THROW(fiber_product(h1, h2), StructuralError);
  EXPECT_THROW(direct_sum(h1, h2), StructuralError);
}

TEST(CheckRsd, EqualityCases) {
  std::mt19937_64 rng(17);
  const auto g = FiniteAbelianGroup::parse("Z12");
  const auto chi = pushforward(random_hom(g, rng, 1)).chi;
  EXPECT_NEAR(check_rsd(chi, g.zero(), g.zero(), 0.0).worst_margin, 0.0, 1e-15);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const auto r = check_rsd(chi, g.element(i), g.zero(), 0.0);
    EXPECT_NEAR(r.worst_margin, 0.0, 1e-15);
    EXPECT_TRUE(r.passed);
  }
}

TEST(CheckRsd, DetectsViolation) {
  const auto z4 = FiniteAbelianGroup::parse("Z4");
  // chi(1) large relative to chi(0) and chi(2)
  const GroupFunction bad(z4, {1.0, 2.0, 0.1, 2.0});
  const auto r = check_rsd(bad, z4.element(1), z4.element(1), 1e-12);
  EXPECT_FALSE(r.passed);
  EXPECT_LT(r.worst_margin, 0.0);
}

TEST(Sweeps, RandomPushforwardsPass) {
  std::mt19937_64 rng(18);
  for (const char* spec : {"Z12", "Z2xZ4", "Z3xZ3"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    for (int dim = 1; dim <= 2; ++dim) {
      const auto chi = pushforward(random_hom(g, rng, dim)).chi;
      const auto rsd = sweep_rsd(chi, 1e-12);
      const auto mean = sweep_mean_ineq(chi, 1e-12);
      EXPECT_TRUE(rsd.passed) << spec << " " << rsd.witness << " " << rsd.worst_margin;
      EXPECT_TRUE(mean.passed) << spec << " " << mean.witness << " " << mean.worst_margin;
      EXPECT_EQ(rsd.count, g.order() * g.order());
      EXPECT_GE(mean.worst_margin, -1e-12);
    }
  }
}

TEST(CheckMeanIneq, EqualityAtZero) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const GroupFunction chi(z2, {1.0, 0.3});
  EXPECT_NEAR(check_mean_ineq(chi, z2.zero(), z2.zero(), 0.0).worst_margin, 0.0, 1e-15);
}

TEST(CheckConvolveEven, Cases) {
  const auto g = FiniteAbelianGroup::parse("Z8");
  const auto chi = pushforward(LatticeHom(Lattice::from_vectors({{0.5}}), g, {g.element(1)})).chi;
  const auto same = check_convolve_even(chi, delta(g) * 3.0, 1e-12);
  EXPECT_TRUE(same.passed);
  EXPECT_NEAR(same.worst_margin, 0.0, 1e-12);
  for (std::size_t k = 1; k < 8; ++k) {
    EXPECT_TRUE(check_convolve_even(chi, phi(g, g.element(k)), 1e-12).passed) << k;
  }
  EXPECT_THROW(check_convolve_even(chi, GroupFunction(g, {0, 1, 0, 0, 0, 0, 0, 0}), 1e-12), DomainError);
}
