#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cayleyheat/errors.hpp"
#include "cayleyheat/group.hpp"

using namespace cayleyheat;

namespace {

GroupFunction random_function(const FiniteAbelianGroup& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GroupFunction f(g);
  for (std::size_t i = 0; i < g.order(); ++i) f[i] = u(rng);
  return f;
}

GroupFunction random_even_nonneg(const FiniteAbelianGroup& g, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  GroupFunction f(g);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const std::size_t j = g.neg_index(i);
    if (j < i) continue;
    f[i] = f[j] = u(rng);
  }
  return f;
}

// O(|G|^2) reference convolution written against the element API.
GroupFunction brute_convolve(const GroupFunction& f, const GroupFunction& h) {
  const auto& g = f.group();
  GroupFunction out(g);
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y) {
      const GroupElement diff = g.add(g.element(x), g.negate(g.element(y)));
      out[x] += f[y] * h.at(diff);
    }
  return out;
}

}  // namespace

TEST(Group, ParseAndOrder) {
  const auto g = FiniteAbelianGroup::parse("Z12xZ2");
  EXPECT_EQ(g.order(), 24u);
  EXPECT_EQ(g.rank(), 2u);
  EXPECT_EQ(g.to_string(), "Z12xZ2");
  EXPECT_EQ(FiniteAbelianGroup::parse(" z3 x Z4 ").order(), 12u);
  EXPECT_THROW(FiniteAbelianGroup::parse("Z0"), Error);
  EXPECT_THROW(FiniteAbelianGroup::parse("Q8"), Error);
  EXPECT_THROW(FiniteAbelianGroup::parse("Z4096xZ2"), Error);
}

TEST(Group, AdditionExamples) {
  const auto z6 = FiniteAbelianGroup::parse("Z6");
  EXPECT_EQ(z6.add(z6.element(4), z6.element(5)), z6.element(3));
  const auto g = FiniteAbelianGroup::parse("Z2xZ3");
  const GroupElement a{{1, 2}};
  EXPECT_EQ(g.add(a, a), (GroupElement{{0, 1}}));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto x = g.element(rng() % g.order());
    EXPECT_EQ(g.add(x, g.zero()), x);
  }
}

TEST(Group, IndexingRoundTrip) {
  const auto g = FiniteAbelianGroup::parse("Z3xZ4xZ2");
  for (std::size_t i = 0; i < g.order(); ++i) {
    EXPECT_EQ(g.index_of(g.element(i)), i);
    EXPECT_EQ(g.add_index(i, g.neg_index(i)), 0u);
    for (std::size_t j = 0; j < g.order(); ++j) {
      EXPECT_EQ(g.add_index(i, j), g.index_of(g.add(g.element(i), g.element(j))));
      EXPECT_EQ(g.add_index(g.sub_index(i, j), j), i);
    }
  }
  // last factor varies fastest
  EXPECT_EQ(g.element(1), (GroupElement{{0, 0, 1}}));
}

TEST(Group, MismatchedElementsThrow) {
  const auto g = FiniteAbelianGroup::parse("Z4");
  EXPECT_THROW(g.add(GroupElement{{1, 0}}, g.zero()), StructuralError);
  EXPECT_THROW(g.add(GroupElement{{5}}, g.zero()), StructuralError);
}

TEST(GroupFunctionOps, BinaryOpsRequireSameGroup) {
  GroupFunction a(FiniteAbelianGroup::parse("Z4"));
  GroupFunction b(FiniteAbelianGroup::parse("Z2xZ2"));
  EXPECT_THROW(a += b, StructuralError);
  EXPECT_THROW(convolve(a, b), StructuralError);
}

TEST(Delta, Definition) {
  const auto g = FiniteAbelianGroup::parse("Z4");
  EXPECT_EQ(delta(g).values(), (std::vector<double>{1, 0, 0, 0}));
  const auto s = dft(delta(FiniteAbelianGroup::parse("Z3xZ2")));
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(std::abs(s[k] - 1.0), 0.0, 1e-15);
}

TEST(Phi, Definition) {
  EXPECT_EQ(phi(FiniteAbelianGroup::parse("Z5"), GroupElement{{1}}).values(),
            (std::vector<double>{0, 1, 0, 0, 1}));
  EXPECT_EQ(phi(FiniteAbelianGroup::parse("Z4"), GroupElement{{2}}).values(),
            (std::vector<double>{0, 0, 2, 0}));
  const auto k4 = FiniteAbelianGroup::parse("Z2xZ2");
  const auto p = phi(k4, GroupElement{{1, 0}});
  EXPECT_EQ(p.at(GroupElement{{1, 0}}), 2.0);
  EXPECT_EQ(p.sum(), 2.0);
}

TEST(Dft, Examples) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const auto s = dft(GroupFunction(z2, {0.0, 1.0}));
  EXPECT_NEAR(s[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(s[1].real(), -1.0, 1e-15);

  const auto z3 = FiniteAbelianGroup::parse("Z3");
  const auto c = idft(SpectrumFunction(z3, {3.0, 0.0, 0.0}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c[i], 1.0, 1e-15);

  const auto g = FiniteAbelianGroup::parse("Z4xZ3");
  EXPECT_LT(max_abs_diff(idft(SpectrumFunction(g, std::vector<std::complex<double>>(12, 1.0))), delta(g)),
            1e-15);
}

TEST(Dft, RoundTripRandom) {
  std::mt19937_64 rng(2);
  for (const char* spec : {"Z7", "Z6xZ4", "Z2xZ2xZ3", "Z16x Z16"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    const auto f = random_function(g, rng);
    EXPECT_LT(max_abs_diff(idft(dft(f)), f), 1e-12) << spec;
  }
}

TEST(Dft, EvenFunctionsHaveRealSpectrum) {
  std::mt19937_64 rng(3);
  const auto g = FiniteAbelianGroup::parse("Z5xZ4");
  const auto s = dft(random_even_nonneg(g, rng, 1.0));
  EXPECT_LT(s.max_imag(), 1e-13);
}

TEST(Idft, RejectsNonHermitianSpectrum) {
  const auto z3 = FiniteAbelianGroup::parse("Z3");
  EXPECT_THROW(idft(SpectrumFunction(z3, {0.0, {0.0, 1.0}, 0.0})), NumericalError);
}

TEST(Convolve, Examples) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  const GroupFunction a(z2, {2.0, 3.0}), b(z2, {5.0, 7.0});
  for (auto m : {ConvolutionMethod::direct, ConvolutionMethod::spectral}) {
    const auto c = convolve(a, b, m);
    EXPECT_NEAR(c[0], 2 * 5 + 3 * 7, 1e-12);
    EXPECT_NEAR(c[1], 2 * 7 + 3 * 5, 1e-12);
  }
  std::mt19937_64 rng(4);
  const auto g = FiniteAbelianGroup::parse("Z3xZ4");
  const auto f = random_function(g, rng);
  EXPECT_LT(max_abs_diff(convolve(delta(g), f), f), 1e-15);
}

TEST(Convolve, MethodsAgreeWithBruteForce) {
  std::mt19937_64 rng(5);
  for (const char* spec : {"Z12", "Z2xZ6", "Z3xZ3xZ2"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    const auto f = random_function(g, rng), h = random_function(g, rng);
    const auto ref = brute_convolve(f, h);
    EXPECT_LT(max_abs_diff(convolve(f, h, ConvolutionMethod::direct), ref), 1e-12) << spec;
    EXPECT_LT(max_abs_diff(convolve(f, h, ConvolutionMethod::spectral), ref), 1e-10) << spec;
  }
}

TEST(Convolve, CommutativeAndAssociative) {
  std::mt19937_64 rng(6);
  const auto g = FiniteAbelianGroup::parse("Z4xZ5");
  for (int k = 0; k < 10; ++k) {
    const auto a = random_function(g, rng), b = random_function(g, rng), c = random_function(g, rng);
    EXPECT_LT(max_abs_diff(convolve(a, b), convolve(b, a)), 1e-10);
    EXPECT_LT(max_abs_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))), 1e-10);
  }
}

TEST(Multiply, Pointwise) {
  const auto g = FiniteAbelianGroup::parse("Z3");
  const auto p = multiply(GroupFunction(g, {1, 2, 3}), GroupFunction(g, {4, 5, 6}));
  EXPECT_EQ(p.values(), (std::vector<double>{4, 10, 18}));
}

TEST(Cexp, ZeroIsDelta) {
  const auto g = FiniteAbelianGroup::parse("Z3xZ2");
  EXPECT_LT(max_abs_diff(cexp_series(GroupFunction(g)), delta(g)), 1e-15);
  EXPECT_LT(max_abs_diff(cexp_spectral(GroupFunction(g)), delta(g)), 1e-15);
}

TEST(Cexp, TwoPointClosedForm) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  for (double s : {0.1, 1.0, 3.0, 10.0}) {
    const GroupFunction u(z2, {0.0, s});
    for (const auto& e : {cexp_series(u), cexp_spectral(u)}) {
      EXPECT_NEAR(e[0] / std::cosh(s), 1.0, 1e-12) << s;
      EXPECT_NEAR(e[1] / std::sinh(s), 1.0, 1e-12) << s;
    }
  }
}

TEST(Cexp, CycleCentralValue) {
  const auto z3 = FiniteAbelianGroup::parse("Z3");
  for (double t : {0.3, 1.0, 2.5}) {
    const GroupFunction u(z3, {0.0, t, t});
    const double expected = (std::exp(2 * t) + 2 * std::exp(-t)) / 3.0;
    EXPECT_NEAR(cexp_spectral(u)[0] / expected, 1.0, 1e-12);
    EXPECT_NEAR(cexp_series(u)[0] / expected, 1.0, 1e-12);
  }
}

TEST(Cexp, SeriesMatchesSpectralAndIsHomomorphism) {
  std::mt19937_64 rng(7);
  for (const char* spec : {"Z8", "Z3xZ4", "Z2xZ2xZ2"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    for (int k = 0; k < 10; ++k) {
      const auto a = random_even_nonneg(g, rng, 0.6), b = random_even_nonneg(g, rng, 0.6);
      const auto ea = cexp_series(a);
      EXPECT_LT(max_abs_diff(ea, cexp_spectral(a)) / ea.sup_norm(), 1e-9);
      const auto lhs = cexp_series(a + b);
      EXPECT_LT(max_abs_diff(lhs, convolve(ea, cexp_series(b))) / lhs.sup_norm(), 1e-9);
    }
  }
}

TEST(Cexp, LargeArgumentConverges) {
  const auto z2 = FiniteAbelianGroup::parse("Z2");
  EXPECT_NO_THROW(cexp_series(GroupFunction(z2, {0.0, 50.0})));
}

TEST(PhiBasis, Examples) {
  const auto z4 = FiniteAbelianGroup::parse("Z4");
  const auto terms = phi_basis_decompose(GroupFunction(z4, {0, 3, 5, 3}));
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_DOUBLE_EQ(terms[0].alpha, 3.0);
  EXPECT_EQ(terms[0].g0, (GroupElement{{1}}));
  EXPECT_DOUBLE_EQ(terms[1].alpha, 2.5);
  EXPECT_EQ(terms[1].g0, (GroupElement{{2}}));

  const auto z7 = FiniteAbelianGroup::parse("Z7");
  const auto one = phi_basis_decompose(phi(z7, GroupElement{{3}}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].alpha, 1.0);
  EXPECT_EQ(one[0].g0, (GroupElement{{3}}));
}

TEST(PhiBasis, RoundTripRandom) {
  std::mt19937_64 rng(8);
  for (const char* spec : {"Z9", "Z4xZ2", "Z2xZ2xZ3"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    const auto u = random_even_nonneg(g, rng, 2.0);
    EXPECT_LT(max_abs_diff(phi_basis_compose(g, phi_basis_decompose(u)), u), 1e-14) << spec;
  }
}

TEST(PhiBasis, RejectsOddInput) {
  const auto z4 = FiniteAbelianGroup::parse("Z4");
  EXPECT_THROW(phi_basis_decompose(GroupFunction(z4, {0, 1, 0, 2})), DomainError);
}
