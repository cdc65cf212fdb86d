#include <cmath>

#include "helpers.hpp"
#include "hirank/fourier.hpp"
#include "hirank/rng.hpp"

using namespace hirank;
using test::P;

namespace {

double brute_bias(const Poly& A) {
  const Field& F = A.field();
  Space S(F, A.n());
  std::complex<double> z = 0;
  for (uint64_t i = 0; i < S.size(); ++i) z += F.char_eq(A.eval(S.point(i))).z;
  return std::abs(z) / static_cast<double>(S.size());
}

Poly random_poly(const Field& F, int n, int deg, int terms, Rng& rng) {
  Poly A(F, n);
  for (int k = 0; k < terms; ++k) {
    Exps e(n, 0);
    int d = static_cast<int>(rng.below(deg + 1));
    for (int j = 0; j < d; ++j) ++e[rng.below(n)];
    A.add_term(e, static_cast<Elem>(rng.below(F.q())));
  }
  return A;
}

FunctionTable random_table(const Space& S, Rng& rng) {
  return FunctionTable::on_space(S, [&](const Vec&) { return static_cast<Elem>(rng.below(S.field().q())); });
}

}  // namespace

TEST(CycloInt, Canonical) {
  CycloInt a(3);
  a.c = {1, 1, 1};
  EXPECT_TRUE(a.is_integer());
  EXPECT_EQ(a.integer(), 0);
  CycloInt b(3);
  b.c = {2, 0, 1};
  EXPECT_FALSE(b.is_integer());
  EXPECT_NEAR(std::abs(b.value() - std::complex<double>(2 + std::cos(4 * M_PI / 3), std::sin(4 * M_PI / 3))), 0, 1e-12);
}

TEST(Bias, Examples) {
  Field F3 = Field::make(3);
  EXPECT_DOUBLE_EQ(bias(Poly(F3, 2)), 1.0);
  EXPECT_NEAR(bias(P(F3, 2, "x0 + 2*x1")), 0.0, 1e-12);
  EXPECT_NEAR(bias(P(F3, 1, "x0^2")), 1 / std::sqrt(3.0), 1e-12);
}

TEST(Bias, MatchesBruteForce) {
  Rng rng(21);
  for (auto [p, l] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{5, 1}}) {
    Field F = Field::make(p, l);
    for (int t = 0; t < 40; ++t) {
      Poly A = random_poly(F, 4, 3, 5, rng);
      EXPECT_NEAR(bias(A), brute_bias(A), 1e-9) << A.format();
    }
  }
}

TEST(Bias, ConstantAndLinearInvariance) {
  Field F = Field::make(5);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    Poly A = random_poly(F, 3, 3, 6, rng);
    double b = bias(A);
    EXPECT_NEAR(bias(A + Poly::constant(F, 3, 3)), b, 1e-9);
    Mat M = random_invertible(F, 3, rng);
    EXPECT_NEAR(bias(A.compose_affine(M, Vec(3, 0))), b, 1e-9);
  }
}

TEST(Bias, GaussSumLaw) {
  Rng rng(1);
  for (int q : {3, 5, 7, 11}) {
    Field F = Field::make(q);
    for (int r = 1; r <= 8; ++r) {
      Poly A(F, r);
      for (int i = 0; i < r; ++i) {
        Exps e(r, 0);
        e[i] = 2;
        A.add_term(e, static_cast<Elem>(1 + rng.below(q - 1)));
      }
      EXPECT_NEAR(bias(A), std::pow(q, -r / 2.0), 1e-9);
    }
  }
}

TEST(Bias, SampledCoversExact) {
  Field F = Field::make(3);
  Poly A = P(F, 2, "x0^2 + x1^2");
  auto e = bias_sampled(A, 20000, 9);
  EXPECT_LE(e.lo(), bias(A));
  EXPECT_GE(e.hi(), bias(A));
}

TEST(ExpSum, IntegerForSymmetricSums) {
  Field F = Field::make(3);
  // sum over x of zeta^{x0^2 + x1^2} = (i sqrt 3)^2 = -3
  CycloInt s = exp_sum(P(F, 2, "x0^2 + x1^2"));
  EXPECT_TRUE(s.is_integer());
  EXPECT_EQ(s.integer(), -3);
}

TEST(U2, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  Space S(F3, 2);
  EXPECT_NEAR(u2_norm(FunctionTable::on_space(S, [&](const Vec& x) { return F3.add(x[0], x[1]); })), 1.0, 1e-12);
  EXPECT_NEAR(u2_norm(FunctionTable::on_space(S, [](const Vec&) { return Elem{0}; })), 1.0, 1e-12);
  Space S2(F2, 2);
  auto f = FunctionTable::on_space(S2, [&](const Vec& x) { return F2.mul(x[0], x[1]); });
  EXPECT_NEAR(u2_norm(f), std::pow(2.0, -0.5), 1e-12);
  EXPECT_NEAR(u2_norm_naive(f), std::pow(2.0, -0.5), 1e-12);
}

TEST(U2, FoldedEqualsNaiveExactly) {
  Rng rng(3);
  for (auto [p, l, n] : {std::tuple{2, 1, 3}, std::tuple{3, 1, 2}, std::tuple{2, 2, 2}, std::tuple{5, 1, 2},
                         std::tuple{3, 1, 3}}) {
    Field F = Field::make(p, l);
    Space S(F, n);
    for (int t = 0; t < 5; ++t) {
      auto f = random_table(S, rng);
      EXPECT_EQ(u2_sum_folded(f).c, u2_sum_naive(f).c);
      EXPECT_NEAR(u2_norm(f), u2_norm_naive(f), 1e-10);
    }
  }
}

TEST(GowersCS, Examples) {
  Field F3 = Field::make(3);
  Space S(F3, 2);
  auto zero = FunctionTable::on_space(S, [](const Vec&) { return Elem{0}; });
  auto r = gowers_cs_verify(zero, zero, zero, zero);
  EXPECT_NEAR(r.lhs, 1, 1e-12);
  EXPECT_NEAR(r.rhs, 1, 1e-12);
  EXPECT_TRUE(r.holds);
  auto l = [&](Elem s) {
    return FunctionTable::on_space(S, [&, s](const Vec& x) { return F3.mul(s, F3.add(x[0], F3.mul(2, x[1]))); });
  };
  auto r2 = gowers_cs_verify(l(1), l(2), l(2), l(1));
  EXPECT_NEAR(r2.lhs, 1, 1e-12);
  EXPECT_NEAR(r2.rhs, 1, 1e-12);
}

TEST(GowersCS, RandomDrawsAndNaive) {
  Rng rng(100);
  Field F2 = Field::make(2);
  Space S(F2, 3);
  for (int t = 0; t < 100; ++t) {
    auto a = random_table(S, rng), b = random_table(S, rng), c = random_table(S, rng), d = random_table(S, rng);
    auto r = gowers_cs_verify(a, b, c, d);
    EXPECT_TRUE(r.holds);
    if (t < 10) EXPECT_NEAR(r.lhs, gowers_inner_naive(a, b, c, d), 1e-10);
  }
}

TEST(Counting, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  EXPECT_EQ(count_via_characters(F2, 4, {P(F2, 4, "x0*x1 + x2*x3")}, {}, {0}), 10u);
  EXPECT_EQ(count_via_characters(F3, 3, {}, {}, {}), 27u);
  EXPECT_EQ(count_via_characters(F3, 2, {P(F3, 2, "x0"), P(F3, 2, "x0")}, {}, {0, 1}), 0u);
}

TEST(Counting, MatchesEnumeration) {
  Rng rng(55);
  for (int t = 0; t < 120; ++t) {
    Field F = Field::make(t % 2 ? 3 : 2);
    int n = 2 + static_cast<int>(rng.below(4));
    int M = 1 + static_cast<int>(rng.below(3));
    std::vector<Poly> polys;
    std::vector<Vec> shifts;
    std::vector<Elem> targets;
    for (int i = 0; i < M; ++i) {
      polys.push_back(random_poly(F, n, 3, 4, rng));
      shifts.push_back(random_vec(F, n, rng));
      targets.push_back(static_cast<Elem>(rng.below(F.q())));
    }
    EXPECT_EQ(count_via_characters(F, n, polys, shifts, targets), count_by_enumeration(F, n, polys, shifts, targets));
  }
}

TEST(LinearCorrelation, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  auto r = best_linear_correlation(P(F3, 2, "x0 + 2*x1 + 1"));
  EXPECT_EQ(r.ell, (Vec{2, 1}));
  EXPECT_NEAR(r.bias, 1.0, 1e-12);
  auto r2 = best_linear_correlation(P(F3, 1, "x0^2"));
  EXPECT_GE(r2.bias, 1 / std::sqrt(3.0) - 1e-12);
  auto r3 = best_linear_correlation(P(F2, 4, "x0*x1"));
  EXPECT_NEAR(r3.bias, 0.5, 1e-12);
  EXPECT_EQ(r3.ell, (Vec{0, 0, 0, 0}));
}

TEST(Scan, QuadraticBucketsAndDecay) {
  Field F3 = Field::make(3);
  auto rows = bias_rank_scan(2, F3, {4}, 5, 1, 2);
  ASSERT_FALSE(rows.empty());
  for (auto& r : rows)
    if (r.rank_bucket == 0) EXPECT_DOUBLE_EQ(r.value, 1.0);
  double prev = 2;
  for (auto& r : rows)
    if (r.statistic == "max_bias") {
      EXPECT_LT(r.value, prev);
      prev = r.value;
    }
}

TEST(Scan, CubicOverF2) {
  Field F2 = Field::make(2);
  auto rows = bias_rank_scan(3, F2, {6}, 20, 3, 3);
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_DOUBLE_EQ(rows[0].value, 1.0);
}
