#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "hirank/rng.hpp"

using namespace hirank;
using test::P;

TEST(Poly, EvalExamples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  EXPECT_EQ(P(F2, 2, "x0*x1").eval({1, 1}), 1u);
  EXPECT_EQ(P(F3, 2, "x0^2").eval({2, 1}), 1u);
  EXPECT_EQ(P(F3, 3, "x0*x1 + 2*x2^2").eval({1, 2, 1}), 1u);
  EXPECT_HIRANK_ERROR(P(F3, 3, "x0").eval({1, 2}), DimensionMismatch);
}

TEST(Poly, ParseExamples) {
  Field F3 = Field::make(3);
  Poly a = P(F3, 3, "x0*x1 + 2*x2^2");
  EXPECT_EQ(a.terms().size(), 2u);
  EXPECT_EQ(P(F3, 1, "x0^4").degree(), 4);
  EXPECT_HIRANK_ERROR(P(F3, 3, "x9"), UnknownVariable);
  EXPECT_HIRANK_ERROR(P(F3, 3, "x0 + * x1"), SyntaxError);
  EXPECT_EQ(P(F3, 2, "x0 − x1"), P(F3, 2, "x0 + 2*x1"));
  EXPECT_EQ(P(F3, 2, "-x0"), P(F3, 2, "2*x0"));
}

TEST(Poly, FormatRoundTrip) {
  Rng rng(7);
  for (auto [p, l] : {std::pair{3, 1}, std::pair{2, 2}, std::pair{5, 1}}) {
    Field F = Field::make(p, l);
    for (int t = 0; t < 50; ++t) {
      Poly A(F, 4);
      for (int k = 0; k < 5; ++k) {
        Exps e(4);
        for (auto& x : e) x = static_cast<uint16_t>(rng.below(3));
        A.add_term(e, static_cast<Elem>(rng.below(F.q())));
      }
      EXPECT_EQ(parse_poly(A.format(), 4, F), A) << A.format();
    }
  }
}

TEST(Poly, CompiledMatchesEval) {
  Field F = Field::make(2, 2);
  Poly A = P(F, 3, "[0,1]*x0^3*x1 + x2^2 + [1,1]");
  CompiledPoly c(A);
  Space S(F, 3);
  for (uint64_t i = 0; i < S.size(); ++i) EXPECT_EQ(c.eval(S.point(i)), A.eval(S.point(i)));
}

TEST(Poly, ComposeAffineMatchesEvaluation) {
  Field F = Field::make(5);
  Rng rng(3);
  Poly A = P(F, 3, "x0^2*x1 + 3*x1*x2 + x2 + 4");
  Mat M = random_invertible(F, 3, rng);
  Vec b = random_vec(F, 3, rng);
  Poly B = A.compose_affine(M, b);
  for (int t = 0; t < 30; ++t) {
    Vec y = random_vec(F, 3, rng);
    EXPECT_EQ(B.eval(y), A.eval(vadd(F, mat_vec(F, M, y), b)));
  }
}

TEST(SchmidtRank, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  EXPECT_EQ(schmidt_rank(P(F2, 2, "x0*x1")).rank, 1);
  EXPECT_EQ(schmidt_rank(P(F2, 4, "x0*x1 + x2*x3")).rank, 2);
  EXPECT_TRUE(schmidt_rank(P(F2, 4, "x0*x1 + x2*x3")).exact);
  EXPECT_EQ(schmidt_rank(P(F3, 1, "x0^2")).rank, 1);
}

// Oracle for the F_2 example: no product of two linear forms equals x0x1 + x2x3.
TEST(SchmidtRank, NoSingleProductOracle) {
  Field F = Field::make(2);
  Poly target = P(F, 4, "x0*x1 + x2*x3");
  Space S(F, 4);
  for (uint64_t a = 0; a < 32; ++a)
    for (uint64_t b = 0; b < 32; ++b) {
      Vec la(4), lb(4);
      for (int i = 0; i < 4; ++i) {
        la[i] = (a >> i) & 1;
        lb[i] = (b >> i) & 1;
      }
      Poly prod = Poly::linear(F, la, (a >> 4) & 1) * Poly::linear(F, lb, (b >> 4) & 1);
      EXPECT_NE(prod, target);
    }
}

TEST(SchmidtRank, ProductsHaveRankOne) {
  Field F = Field::make(3);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    Vec a = random_vec(F, 3, rng), b = random_vec(F, 3, rng);
    if (is_zero(a) || is_zero(b)) continue;
    Poly prod = Poly::linear(F, a) * Poly::linear(F, b);
    EXPECT_EQ(schmidt_rank(prod).rank, 1);
  }
}

TEST(SchmidtRank, InvariantUnderLinearChange) {
  Field F = Field::make(3);
  Rng rng(5);
  Poly A = P(F, 4, "x0*x1 + x2*x3");
  for (int t = 0; t < 3; ++t) {
    Mat M = random_invertible(F, 4, rng);
    EXPECT_EQ(schmidt_rank(A.compose_affine(M, Vec(4, 0))).rank, 2);
  }
}

// Rank of a quadratic over F_q is r minus the Witt index of its nondegenerate part,
// so ceil(r/2) except for elliptic forms of even r, where it is r/2 + 1. The oracle
// reads the type off the zero count q^{n-r}(q^{r-1} + eps (q-1) q^{r/2-1}).
TEST(SchmidtRank, MatchesWittIndexOracle) {
  int checked_elliptic = 0;
  for (int p : {3, 5}) {
    Field F = Field::make(p);
    Rng rng(p);
    for (int t = 0; t < 16; ++t) {
      int n = 2 + static_cast<int>(rng.below(3));
      Poly Q(F, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Exps e(n, 0);
          ++e[i];
          ++e[j];
          if (rng.below(2)) Q.add_term(e, static_cast<Elem>(rng.below(p)));
        }
      if (Q.is_zero()) continue;
      int r = classical_quadratic_rank(Q);
      int expected = (r + 1) / 2;
      if (r % 2 == 0) {
        Space S(F, n);
        int64_t zeros = 0;
        for (uint64_t i = 0; i < S.size(); ++i) zeros += Q.eval(S.point(i)) == 0;
        int64_t scale = static_cast<int64_t>(std::pow(p, n - r));
        int64_t base = static_cast<int64_t>(std::pow(p, r - 1));
        if (zeros / scale < base) {
          expected = r / 2 + 1;
          ++checked_elliptic;
        }
      }
      RankOptions opt;
      opt.search_bound = 2;
      auto res = schmidt_rank(Q, opt);
      if (expected <= 2) {
        EXPECT_EQ(res.rank, expected) << Q.format();
        EXPECT_TRUE(res.exact);
      } else {
        EXPECT_EQ(res.rank, 3) << Q.format();
        EXPECT_FALSE(res.exact);
      }
    }
  }
  EXPECT_GT(checked_elliptic, 0);
}

TEST(SchmidtRank, AnisotropicPlaneHasRankTwo) {
  Field F3 = Field::make(3);
  Poly Q = P(F3, 2, "x0^2 + x1^2");
  EXPECT_EQ(classical_quadratic_rank(Q), 2);
  EXPECT_EQ(schmidt_rank(Q).rank, 2);
}

TEST(FamilyRank, Examples) {
  Field F2 = Field::make(2);
  EXPECT_EQ(family_rank(test::family(F2, 4, {"x0*x1 + x2*x3"})).rank, 2);
  EXPECT_EQ(family_rank(test::family(F2, 2, {"x0*x1", "x0*x1"})).rank, 1);
  EXPECT_EQ(family_rank(test::family(F2, 4, {"x0*x1", "x2*x3"})).rank, 1);
}

TEST(ClassicalRank, Examples) {
  Field F3 = Field::make(3);
  EXPECT_EQ(classical_quadratic_rank(P(F3, 1, "x0^2")), 1);
  EXPECT_EQ(classical_quadratic_rank(P(F3, 2, "x0*x1")), 2);
  EXPECT_EQ(classical_quadratic_rank(P(F3, 2, "x0^2 + x0*x1 + x1^2")), 1);  // (x0 - x1)^2 mod 3
  EXPECT_HIRANK_ERROR(classical_quadratic_rank(P(Field::make(2), 2, "x0*x1")), CharTwo);
  EXPECT_HIRANK_ERROR(classical_quadratic_rank(P(F3, 2, "x0*x1 + x0")), NotQuadratic);
}

// Rank via the number of zeros: r = n - dim(radical) where the radical is {v : B(v, .) = 0}.
TEST(ClassicalRank, RadicalOracle) {
  Field F = Field::make(5);
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    int n = 3;
    Poly Q(F, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Exps e(n, 0);
        ++e[i];
        ++e[j];
        if (rng.below(3)) Q.add_term(e, static_cast<Elem>(rng.below(5)));
      }
    if (Q.is_zero()) continue;
    QuadraticFunction q = QuadraticFunction::from_poly(Q);
    Space S(F, n);
    uint64_t rad = 0;
    for (uint64_t i = 0; i < S.size(); ++i) rad += is_zero(q.pair_row(S.point(i)));
    int dim = 0;
    for (uint64_t pw = 1; pw < rad; pw *= 5) ++dim;
    EXPECT_EQ(classical_quadratic_rank(Q), n - dim);
  }
}

TEST(DegreeEstimate, Examples) {
  Field F3 = Field::make(3);
  EXPECT_EQ(variety_degree_estimate(test::family(F3, 3, {"x0*x1 - x2^2"}), 2, 9, 1).value, 2);
  EXPECT_EQ(variety_degree_estimate(test::family(F3, 3, {"x0 + x1"}), 2, 5, 1).value, 1);
  Field F7 = Field::make(7);
  EXPECT_EQ(variety_degree_estimate(test::family(F7, 4, {"x0^3 + x1^3 + x2^3 + x3^3"}), 2, 9, 2).value, 3);
}

// Every line in P^2 over F_9 not inside the conic meets it in <= 2 points, and the
// modal count over all lines (tangents excluded) is 2 up to multiplicity.
TEST(DegreeEstimate, ConicLinesOverF9) {
  Field F9 = Field::make(3, 2);
  Poly C = P(F9, 3, "x0*x1 - x2^2");
  Space S(F9, 3);
  std::map<int, int> hist;
  std::set<std::vector<Elem>> seen;
  for (uint64_t i = 1; i < S.size(); ++i) {
    Vec l = S.point(i);
    Elem lead = 0;
    for (Elem c : l)
      if (c) {
        lead = c;
        break;
      }
    l = vscale(F9, F9.inv(lead), l);
    if (!seen.insert(l).second) continue;
    std::set<std::vector<Elem>> pts;
    for (uint64_t j = 1; j < S.size(); ++j) {
      Vec x = S.point(j);
      if (dot(F9, l, x) != 0 || C.eval(x) != 0) continue;
      Elem ld = 0;
      for (Elem c : x)
        if (c) {
          ld = c;
          break;
        }
      pts.insert(vscale(F9, F9.inv(ld), x));
    }
    ++hist[static_cast<int>(pts.size())];
  }
  EXPECT_EQ(hist.size(), 3u);  // 0, 1 (tangent) and 2 points
  EXPECT_EQ(hist.rbegin()->first, 2);
}

TEST(IsFunctionOf, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  Poly Q = P(F3, 2, "x0*x1 + x1");
  EXPECT_TRUE(is_function_of(Q * Q, {Q}));
  EXPECT_FALSE(is_function_of(P(F2, 2, "x0"), {P(F2, 2, "x1")}));
  EXPECT_TRUE(is_function_of(P(F2, 4, "x0*x1 + x2*x3"), {P(F2, 4, "x0*x1"), P(F2, 4, "x2*x3")}));
  // adding members never flips true to false
  EXPECT_TRUE(is_function_of(Q * Q, {Q, P(F3, 2, "x0")}));
}

TEST(QuadraticFunction, PairingConsistency) {
  Field F = Field::make(7);
  Rng rng(1);
  Poly A = P(F, 4, "x0^2 + 3*x0*x1 + 5*x2*x3 + x3^2");
  QuadraticFunction Q = QuadraticFunction::from_poly(A);
  EXPECT_EQ(Q.to_poly(), A);
  for (int t = 0; t < 100; ++t) {
    Vec u = random_vec(F, 4, rng), v = random_vec(F, 4, rng);
    EXPECT_EQ(Q.pair(u, v), F.sub(F.sub(Q.eval(vadd(F, u, v)), Q.eval(u)), Q.eval(v)));
    EXPECT_EQ(Q.pair(u, v), Q.pair(v, u));
    EXPECT_EQ(Q.pair(v, v), F.mul(2, Q.eval(v)));
  }
}
