#include "helpers.hpp"
#include "hirank/rng.hpp"
#include "hirank/solve.hpp"

using namespace hirank;
using test::P;

namespace {

QuadraticFunction diag(const Field& F, int n, int r) {
  QuadraticFunction Q(F, n);
  for (int i = 0; i < r; ++i) Q.a(i, i) = 1;
  return Q;
}

Vec unit(int n, int i) {
  Vec v(n, 0);
  v[i] = 1;
  return v;
}

}  // namespace

TEST(ShiftedCount, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  auto r = shifted_zero_count(test::family(F2, 4, {"x0*x1 + x2*x3"}), {{0, 0, 0, 0}});
  EXPECT_EQ(r.count, 10u);
  auto r2 = shifted_zero_count(test::family(F3, 2, {"x0"}), {{0, 1}, {0, 2}});
  EXPECT_EQ(r2.count, 3u);
  EXPECT_HIRANK_ERROR(shifted_zero_count(test::family(F3, 2, {"x0"}), {{1, 1}}), BasepointNotOnVariety);
}

TEST(ShiftedCount, HomogeneousNeverEmpty) {
  Field F3 = Field::make(3);
  Rng rng(6);
  auto fam = test::family(F3, 4, {"x0^2 + x1*x2 - x3^2"});
  Variety X(fam);
  for (int t = 0; t < 20; ++t) {
    std::vector<Vec> base;
    for (int j = 0; j < 3; ++j) base.push_back(X.space().point(X.points()[rng.below(X.count())]));
    EXPECT_GE(shifted_zero_count(fam, base).count, 1u);
  }
}

TEST(Ax, Examples) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  auto fam = test::family(F3, 3, {"x0^2 + x1^2 + x2^2"});
  auto r = ax_nonzero_solution(fam, 1);
  EXPECT_FALSE(is_zero(r.point));
  EXPECT_TRUE(fam.contains(r.point));
  EXPECT_TRUE(r.precondition_met);
  auto r2 = ax_nonzero_solution(test::family(F2, 2, {"x0*x1"}), 1);
  EXPECT_FALSE(r2.precondition_met);
  EXPECT_FALSE(is_zero(r2.point));
  EXPECT_HIRANK_ERROR(ax_nonzero_solution(test::family(F3, 2, {"x0^2 + x1^2"}), 1, 100), NoSolutionFound);
}

TEST(DLarge, Examples) {
  Field F3 = Field::make(3);
  auto r = d_large_verify(test::family(F3, 4, {"x0*x1"}));
  EXPECT_EQ(r.projective_space, 40u);
  EXPECT_EQ(r.bound, 1u);
  EXPECT_TRUE(r.holds);
  auto r2 = d_large_verify(test::family(F3, 5, {"x0^2 + x1^2 + x2^2"}));
  EXPECT_EQ(r2.projective_space, 121u);
  // oracle: count zeros directly
  Space S(F3, 5);
  uint64_t z = 0;
  for (uint64_t i = 1; i < S.size(); ++i) {
    Vec x = S.point(i);
    z += F3.add(F3.add(F3.mul(x[0], x[0]), F3.mul(x[1], x[1])), F3.mul(x[2], x[2])) == 0;
  }
  EXPECT_EQ(r2.projective_count, z / 2);
  EXPECT_TRUE(r2.holds);
  auto r3 = d_large_verify(PolyFamily{F3, 3, {}});
  EXPECT_EQ(r3.projective_count, r3.projective_space);
}

TEST(AffineQuadric, Examples) {
  Field F3 = Field::make(3);
  auto Q = QuadraticFunction::from_poly(P(F3, 2, "x0*x1"));
  EXPECT_EQ(affine_quadric_solve(Q, {}, {0, 0}, 1), (Vec{1, 1}));
  auto Q2 = QuadraticFunction::from_poly(P(F3, 2, "x0^2"));
  EXPECT_HIRANK_ERROR(affine_quadric_solve(Q2, {{{1, 0}, 0}}, {0, 0}, 1), NoSolutionFound);
}

TEST(AffineQuadric, RandomFullRankAgainstExhaustiveScan) {
  Field F3 = Field::make(3);
  Rng rng(31);
  int found = 0, solvable = 0;
  for (int t = 0; t < 100; ++t) {
    QuadraticFunction Q = diag(F3, 6, 6).compose_affine(random_invertible(F3, 6, rng), Vec(6, 0));
    Vec x0 = random_vec(F3, 6, rng);
    std::vector<LinearConstraint> cons;
    for (int i = 0; i < 3; ++i) {
      Vec c = random_vec(F3, 6, rng);
      cons.push_back({c, dot(F3, c, x0)});
    }
    Elem a = static_cast<Elem>(rng.below(3));
    // oracle: scan V
    Space S(F3, 6);
    bool exists = false;
    for (uint64_t i = 0; i < S.size() && !exists; ++i) {
      Vec u = S.point(i);
      bool ok = Q.eval(u) == a;
      for (auto& c : cons) ok = ok && dot(F3, c.coeffs, u) == c.value;
      exists = ok;
    }
    solvable += exists;
    SolveOptions opt;
    opt.seed = t;
    opt.prefer_exhaustive = t % 2 == 0;
    auto u = try_affine_quadric_solve(Q, cons, Vec(6, 0), a, opt);
    EXPECT_EQ(u.has_value(), exists);
    if (u) {
      ++found;
      EXPECT_EQ(Q.eval(*u), a);
      for (auto& c : cons) EXPECT_EQ(dot(F3, c.coeffs, *u), c.value);
    }
  }
  EXPECT_EQ(found, solvable);
  EXPECT_GT(solvable, 80);
}

TEST(Gram, Examples) {
  Field F3 = Field::make(3);
  auto H = QuadraticFunction::from_poly(P(F3, 4, "x0*x1 + x2*x3"));
  Mat Z(1, 1);
  auto v = gram_realize(H, Z);
  EXPECT_EQ(H.eval(v[0]), 0u);
  auto Q = diag(F3, 13, 13);
  Mat D(2, 2);
  D.at(0, 0) = D.at(1, 1) = 1;
  auto w = gram_realize(Q, D);
  EXPECT_EQ(Q.eval(w[0]), 1u);
  EXPECT_EQ(Q.eval(w[1]), 1u);
  EXPECT_EQ(Q.pair(w[0], w[1]), 0u);
}

TEST(Gram, RandomTargetsRealizedExactly) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 13, 13);
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    Mat D(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) D.at(i, j) = D.at(j, i) = static_cast<Elem>(rng.below(3));
    SolveOptions opt;
    opt.seed = t;
    auto v = gram_realize(Q, D, opt);
    for (int i = 0; i < 6; ++i) {
      EXPECT_EQ(Q.eval(v[i]), D.at(i, i));
      for (int j = 0; j < i; ++j) EXPECT_EQ(Q.pair(v[i], v[j]), D.at(i, j));
    }
  }
}

TEST(SolArray, Examples) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 13, 13);
  CubeValues zero{};
  auto s = sol_array(Q, zero, zero, zero);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(Q.eval(s.z1[i]), 0u);
    EXPECT_EQ(Q.eval(s.z2[i]), 0u);
  }
  CubeValues bad{};
  bad[0] = 1;
  bad[1] = 2;
  EXPECT_HIRANK_ERROR(sol_array(Q, bad, zero, zero), PreconditionViolated);
}

TEST(SolArray, RandomAdmissible) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 13, 13);
  Rng rng(12);
  auto draw = [&]() {
    CubeValues a{};
    for (int w = 1; w < 7; ++w) a[w] = static_cast<Elem>(rng.below(3));
    Elem alt = 0;
    for (uint32_t w = 0; w < 7; ++w) alt = (__builtin_popcount(w) & 1) ? F3.sub(alt, a[w]) : F3.add(alt, a[w]);
    a[7] = alt;  // (-1)^3 a_7 + alt = 0
    return a;
  };
  for (int t = 0; t < 30; ++t) {
    CubeValues al = draw(), be = draw(), ga = draw();
    SolveOptions opt;
    opt.seed = t;
    auto s = sol_array(Q, al, be, ga, opt);
    for (uint32_t w = 0; w < 8; ++w) {
      Vec x(13, 0), y(13, 0);
      for (int i = 0; i < 3; ++i)
        if (w >> i & 1U) {
          x = vadd(F3, x, s.z1[i]);
          y = vadd(F3, y, s.z2[i]);
        }
      EXPECT_EQ(Q.eval(x), F3.neg(al[w]));
      EXPECT_EQ(Q.eval(y), F3.neg(be[w]));
      EXPECT_EQ(Q.eval(vadd(F3, x, y)), F3.neg(ga[w]));
    }
  }
}

TEST(Opposite, Examples) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 6, 6);
  Vec u = unit(6, 0), u1 = unit(6, 1), u2 = unit(6, 2);
  Vec y = opposite_face(Q, u, u1, u2, {});
  Vec yu = vadd(F3, y, u);
  // a = (1, 2, 2, 0), b = 0
  EXPECT_EQ(Q.eval(yu), 0u);
  EXPECT_EQ(Q.eval(vadd(F3, yu, u1)), 0u);
  EXPECT_EQ(Q.eval(vadd(F3, yu, u2)), 0u);
  EXPECT_EQ(Q.eval(vadd(F3, vadd(F3, yu, u1), u2)), 0u);
  OppositeMode m{true, 2, 2};
  Vec y2 = opposite_face(Q, u, u1, u2, m);
  EXPECT_EQ(Q.eval(vadd(F3, y2, u)), 2u);
  EXPECT_EQ(Q.eval(vadd(F3, vadd(F3, y2, u), u1)), 2u);
  EXPECT_HIRANK_ERROR(opposite_face(Q, u, u1, u1, {}), DegenerateSquare);
}

// Oracle for the first example: an exhaustive scan of F_3^6 finds some y.
TEST(Opposite, ExhaustiveOracleAgrees) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 6, 6);
  Vec u = unit(6, 0), u1 = unit(6, 1), u2 = unit(6, 2);
  Space S(F3, 6);
  uint64_t count = 0;
  for (uint64_t i = 0; i < S.size(); ++i) {
    Vec yu = vadd(F3, S.point(i), u);
    count += Q.eval(yu) == 0 && Q.eval(vadd(F3, yu, u1)) == 0 && Q.eval(vadd(F3, yu, u2)) == 0 &&
             Q.eval(vadd(F3, vadd(F3, yu, u1), u2)) == 0;
  }
  EXPECT_GT(count, 0u);
}

TEST(Opposite, RandomSquares) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 13, 13);
  Rng rng(19);
  for (int t = 0; t < 100; ++t) {
    Vec u = random_vec(F3, 13, rng), u1 = random_vec(F3, 13, rng), u2 = random_vec(F3, 13, rng);
    SolveOptions opt;
    opt.seed = t;
    OppositeMode m;
    if (t % 2) {
      Elem a00 = Q.eval(u), a10 = Q.eval(vadd(F3, u, u1)), a01 = Q.eval(vadd(F3, u, u2));
      Elem a11 = Q.eval(vadd(F3, vadd(F3, u, u1), u2));
      Elem b = F3.add(F3.sub(F3.sub(a00, a01), a10), a11);
      m.second = true;
      m.t = static_cast<Elem>(rng.below(3));
      m.s = F3.sub(m.t, b);
    }
    Vec y = opposite_face(Q, u, u1, u2, m, opt);
    Vec yu = vadd(F3, y, u);
    EXPECT_EQ(Q.eval(vadd(F3, yu, u2)), 0u);
    EXPECT_EQ(Q.eval(vadd(F3, vadd(F3, yu, u1), u2)), 0u);
  }
}

TEST(TwoSquares, Examples) {
  EXPECT_EQ(sum_two_squares(Field::make(3), 2), (std::pair<Elem, Elem>{1, 1}));
  EXPECT_EQ(sum_two_squares(Field::make(3), 0), (std::pair<Elem, Elem>{0, 0}));
  EXPECT_EQ(sum_two_squares(Field::make(7), 3), (std::pair<Elem, Elem>{1, 3}));
}

TEST(TwoSquares, AllOddPrimes) {
  for (int p = 3; p <= 101; ++p) {
    if (!is_prime(p)) continue;
    Field F = Field::make(p);
    for (Elem c = 0; c < F.q(); ++c) {
      auto [a, b] = sum_two_squares(F, c);
      ASSERT_EQ(F.add(F.mul(a, a), F.mul(b, b)), c);
    }
  }
  Field F4 = Field::make(2, 2);
  for (Elem c = 0; c < 4; ++c) {
    auto [a, b] = sum_two_squares(F4, c);
    EXPECT_EQ(F4.add(F4.mul(a, a), F4.mul(b, b)), c);
  }
}

TEST(CompleteCube, Examples) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 16, 16);
  Vec v0 = unit(16, 15);
  Vec v = vadd(F3, unit(16, 0), unit(16, 1));
  auto g = complete_cube_v0(Q, v0, v, 1, 1);
  for (uint32_t w = 1; w < 8; ++w) {
    Vec x = v;
    for (int i = 0; i < 3; ++i)
      if (w >> i & 1U) x = vadd(F3, x, g[i]);
    EXPECT_EQ(Q.eval(x), w == 1 ? 1u : w == 2 ? 1u : 0u);
  }
  for (auto& x : g) EXPECT_EQ(Q.pair(x, v0), 0u);
  EXPECT_HIRANK_ERROR(complete_cube_v0(Q, v0, v, 1, 2), PreconditionViolated);
  Vec iso = vadd(F3, vadd(F3, unit(16, 0), unit(16, 1)), unit(16, 2));
  auto g0 = complete_cube_v0(Q, v0, iso, 0, 0);
  EXPECT_EQ(Q.eval(vadd(F3, iso, g0[2])), 0u);
}

TEST(CompleteCube, LowRank) {
  Field F3 = Field::make(3);
  auto Q = diag(F3, 5, 3);
  Vec v0 = unit(5, 0);
  EXPECT_ANY_THROW(complete_cube_v0(Q, v0, unit(5, 1), 2, 2));
  try {
    complete_cube_v0(Q, v0, unit(5, 1), 2, 2);
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::RankTooLow || e.code() == ErrorCode::PreconditionViolated);
  }
}

TEST(EquiCount, MatchesEnumeration) {
  Field F3 = Field::make(3);
  auto Q = QuadraticFunction::from_poly(P(F3, 2, "x0^2 + 2*x1^2"));
  Space S(F3, 2);
  Rng rng(4);
  for (int t = 0; t < 6; ++t) {
    CubeValues a{};
    for (auto& x : a) x = static_cast<Elem>(rng.below(3));
    if (t == 0) a = CubeValues{};
    uint64_t oracle = 0;
    for (uint64_t u = 0; u < 9; ++u)
      for (uint64_t i = 0; i < 9; ++i)
        for (uint64_t j = 0; j < 9; ++j)
          for (uint64_t k = 0; k < 9; ++k) {
            Vec g[3] = {S.point(i), S.point(j), S.point(k)};
            bool ok = true;
            for (uint32_t w = 0; w < 8 && ok; ++w) {
              Vec x = S.point(u);
              for (int b = 0; b < 3; ++b)
                if (w >> b & 1U) x = vadd(F3, x, g[b]);
              ok = Q.eval(x) == a[w];
            }
            oracle += ok;
          }
    EXPECT_EQ(equi_count(Q, a).count, oracle);
  }
}
