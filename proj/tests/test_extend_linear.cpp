#include "helpers.hpp"
#include "hirank/extend_linear.hpp"
#include "hirank/rng.hpp"

using namespace hirank;
using test::variety;

namespace {

Vec random_linear(const Field& F, int n, Rng& rng) {
  for (;;) {
    Vec l = random_vec(F, n, rng);
    if (!is_zero(l)) return l;
  }
}

FunctionTable linear_on(const Variety& X, const Vec& l, Elem c = 0) {
  const Field& F = X.field();
  return FunctionTable::restrict(X, [&](const Vec& x) { return F.add(dot(F, l, x), c); });
}

// f = x1 on {x0 = 0}, 0 on {x1 = 0}
FunctionTable two_hyperplane(const Variety& X) {
  return FunctionTable::restrict(X, [](const Vec& x) { return x[0] == 0 ? x[1] : Elem{0}; });
}

bool agrees_on(const ExtensionCertificate& c, const FunctionTable& f, const Variety& X) {
  for (auto idx : X.points())
    if (c.eval(X.field(), X.space().point(idx)) != f.at(idx)) return false;
  return true;
}

// Independent cube count over V^3.
std::pair<uint64_t, uint64_t> brute_square_fraction(const FunctionTable& f, const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  uint64_t total = 0, zero = 0;
  for (auto u : X.points())
    for (uint64_t a = 0; a < S.size(); ++a)
      for (uint64_t b = 0; b < S.size(); ++b) {
        Vec x = S.point(u), v1 = S.point(a), v2 = S.point(b);
        Vec p1 = vadd(F, x, v1), p2 = vadd(F, x, v2), p3 = vadd(F, p1, v2);
        if (!X.contains(p1) || !X.contains(p2) || !X.contains(p3)) continue;
        ++total;
        Elem s = F.sub(F.add(f.at(x), f.at(p3)), F.add(f.at(p1), f.at(p2)));
        zero += s == 0;
      }
  return {zero, total};
}

}  // namespace

TEST(AdditiveTriples, Examples) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 - x2^2 - x3^2"});
  EXPECT_TRUE(check_additive_triples(linear_on(X, {1, 2, 0, 1}), X).verdict);

  auto one = FunctionTable::restrict(X, [](const Vec&) { return Elem{1}; });
  auto r = check_additive_triples(one, X);
  EXPECT_FALSE(r.verdict);
  ASSERT_EQ(r.witness.size(), 2u);
  EXPECT_TRUE(is_zero(r.witness[0]));
  EXPECT_TRUE(is_zero(r.witness[1]));

  Variety H = variety(F3, 3, {"x0*x1"});
  EXPECT_EQ(H.count(), 15u);
  EXPECT_TRUE(check_additive_triples(two_hyperplane(H), H).verdict);
}

TEST(AdditiveTriples, Sampled) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 - x2^2 - x3^2"});
  auto one = FunctionTable::restrict(X, [](const Vec&) { return Elem{1}; });
  EXPECT_FALSE(check_additive_triples(one, X, Mode::sampled(2000, 3)).verdict);
  EXPECT_TRUE(check_additive_triples(linear_on(X, {0, 1, 1, 2}), X, Mode::sampled(2000, 3)).verdict);
}

TEST(SquareFraction, LinearIsOne) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0*x1 + x2*x3"});
  auto e = parallelogram_vanish_fraction(linear_on(X, {1, 1, 2, 0}), X);
  EXPECT_TRUE(e.exact);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
}

TEST(SquareFraction, CorruptedPointMatchesEnumeration) {
  Field F2 = Field::make(2);
  Variety X = variety(F2, 4, {"x0*x1 + x2*x3"});
  auto f = linear_on(X, {1, 0, 1, 1});
  uint64_t star = X.points()[3];
  f.set(star, F2.add(f.at(star), 1));
  auto [zero, total] = brute_square_fraction(f, X);
  auto e = parallelogram_vanish_fraction(f, X);
  EXPECT_EQ(e.samples, total);
  EXPECT_NEAR(e.value, static_cast<double>(zero) / static_cast<double>(total), 1e-12);
  // Squares through the corrupted point, counted with multiplicity over vertices.
  uint64_t through = 0;
  cubes(X, 2, Mode::exact(), [&](const Cube& c) {
    for (uint32_t m = 0; m < 4; ++m)
      if (X.space().index(c.vertex(F2, m)) == star) {
        ++through;
        break;
      }
    return true;
  });
  EXPECT_GE(e.value, 1.0 - 4.0 * static_cast<double>(through) / static_cast<double>(total));
  EXPECT_LT(e.value, 1.0);
}

TEST(SquareFraction, RandomTableNearOneOverQ) {
  Field F2 = Field::make(2);
  Variety X = variety(F2, 4, {"x0*x1 + x2*x3"});
  Rng rng(5);
  auto f = FunctionTable::restrict(X, [&](const Vec&) { return static_cast<Elem>(rng.below(2)); });
  auto exact = parallelogram_vanish_fraction(f, X);
  auto est = parallelogram_vanish_fraction(f, X, Mode::sampled(40000, 9));
  EXPECT_FALSE(est.exact);
  EXPECT_LE(std::abs(est.value - exact.value), est.half_width);
  EXPECT_GT(exact.value, 0.3);
  EXPECT_LT(exact.value, 0.8);
}

TEST(TestingCorrect, LinearUnchanged) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 + x2^2 + x3^2"});
  auto f = linear_on(X, {2, 1, 0, 1});
  auto c = testing_correct(f, X);
  EXPECT_TRUE(c.no_majority.empty());
  for (size_t k = 0; k < X.count(); ++k) {
    EXPECT_EQ(c.h.at(X.points()[k]), f.at(X.points()[k]));
    EXPECT_DOUBLE_EQ(c.margin[k], 1.0);
  }
}

TEST(TestingCorrect, RecoversCorruptedPoint) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 5, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2"});
  Vec l{1, 0, 2, 2, 1};
  auto clean = linear_on(X, l);
  auto f = clean;
  uint64_t star = X.points()[X.count() / 2];
  f.set(star, F3.add(f.at(star), 1));
  auto c = testing_correct(f, X);
  EXPECT_TRUE(c.no_majority.empty());
  for (auto idx : X.points()) EXPECT_EQ(c.h.at(idx), clean.at(idx));
}

TEST(TestingCorrect, SampledMatchesExactOnCleanInput) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 5, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2"});
  auto f = linear_on(X, {0, 1, 1, 2, 0});
  auto c = testing_correct(f, X, Mode::sampled(0, 4));
  EXPECT_TRUE(c.no_majority.empty());
  for (auto idx : X.points()) EXPECT_EQ(c.h.at(idx), f.at(idx));
}

TEST(TestingCorrect, RandomHasNoMajority) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0*x1 + x2*x3"});
  Rng rng(11);
  auto f = FunctionTable::restrict(X, [&](const Vec&) { return static_cast<Elem>(rng.below(3)); });
  auto c = testing_correct(f, X);
  EXPECT_GT(c.no_majority.size(), X.count() / 4) << c.no_majority.size() << " of " << X.count();
}

TEST(DifferenceSet, LinearAndHyperplane) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 - x2^2 - x3^2"});
  Vec l{1, 2, 0, 1};
  auto d = extend_difference_set(linear_on(X, l), X);
  for (uint64_t v = 0; v < X.space().size(); ++v)
    if (d.covered.test(v)) EXPECT_EQ(d.fV.at(v), dot(F3, l, X.space().point(v)));

  Variety H = variety(F3, 3, {"x2"});
  auto dh = extend_difference_set(linear_on(H, {1, 1, 0}), H);
  for (uint64_t v = 0; v < H.space().size(); ++v) {
    Vec x = H.space().point(v);
    EXPECT_EQ(dh.covered.test(v), x[2] == 0);
    EXPECT_EQ(dh.fV.at(v), x[2] == 0 ? F3.add(x[0], x[1]) : 0u);
  }
}

TEST(DifferenceSet, FullRankQuadricCoversV) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 5, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2"});
  const Space& S = X.space();
  // Oracle: X - X by direct enumeration.
  Bitset diff(S.size());
  for (auto a : X.points())
    for (auto b : X.points()) diff.set(S.index(vsub(F3, S.point(a), S.point(b))));
  auto d = extend_difference_set(linear_on(X, {1, 0, 0, 2, 1}), X);
  for (uint64_t v = 0; v < S.size(); ++v) {
    EXPECT_TRUE(diff.test(v));
    EXPECT_TRUE(d.covered.test(v));
  }
}

TEST(DifferenceSet, InconsistentRepresentations) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 - x2^2 - x3^2"});
  auto h = FunctionTable::restrict(X, [&](const Vec& x) { return F3.mul(x[0], x[0]); });
  EXPECT_HIRANK_ERROR(extend_difference_set(h, X), InconsistentRepresentations);
}

TEST(DifferenceSet, SampledAgreesWithExact) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 5, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2"});
  auto h = linear_on(X, {2, 2, 0, 1, 1});
  auto a = extend_difference_set(h, X);
  auto b = extend_difference_set(h, X, Mode::sampled(0, 7), 5);
  for (uint64_t v = 0; v < X.space().size(); ++v)
    if (b.covered.test(v)) EXPECT_EQ(a.fV.at(v), b.fV.at(v));
}

TEST(DecodeLinear, ExactAndPlanted) {
  Field F3 = Field::make(3);
  Space S(F3, 5);
  Vec l{2, 0, 1, 1, 2};
  auto fV = FunctionTable::on_space(S, [&](const Vec& x) { return dot(F3, l, x); });
  auto d = decode_linear(fV);
  EXPECT_EQ(d.g, l);
  EXPECT_EQ(d.constant, 0u);
  EXPECT_DOUBLE_EQ(d.agreement, 1.0);

  Rng rng(21);
  auto noisy = fV;
  for (uint64_t v = 0; v < S.size(); ++v)
    if (rng.uniform() < 0.05) noisy.set(v, static_cast<Elem>(rng.below(3)));
  auto dn = decode_linear(noisy);
  EXPECT_EQ(dn.g, l);
  EXPECT_GE(dn.agreement, 0.95);
}

TEST(DecodeLinear, MatchesCandidateEnumeration) {
  Field F2 = Field::make(2), F3 = Field::make(3);
  for (const Field& F : {F2, F3}) {
    Space S(F, F.q() == 2 ? 4 : 3);
    Rng rng(33 + F.q());
    for (int t = 0; t < 5; ++t) {
      auto fV = FunctionTable::on_space(S, [&](const Vec&) { return static_cast<Elem>(rng.below(F.q())); });
      uint64_t best = 0;
      Vec bg;
      Elem bc = 0;
      bool any = false;
      for (uint64_t gi = 0; gi < S.size(); ++gi)
        for (Elem c = 0; c < F.q(); ++c) {
          Vec g = S.point(gi);
          uint64_t a = 0;
          for (uint64_t v = 0; v < S.size(); ++v) a += F.add(dot(F, g, S.point(v)), c) == fV.at(v);
          if (!any || a > best) {
            best = a;
            bg = g;
            bc = c;
            any = true;
          }
        }
      auto d = decode_linear(fV);
      EXPECT_EQ(d.agree, best);
      EXPECT_EQ(d.g, bg);
      EXPECT_EQ(d.constant, bc);
      EXPECT_GE(d.agreement, 1.0 / F.q());
    }
  }
}

TEST(CandidateSearch, EnumerationAndLinearSystemAgree) {
  Field F3 = Field::make(3);
  Variety H = variety(F3, 3, {"x0*x1"});
  auto f = two_hyperplane(H);
  auto cs = affine_candidate_search(f, H);
  ASSERT_TRUE(cs.found);
  EXPECT_EQ(cs.g, (Vec{0, 1, 0}));
  Rng rng(2);
  auto bad = FunctionTable::restrict(H, [&](const Vec& x) { return x[0] == 0 ? F3.mul(x[1], x[2]) : Elem{0}; });
  auto cb = affine_candidate_search(bad, H);
  EXPECT_FALSE(cb.found);
  EXPECT_TRUE(cb.exhaustive);
  EXPECT_EQ(cb.eliminated, 81u);
  EXPECT_EQ(cb.refutations.size(), 81u);
}

TEST(ExtendLinear, RestrictionOnQuadric) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 6, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2 + x5^2"});
  Rng rng(1);
  Vec l = random_linear(F3, 6, rng);
  auto c = extend_weakly_linear(linear_on(X, l), X);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_TRUE(c.weakly_linear);
  EXPECT_EQ(c.g, l);
  EXPECT_EQ(c.constant, 0u);
}

TEST(ExtendLinear, ConstantTermRestored) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 - x2^2 - x3^2"});
  auto f = linear_on(X, {1, 2, 0, 0}, 2);
  auto c = extend_weakly_linear(f, X);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_EQ(c.constant, 2u);
  EXPECT_TRUE(agrees_on(c, f, X));
}

TEST(ExtendLinear, TwoHyperplaneFunctionIsGlobalLinear) {
  // f = x1 on {x0 = 0} and 0 on {x1 = 0} is the restriction of x1.
  Field F3 = Field::make(3);
  Variety H = variety(F3, 3, {"x0*x1"});
  auto f = two_hyperplane(H);
  EXPECT_TRUE(is_weakly_linear(f, H).verdict);
  auto c = extend_weakly_linear(f, H);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_EQ(c.g, (Vec{0, 1, 0}));
}

TEST(ExtendLinear, NotWeaklyLinearGivesPlaneWitness) {
  Field F3 = Field::make(3);
  Variety H = variety(F3, 3, {"x0*x1"});
  auto f = FunctionTable::restrict(H, [&](const Vec& x) { return x[0] == 0 ? F3.mul(x[1], x[1]) : Elem{0}; });
  auto c = extend_weakly_linear(f, H);
  EXPECT_EQ(c.status, ExtStatus::NotExtendable);
  EXPECT_EQ(c.witness_kind, "plane");
  ASSERT_EQ(c.witness.size(), 2u);
  EXPECT_FALSE(restriction_is_polynomial(f, c.witness, 1));
}

TEST(ExtendLinear, ThreeLinesTripleWitness) {
  // No planes inside X, so every function is weakly linear; additivity still fails.
  Field F3 = Field::make(3);
  Variety X = variety(F3, 2, {"x0^2*x1 - x0*x1^2"});
  auto f = FunctionTable::restrict(X, [&](const Vec& x) {
    if (x[1] == 0) return x[0];
    if (x[0] == 0) return x[1];
    return Elem{0};
  });
  auto c = extend_weakly_linear(f, X);
  EXPECT_TRUE(c.weakly_linear);
  EXPECT_EQ(c.status, ExtStatus::NotExtendable);
  EXPECT_EQ(c.witness_kind, "triple");
  const Vec& x = c.witness[0];
  const Vec& z = c.witness[1];
  EXPECT_NE(f.at(x), F3.add(f.at(z), f.at(vsub(F3, x, z))));

  LinearOptions forced;
  forced.force = true;
  auto cf = extend_weakly_linear(f, X, forced);
  EXPECT_EQ(cf.status, ExtStatus::NotExtendable);
  EXPECT_EQ(cf.witness_kind, "candidate_refutations");
  EXPECT_EQ(cf.witness.size(), 27u);
}

TEST(ExtendLinear, ForcedCorrectionRecoversLinear) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 6, {"x0^2 + x1^2 + x2^2 + x3^2 + x4^2 + x5^2"});
  Rng rng(8);
  Vec l = random_linear(F3, 6, rng);
  auto clean = linear_on(X, l);
  auto f = clean;
  uint64_t bad = 0;
  for (auto idx : X.points())
    if (idx != 0 && rng.uniform() < 0.01) {
      f.set(idx, F3.add(f.at(idx), 1 + static_cast<Elem>(rng.below(2))));
      ++bad;
    }
  ASSERT_GT(bad, 0u);
  EXPECT_FALSE(is_weakly_linear(f, X).verdict);
  auto plain = extend_weakly_linear(f, X);
  EXPECT_EQ(plain.status, ExtStatus::NotExtendable);

  LinearOptions opt;
  opt.force = true;
  auto c = extend_weakly_linear(f, X, opt);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_TRUE(c.forced);
  EXPECT_EQ(c.g, l);
  EXPECT_NEAR(c.corrected_fraction, 1.0 - static_cast<double>(bad) / static_cast<double>(X.count()), 1e-12);
}

TEST(ExtendLinear, SampledModeRestriction) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 6, {"x0^2 + x1^2 + x2^2 - x3^2 - x4^2 - x5^2"});
  Rng rng(3);
  Vec l = random_linear(F3, 6, rng);
  LinearOptions opt;
  opt.mode = Mode::sampled(300, 17);
  opt.reps = 4;
  auto c = extend_weakly_linear(linear_on(X, l), X, opt);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_EQ(c.g, l);
}

TEST(ExtendLinear, NonSpanningVarietyRestricts) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0*x1", "x3"});
  auto f = linear_on(X, {1, 2, 1, 0});
  auto c = extend_weakly_linear(f, X);
  EXPECT_EQ(c.status, ExtStatus::Extended);
  EXPECT_TRUE(agrees_on(c, f, X));
  EXPECT_EQ(c.g[3], 0u);
}

TEST(ExtendLinear, SoundnessOnRandomInputs) {
  // Extended must always come with g equal to f on X.
  Field F2 = Field::make(2);
  Variety X = variety(F2, 4, {"x0*x1 + x2*x3"});
  Rng rng(44);
  for (int t = 0; t < 10; ++t) {
    auto f = FunctionTable::restrict(X, [&](const Vec&) { return static_cast<Elem>(rng.below(2)); });
    auto c = extend_weakly_linear(f, X);
    if (c.status == ExtStatus::Extended) EXPECT_TRUE(agrees_on(c, f, X));
  }
}

TEST(ExtendLinear, CompletenessAtDeskScale) {
  Field F3 = Field::make(3);
  for (int n : {5, 6}) {
    std::string q;
    for (int i = 0; i < n; ++i) q += (i ? (i % 2 ? " - " : " + ") : "") + std::string("x") + std::to_string(i) + "^2";
    Variety X = variety(F3, n, {q});
    Rng rng(100 + n);
    for (int t = 0; t < 3; ++t) {
      Vec l = random_linear(F3, n, rng);
      auto c = extend_weakly_linear(linear_on(X, l), X);
      EXPECT_EQ(c.status, ExtStatus::Extended);
      EXPECT_EQ(c.g, l);
    }
  }
}

TEST(Property, SquaresWithEdgeInXVanish) {
  // Weakly linear f: f_2(x|v1,v2) = 0 whenever v1 is in X.
  Field F3 = Field::make(3);
  Variety H = variety(F3, 3, {"x0*x1"});
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    // f1 on {x0 = 0}, f2 on {x1 = 0}, agreeing on the common line.
    Elem a = static_cast<Elem>(rng.below(3)), b = static_cast<Elem>(rng.below(3));
    Elem c = static_cast<Elem>(rng.below(3));
    auto f = FunctionTable::restrict(H, [&](const Vec& x) {
      return x[0] == 0 ? F3.add(F3.mul(a, x[1]), F3.mul(b, x[2])) : F3.add(F3.mul(c, x[0]), F3.mul(b, x[2]));
    });
    ASSERT_TRUE(is_weakly_linear(f, H).verdict);
    cubes(H, 2, Mode::exact(), [&](const Cube& cu) {
      if (H.contains(cu.gens[0])) EXPECT_EQ(derivative_fm(f, cu), 0u);
      return true;
    });
  }
}

TEST(Property, SubtractionStep) {
  Field F3 = Field::make(3);
  Variety X = variety(F3, 4, {"x0^2 + x1^2 + x2^2 + x3^2"});
  Rng rng(12);
  const Space& S = X.space();
  for (int t = 0; t < 4; ++t) {
    Vec l = random_linear(F3, 4, rng), g = random_vec(F3, 4, rng);
    auto f = linear_on(X, l);
    for (auto xi : X.points())
      for (auto yi : X.points()) {
        Vec x = S.point(xi), y = S.point(yi), d = vsub(F3, x, y);
        if (!X.contains(d)) continue;
        if (dot(F3, g, y) == f.at(y) && dot(F3, g, d) == f.at(d)) EXPECT_EQ(dot(F3, g, x), f.at(x));
      }
  }
}
