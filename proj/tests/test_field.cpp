#include <complex>

#include "helpers.hpp"

using namespace hirank;

TEST(Field, PrimeFieldHasNoModulus) {
  Field F = Field::make(3, 1);
  EXPECT_EQ(F.q(), 3u);
  EXPECT_TRUE(F.modulus().empty());
}

TEST(Field, F4Modulus) {
  Field F = Field::make(2, 2);
  EXPECT_EQ(F.modulus(), (std::vector<int>{1, 1, 1}));
}

TEST(Field, SmallestModulusIsIrreducible) {
  // x^2 + 1 is reducible mod 5, x^2 + 2 is not
  EXPECT_EQ(Field::make(5, 2).modulus(), (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(Field::make(3, 2).modulus(), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(Field::make(2, 3).modulus(), (std::vector<int>{1, 1, 0, 1}));
}

TEST(Field, NonPrime) {
  EXPECT_HIRANK_ERROR(Field::make(4, 1), NonPrime);
  EXPECT_HIRANK_ERROR(Field::make(1, 1), NonPrime);
}

TEST(Field, OutOfRange) {
  EXPECT_HIRANK_ERROR(Field::make(103, 1), UnsupportedField);
  EXPECT_HIRANK_ERROR(Field::make(2, 4), UnsupportedField);
}

TEST(Field, SpecParsing) {
  EXPECT_EQ(Field::parse_spec("3").q(), 3u);
  EXPECT_EQ(Field::parse_spec("2^2").q(), 4u);
  EXPECT_EQ(Field::parse_spec("2^2").spec(), "2^2");
  EXPECT_ANY_THROW(Field::parse_spec("x"));
}

TEST(Field, TraceExamples) {
  EXPECT_EQ(Field::make(5).trace(3), 3);
  Field F4 = Field::make(2, 2);
  Elem g = F4.from_coeffs({0, 1});
  EXPECT_EQ(F4.trace(g), 1);
  EXPECT_EQ(F4.trace(0), 0);
}

TEST(Field, CharacterExamples) {
  Field F2 = Field::make(2);
  EXPECT_EQ(F2.char_eq(0).residue, 0);
  EXPECT_NEAR(std::abs(F2.char_eq(0).z - std::complex<double>(1, 0)), 0, 1e-12);
  EXPECT_NEAR(std::abs(F2.char_eq(1).z - std::complex<double>(-1, 0)), 0, 1e-12);
  Field F3 = Field::make(3);
  std::complex<double> s = 0;
  for (Elem a = 0; a < 3; ++a) s += F3.char_eq(a).z;
  EXPECT_LT(std::abs(s), 1e-12);
}

class FieldAxioms : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(FieldAxioms, Exhaustive) {
  auto [p, l] = GetParam();
  Field F = Field::make(p, l);
  uint32_t q = F.q();
  for (Elem a = 0; a < q; ++a) {
    EXPECT_EQ(F.add(a, F.neg(a)), 0u);
    if (a) EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
    for (Elem b = 0; b < q; ++b) {
      EXPECT_EQ(F.add(a, b), F.add(b, a));
      EXPECT_EQ(F.mul(a, b), F.mul(b, a));
      EXPECT_EQ(F.trace(F.add(a, b)), (F.trace(a) + F.trace(b)) % p);
      for (Elem c = 0; c < q; ++c) {
        ASSERT_EQ(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)));
        ASSERT_EQ(F.add(F.add(a, b), c), F.add(a, F.add(b, c)));
        ASSERT_EQ(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)));
      }
    }
  }
}

TEST_P(FieldAxioms, TraceIsFrobeniusSum) {
  auto [p, l] = GetParam();
  Field F = Field::make(p, l);
  for (Elem a = 0; a < F.q(); ++a) {
    Elem s = 0, x = a;
    for (int i = 0; i < l; ++i) {
      s = F.add(s, x);
      x = F.pow(x, p);
    }
    ASSERT_LT(s, static_cast<Elem>(p));  // lands in the prime subfield
    EXPECT_EQ(static_cast<int>(s), F.trace(a));
    for (Elem c = 0; c < static_cast<Elem>(p); ++c)
      EXPECT_EQ(F.trace(F.mul(c, a)), (c * F.trace(a)) % p);
  }
}

TEST_P(FieldAxioms, CharacterOrthogonality) {
  auto [p, l] = GetParam();
  Field F = Field::make(p, l);
  for (Elem c = 0; c < F.q(); ++c) {
    std::vector<int> hist(p, 0);
    for (Elem a = 0; a < F.q(); ++a) ++hist[F.char_eq(F.mul(c, a)).residue];
    if (c == 0) {
      EXPECT_EQ(hist[0], static_cast<int>(F.q()));
    } else {
      for (int r = 0; r < p; ++r) EXPECT_EQ(hist[r], static_cast<int>(F.q()) / p);
    }
  }
}

TEST_P(FieldAxioms, SqrtAndFormat) {
  auto [p, l] = GetParam();
  Field F = Field::make(p, l);
  for (Elem a = 0; a < F.q(); ++a) {
    int64_t r = F.sqrt(a);
    int64_t oracle = -1;
    for (Elem x = 0; x < F.q() && oracle < 0; ++x)
      if (F.mul(x, x) == a) oracle = x;
    EXPECT_EQ(r, oracle);
    EXPECT_EQ(F.parse(F.format(a)), a);
  }
}

INSTANTIATE_TEST_SUITE_P(Small, FieldAxioms,
                         ::testing::Values(std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{5, 1},
                                           std::pair{7, 1}, std::pair{2, 3}, std::pair{3, 2}, std::pair{11, 1},
                                           std::pair{5, 2}, std::pair{3, 3}, std::pair{7, 2}));

TEST(Field, LargeFieldsBuild) {
  Field F = Field::make(101, 3);
  EXPECT_EQ(F.q(), 1030301u);
  Elem a = 12345, b = 777777;
  EXPECT_EQ(F.div(F.mul(a, b), b), a);
  EXPECT_EQ(F.pow(a, F.q() - 1), 1u);
}
