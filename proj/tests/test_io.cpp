#include "hirank/io.hpp"

#include <random>

#include "helpers.hpp"

using namespace hirank;
using namespace hirank::test;

TEST(VarietySpec, ParsesAndEchoes) {
  auto s = parse_variety_spec(R"({"field": "3^2", "n": 3, "polynomials": ["x0*x1 + x2^2"]})");
  EXPECT_EQ(s.F.q(), 9u);
  EXPECT_EQ(s.n, 3);
  PolyFamily fam = s.family();
  ASSERT_EQ(fam.members.size(), 1u);
  Json j = variety_spec_json(fam);
  EXPECT_EQ(j["field"], "3^2");
  auto back = parse_variety_spec(j.dump()).family();
  EXPECT_EQ(back.members[0].format(), fam.members[0].format());
  // integer field is accepted too
  EXPECT_EQ(parse_variety_spec(R"({"field": 5, "n": 1, "polynomials": []})").F.q(), 5u);
}

TEST(VarietySpec, RejectsBadFields) {
  EXPECT_HIRANK_ERROR(parse_variety_spec("{"), ConfigError);
  EXPECT_HIRANK_ERROR(parse_variety_spec("[]"), ConfigError);
  EXPECT_HIRANK_ERROR(parse_variety_spec(R"({"n": 2, "polynomials": []})"), ConfigError);
  EXPECT_HIRANK_ERROR(parse_variety_spec(R"({"field": "3", "n": 0, "polynomials": []})"), ConfigError);
  EXPECT_HIRANK_ERROR(parse_variety_spec(R"({"field": "3", "n": 2, "polynomials": [1]})"), ConfigError);
  EXPECT_HIRANK_ERROR(parse_variety_spec(R"({"field": "4", "n": 2, "polynomials": []})"), NonPrime);
  auto s = parse_variety_spec(R"({"field": "3", "n": 2, "polynomials": ["x0 + x7"]})");
  EXPECT_HIRANK_ERROR(s.family(), ConfigError);
}

TEST(Csv, SplitRespectsBrackets) {
  auto c = split_csv_row(" [1, 2], 0 ,[0,1]");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], "[1, 2]");
  EXPECT_EQ(c[1], "0");
  EXPECT_EQ(c[2], "[0,1]");
  EXPECT_HIRANK_ERROR(split_csv_row("[1,2"), SyntaxError);
  EXPECT_HIRANK_ERROR(split_csv_row("1]"), SyntaxError);
}

TEST(Csv, RoundTripPrimeAndExtension) {
  for (const char* spec : {"5", "2^2", "3^2"}) {
    Field F = Field::parse_spec(spec);
    Variety X = variety(F, 3, {"x0*x1 + x2^2"});
    std::mt19937_64 rng(7);
    FunctionTable f(X.space());
    for (auto idx : X.points()) f.set(idx, static_cast<Elem>(rng() % F.q()));
    std::string text = function_csv(f);
    FunctionTable g = parse_function_csv(text, X.space());
    EXPECT_EQ(g.domain_size(), f.domain_size()) << spec;
    for (auto idx : X.points()) EXPECT_EQ(g.at(idx), f.at(idx)) << spec;
    EXPECT_EQ(function_csv(g), text);
  }
}

TEST(Csv, Errors) {
  Space S(Field::parse_spec("3"), 2);
  EXPECT_HIRANK_ERROR(parse_function_csv("0,0\n", S), DimensionMismatch);
  EXPECT_HIRANK_ERROR(parse_function_csv("0,0,1\n0,x,1\n", S), SyntaxError);
  EXPECT_HIRANK_ERROR(parse_function_csv("0,0,1\n0,0,2\n", S), ConfigError);
  // repeated identical rows, blank lines and CRLF are fine
  auto f = parse_function_csv("a,b,v\r\n0,0,1\r\n\r\n0,0,1\r\n2,1,0\r\n", S);
  EXPECT_EQ(f.domain_size(), 2u);
  EXPECT_EQ(f.at(S.index({2, 1})), 0u);
  // values are reduced mod p, as for polynomial coefficients
  EXPECT_EQ(parse_function_csv("1,1,4\n", S).at(S.index({1, 1})), 1u);
}

TEST(Json, ElementsAndQuadratics) {
  Field F9 = Field::parse_spec("3^2");
  Elem a = F9.parse("[1,2]");
  EXPECT_EQ(elem_json(F9, a), Json::parse("[1,2]"));
  Field F5 = Field::parse_spec("5");
  EXPECT_EQ(elem_json(F5, 3), Json(3));

  auto g = QuadraticFunction::from_poly(parse_poly("x0*x1 + 2*x1^2 + x0 + 3", 2, F5));
  Json j = quadratic_json(g);
  EXPECT_EQ(j["monomial_coefficients"], Json::parse("[[0,1],[0,2]]"));
  // x^T M x with M symmetric: off-diagonal is half the cross coefficient, 1/2 = 3 mod 5
  EXPECT_EQ(j["symmetric_matrix"], Json::parse("[[0,3],[3,2]]"));
  EXPECT_EQ(j["linear"], Json::parse("[1,0]"));
  EXPECT_EQ(j["constant"], Json(3));

  Field F2 = Field::parse_spec("2");
  auto h = QuadraticFunction::from_poly(parse_poly("x0*x1", 2, F2));
  EXPECT_FALSE(quadratic_json(h).contains("symmetric_matrix"));
}

TEST(Json, CertificatesAreStable) {
  Field F = Field::parse_spec("3");
  ExtensionCertificate c;
  c.status = ExtStatus::Extended;
  c.g = {1, 2};
  c.constant = 1;
  c.stats.push_back({"planes_checked", 4});
  Json j = certificate_json(c, F);
  EXPECT_EQ(j["kind"], "linear");
  EXPECT_EQ(j["g"]["linear"], Json::parse("[1,2]"));
  EXPECT_EQ(j["stats"]["planes_checked"], 4);
  EXPECT_EQ(j.dump(), certificate_json(c, F).dump());
  c.status = ExtStatus::NotExtendable;
  EXPECT_TRUE(certificate_json(c, F)["g"].is_null());
}

TEST(Files, ReadWriteAndMissing) {
  std::string path = ::testing::TempDir() + "hirank_io_test.json";
  write_file(path, R"({"field": "2", "n": 2, "polynomials": ["x0*x1"]})");
  EXPECT_EQ(load_variety_spec(path).n, 2);
  EXPECT_HIRANK_ERROR(read_file(path + ".missing"), IOError);
  EXPECT_HIRANK_ERROR(write_file("/nonexistent-dir/x", "y"), IOError);
}
