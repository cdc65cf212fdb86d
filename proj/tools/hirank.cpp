#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <regex>

#include "hirank/acceptance.hpp"
#include "hirank/errors.hpp"
#include "hirank/extend_linear.hpp"
#include "hirank/extend_quadratic.hpp"
#include "hirank/fourier.hpp"
#include "hirank/io.hpp"
#include "hirank/solve.hpp"

using namespace hirank;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 64;
constexpr int kExitBudget = 65;
constexpr int kExitError = 1;

// Raised for command-line problems found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output;
  bool timings = false;
  bool pretty = true;
};

struct SampleFlags {
  bool exact = false;
  uint64_t samples = 0;
  uint64_t seed = 0;
  double confidence = 0.95;

  Mode mode() const {
    if (exact || samples == 0) return Mode::exact();
    return Mode::sampled(samples, seed, confidence);
  }
  Json echo() const {
    if (exact || samples == 0) return {{"mode", "exact"}};
    return {{"mode", "sampled"}, {"samples", samples}, {"seed", seed}, {"confidence", confidence}};
  }
};

void add_sample_flags(CLI::App* c, SampleFlags& s) {
  auto* ex = c->add_flag("--exact", s.exact, "exhaustive computation (default when --samples is absent)");
  c->add_option("--samples", s.samples, "number of random draws; switches to sampled mode")->excludes(ex);
  c->add_option("--seed", s.seed, "seed for sampled mode")->default_val(0);
  c->add_option("--confidence", s.confidence, "confidence level of reported intervals")
      ->default_val(0.95)
      ->check(CLI::Range(0.5, 0.999999));
}

int infer_n(const std::vector<std::string>& polys) {
  static const std::regex var("x\\s*(\\d+)");
  int n = 0;
  for (auto& p : polys)
    for (std::sregex_iterator it(p.begin(), p.end(), var), end; it != end; ++it)
      n = std::max(n, std::stoi((*it)[1]) + 1);
  return std::max(n, 1);
}

PolyFamily family_from_flags(const std::string& field, int n, const std::vector<std::string>& polys) {
  Field F = Field::parse_spec(field);
  PolyFamily fam{F, n > 0 ? n : infer_n(polys), {}};
  for (size_t i = 0; i < polys.size(); ++i) {
    try {
      fam.members.push_back(parse_poly(polys[i], fam.n, F));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "--poly[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return fam;
}

Json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    fail(ErrorCode::ConfigError, what + ": not valid JSON");
  }
}

Elem elem_from_json(const Field& F, const Json& j, const std::string& what) {
  if (j.is_number_integer()) return F.parse(std::to_string(j.get<int64_t>()));
  if (j.is_array()) return F.parse(j.dump());
  if (j.is_string()) return F.parse(j.get<std::string>());
  fail(ErrorCode::ConfigError, what + ": expected a field element");
}

Vec vec_from_json(const Field& F, const Json& j, int n, const std::string& what) {
  if (!j.is_array()) fail(ErrorCode::ConfigError, what + ": expected an array");
  if (static_cast<int>(j.size()) != n)
    fail(ErrorCode::DimensionMismatch, what + ": expected " + std::to_string(n) + " entries");
  Vec v;
  for (size_t i = 0; i < j.size(); ++i) v.push_back(elem_from_json(F, j[i], what + "[" + std::to_string(i) + "]"));
  return v;
}

Vec vec_arg(const Field& F, const std::string& text, int n, const std::string& what) {
  return vec_from_json(F, parse_json_arg(text, what), n, what);
}

QuadraticFunction quadric_of(const PolyFamily& fam) {
  if (fam.members.size() != 1) fail(ErrorCode::ConfigError, "expected exactly one quadratic polynomial");
  if (fam.members[0].degree() > 2) fail(ErrorCode::NotQuadratic, "polynomial has degree > 2");
  auto Q = QuadraticFunction::from_poly(fam.members[0]);
  if (!Q.homogeneous()) fail(ErrorCode::NotQuadratic, "quadric must be homogeneous");
  return Q;
}

void emit(const Common& c, const std::string& command, const Json& config, const Json& result, double seconds) {
  Json rec;
  rec["command"] = command;
  rec["version"] = kVersion;
  rec["config"] = config;
  rec["result"] = result;
  if (c.timings) rec["timings"] = {{"wall_seconds", seconds}};
  std::string text = rec.dump(c.pretty ? 2 : -1) + "\n";
  if (c.output.empty())
    std::cout << text;
  else
    write_file(c.output, text);
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownVariable:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IOError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonPrime:
    case ErrorCode::UnsupportedField:
      return kExitConfig;
    case ErrorCode::BudgetExceeded:
      return kExitBudget;
    default:
      return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hirank: functions on high-rank varieties over finite fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common common;
  std::string budget;
  app.add_option("-o,--output", common.output, "write the JSON record to this file instead of stdout");
  app.add_flag("--timings", common.timings, "include wall-clock timings in the record");
  app.add_option("--budget", budget,
                 "budget such as 2^26 or 1000000; sets HIRANK_BUDGET, which replaces both the enumeration budget (default 2^26) and the triple-loop budget (default 2^24)")
      ->check(CLI::Validator(
          [](std::string& v) {
            return std::regex_match(v, std::regex("[0-9]+(\\^[0-9]+)?")) ? std::string() : "expected N or B^E";
          },
          "N|B^E"));

  // Shared inputs.
  std::string field = "3", variety_path, function_path;
  int n = 0;
  std::vector<std::string> polys;
  SampleFlags sf;

  auto add_poly_inputs = [&](CLI::App* c, bool many) {
    c->add_option("--field", field, "field spec \"p\" or \"p^l\"")->default_val("3");
    c->add_option("--n", n, "number of variables (default: one past the largest index used)");
    if (many)
      c->add_option("--poly", polys, "polynomial, repeatable")->required();
    else
      c->add_option("--poly", polys, "polynomial")->required()->expected(1);
  };

  // bias
  auto* bias_cmd = app.add_subcommand("bias", "bias |E e_q(P(x))| of a polynomial");
  add_poly_inputs(bias_cmd, false);
  add_sample_flags(bias_cmd, sf);

  // u2
  auto* u2_cmd = app.add_subcommand("u2", "U2 norm of a function on F_q^n (table or polynomial)");
  u2_cmd->add_option("--field", field, "field spec")->default_val("3");
  u2_cmd->add_option("--n", n, "number of variables");
  u2_cmd->add_option("--poly", polys, "function given as a polynomial")->expected(1);
  u2_cmd->add_option("--function", function_path, "function table CSV on all of F_q^n");
  bool u2_naive = false;
  u2_cmd->add_flag("--naive", u2_naive, "also run the q^{3n} triple loop and report both");

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "rank of a polynomial or family, classical rank for quadratics");
  add_poly_inputs(rank_cmd, true);
  int search_bound = 3;
  rank_cmd->add_option("--search-bound", search_bound, "largest rank searched exactly")->default_val(3);

  // degree
  auto* degree_cmd = app.add_subcommand("degree", "degree estimate of a variety by random linear sections");
  degree_cmd->add_option("--variety", variety_path, "variety spec JSON")->required();
  int ext_degree = 1, trials = 5;
  degree_cmd->add_option("--ext-degree", ext_degree, "extension degree m of the sampling field")->default_val(1);
  degree_cmd->add_option("--trials", trials, "number of random sections")->default_val(5);
  degree_cmd->add_option("--seed", sf.seed, "seed")->default_val(0);

  // count
  auto* count_cmd = app.add_subcommand("count", "point count and ancillary counts of a variety");
  count_cmd->add_option("--variety", variety_path, "variety spec JSON")->required();
  std::string statistic = "points";
  count_cmd->add_option("--statistic", statistic, "points | y2 | y3 | F | E")
      ->check(CLI::IsMember({"points", "y2", "y3", "F", "E"}))
      ->default_val("points");
  add_sample_flags(count_cmd, sf);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "constructive solvers; every witness is re-verified");
  solve_cmd->require_subcommand(1);
  auto* s_ax = solve_cmd->add_subcommand("ax", "nonzero common zero of a homogeneous family with n > D");
  s_ax->add_option("--variety", variety_path, "variety spec JSON")->required();
  s_ax->add_option("--seed", sf.seed, "seed")->default_val(0);
  auto* s_gram = solve_cmd->add_subcommand("gram", "vectors with a prescribed Gram matrix");
  std::string gram_json;
  s_gram->add_option("--variety", variety_path, "spec with one homogeneous quadratic")->required();
  s_gram->add_option("--gram", gram_json, "symmetric matrix as JSON, diagonal = Q values")->required();
  s_gram->add_option("--seed", sf.seed, "seed")->default_val(0);
  auto* s_two = solve_cmd->add_subcommand("two-squares", "c = a^2 + b^2");
  std::string value_text;
  s_two->add_option("--field", field, "field spec")->default_val("3");
  s_two->add_option("--value", value_text, "element c")->required();
  auto* s_shift = solve_cmd->add_subcommand("shifted-count", "|X ∩ (X - a_1) ∩ ... ∩ (X - a_k)|");
  std::string basepoints_json;
  s_shift->add_option("--variety", variety_path, "variety spec JSON")->required();
  s_shift->add_option("--basepoints", basepoints_json, "JSON list of points of X")->required();
  auto* s_arr = solve_cmd->add_subcommand("sol-array", "two 3-cubes with prescribed quadric values");
  std::string alpha_json, beta_json, gamma_json;
  s_arr->add_option("--variety", variety_path, "spec with one homogeneous quadratic")->required();
  s_arr->add_option("--alpha", alpha_json, "8 values indexed by omega bit mask")->required();
  s_arr->add_option("--beta", beta_json, "8 values")->required();
  s_arr->add_option("--gamma", gamma_json, "8 values")->required();
  s_arr->add_option("--seed", sf.seed, "seed")->default_val(0);
  auto* s_opp = solve_cmd->add_subcommand("opposite", "opposite face of a square");
  std::string u_json, u1_json, u2_json;
  bool opp_second = false;
  std::string t_text = "0", s_text = "0";
  s_opp->add_option("--variety", variety_path, "spec with one homogeneous quadratic")->required();
  s_opp->add_option("--u", u_json, "base point")->required();
  s_opp->add_option("--u1", u1_json, "first generator")->required();
  s_opp->add_option("--u2", u2_json, "second generator")->required();
  s_opp->add_flag("--second", opp_second, "Q(y+u) = t, Q(y+u+u1) = s instead of three zeros");
  s_opp->add_option("--t", t_text, "value t (second mode)");
  s_opp->add_option("--s", s_text, "value s (second mode)");
  s_opp->add_option("--seed", sf.seed, "seed")->default_val(0);
  auto* s_comp = solve_cmd->add_subcommand("complete", "cube through v in V0 with Q(v+v1) = a, Q(v+v2) = b");
  std::string v0_json, v_json, a_text, b_text;
  s_comp->add_option("--variety", variety_path, "spec with one homogeneous quadratic")->required();
  s_comp->add_option("--v0", v0_json, "point with Q(v0) = 1")->required();
  s_comp->add_option("--v", v_json, "point of V0")->required();
  s_comp->add_option("--a", a_text, "value a")->required();
  s_comp->add_option("--b", b_text, "value b, a + b = Q(v)")->required();
  s_comp->add_option("--seed", sf.seed, "seed")->default_val(0);

  // test
  auto* test_cmd = app.add_subcommand("test", "weak linearity / quadraticity of a function on X");
  test_cmd->require_subcommand(1);
  auto* t_lin = test_cmd->add_subcommand("linear", "linear on every 2-dimensional subspace inside X");
  auto* t_quad = test_cmd->add_subcommand("quadratic", "quadratic on every 3-dimensional subspace inside X");
  for (auto* c : {t_lin, t_quad}) {
    c->add_option("--variety", variety_path, "variety spec JSON")->required();
    c->add_option("--function", function_path, "function table CSV")->required();
    add_sample_flags(c, sf);
  }

  // extend
  auto* ext_cmd = app.add_subcommand("extend", "extension pipelines; exit 0 Extended, 2 NotExtendable, 3 Inconclusive");
  ext_cmd->require_subcommand(1);
  auto* e_lin = ext_cmd->add_subcommand("linear", "extend a weakly linear function to an affine-linear one");
  bool force = false;
  e_lin->add_option("--variety", variety_path, "variety spec JSON")->required();
  e_lin->add_option("--function", function_path, "function table CSV")->required();
  e_lin->add_flag("--force", force, "continue past a failed weak-linearity gate by majority correction");
  add_sample_flags(e_lin, sf);
  auto* e_quad = ext_cmd->add_subcommand("quadratic", "extend a weakly quadratic function on a quadric");
  VotePolicy votes;
  e_quad->add_option("--variety", variety_path, "spec with one homogeneous quadratic")->required();
  e_quad->add_option("--function", function_path, "function table CSV")->required();
  e_quad->add_option("--seed", sf.seed, "seed")->default_val(0);
  e_quad->add_option("--margin", votes.margin, "vote margin required before a value is trusted")
      ->default_val(0.9)
      ->check(CLI::Range(0.5, 1.0));
  e_quad->add_option("--min-votes", votes.min_votes, "votes drawn before early stopping")->default_val(9);
  e_quad->add_option("--max-votes", votes.max_votes, "vote cap per point")->default_val(1000);

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "experiment scans");
  scan_cmd->require_subcommand(1);
  auto* sc_br = scan_cmd->add_subcommand("bias-rank", "max and mean bias per rank bucket of random homogeneous polynomials (CSV columns field,n,d,rank_bucket,statistic,value,samples,seed)");
  int degree = 2, per_cell = 20, max_bucket = 4;
  std::vector<int> n_list{4};
  sc_br->add_option("--field", field, "field spec")->default_val("3");
  sc_br->add_option("--degree", degree, "degree d")->default_val(2);
  sc_br->add_option("--n", n_list, "dimensions, repeatable")->default_str("4");
  sc_br->add_option("--samples", per_cell, "polynomials per cell")->default_val(20);
  sc_br->add_option("--seed", sf.seed, "seed")->default_val(0);
  sc_br->add_option("--max-bucket", max_bucket, "largest rank bucket; quadratics in odd characteristic use ceil(classical rank / 2), other cases plant a sum of that many products")->default_val(4);
  std::string scan_format = "csv";
  sc_br->add_option("--format", scan_format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->default_val("csv");

  // accept
  auto* acc_cmd = app.add_subcommand("accept", "run the acceptance suite; nonzero exit on any failure");
  bool quick = false;
  std::vector<int> only;
  acc_cmd->add_flag("--quick", quick, "reduced instance counts");
  acc_cmd->add_option("--seed", sf.seed, "base seed")->default_val(0);
  acc_cmd->add_option("--only", only, "criterion ids")->check(CLI::Range(1, kCriteria));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (!budget.empty()) setenv("HIRANK_BUDGET", budget.c_str(), 1);

  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::string command;

  try {
    if (bias_cmd->parsed()) {
      command = "bias";
      PolyFamily fam = family_from_flags(field, n, polys);
      const Poly& P = fam.members[0];
      Json cfg = {{"field", fam.F.spec()}, {"n", fam.n}, {"poly", P.format()}, {"sampling", sf.echo()}};
      Json res;
      if (sf.mode().exhaustive) {
        res = {{"bias", bias(P)}, {"exact", true}};
      } else {
        auto e = bias_sampled(P, sf.samples, sf.seed, sf.confidence);
        res = {{"bias", e.value}, {"exact", false}, {"half_width", e.half_width}, {"confidence", e.confidence}};
      }
      emit(common, command, cfg, res, elapsed());
      return 0;
    }

    if (u2_cmd->parsed()) {
      command = "u2";
      Field F = Field::parse_spec(field);
      FunctionTable f;
      Json cfg = {{"field", F.spec()}};
      if (!polys.empty()) {
        PolyFamily fam = family_from_flags(field, n, polys);
        Poly P = fam.members[0];
        f = FunctionTable::on_space(Space(F, fam.n), [&](const Vec& x) { return P.eval(x); });
        cfg["n"] = fam.n;
        cfg["poly"] = P.format();
      } else if (!function_path.empty()) {
        if (n <= 0) throw UsageError("--n is required with --function");
        f = load_function_csv(function_path, Space(F, n));
        if (f.domain_size() != f.space().size()) fail(ErrorCode::ConfigError, "function table must cover F_q^n");
        cfg["n"] = n;
        cfg["function"] = function_path;
      } else {
        throw UsageError("give --poly or --function");
      }
      Json res = {{"u2", u2_norm(f)}};
      if (u2_naive) res["u2_naive"] = u2_norm_naive(f);
      emit(common, command, cfg, res, elapsed());
      return 0;
    }

    if (rank_cmd->parsed()) {
      command = "rank";
      PolyFamily fam = family_from_flags(field, n, polys);
      RankOptions ro;
      ro.search_bound = search_bound;
      Json cfg = variety_spec_json(fam);
      cfg["search_bound"] = search_bound;
      RankResult r = fam.members.size() == 1 ? schmidt_rank(fam.members[0], ro) : family_rank(fam, ro);
      Json res = {{"rank", r.rank}, {"exact", r.exact}};
      if (fam.members.size() == 1 && fam.members[0].degree() == 2)
        res["classical_rank"] = classical_quadratic_rank(fam.members[0]);
      emit(common, command, cfg, res, elapsed());
      return 0;
    }

    if (degree_cmd->parsed()) {
      command = "degree";
      PolyFamily fam = load_variety_spec(variety_path).family();
      auto d = variety_degree_estimate(fam, ext_degree, trials, sf.seed);
      Json cfg = variety_spec_json(fam);
      cfg["ext_degree"] = ext_degree;
      cfg["trials"] = trials;
      cfg["seed"] = sf.seed;
      emit(common, command, cfg, {{"degree", d.value}, {"counts", d.counts}}, elapsed());
      return 0;
    }

    if (count_cmd->parsed()) {
      command = "count";
      PolyFamily fam = load_variety_spec(variety_path).family();
      Variety X(fam);
      Json cfg = variety_spec_json(fam);
      cfg["statistic"] = statistic;
      cfg["sampling"] = sf.echo();
      Json res;
      if (statistic == "points") {
        std::vector<Elem> targets(fam.members.size(), 0);
        uint64_t c = count_via_characters(fam.F, fam.n, fam.members, {}, targets);
        res = {{"count", c}, {"density", static_cast<double>(c) / static_cast<double>(Space(fam.F, fam.n).size())}};
      } else if (statistic == "y2") {
        res = {{"count", y2_count(X)}};
      } else if (statistic == "y3") {
        res = {{"count", y3_count(X)}};
      } else {
        CountResult c = statistic == "F" ? ancillary_F(X, sf.mode()) : ancillary_E(X, sf.mode());
        if (sf.mode().exhaustive)
          res = {{"count", c.count}, {"density", c.density}};
        else
          res = {{"density", c.estimate.value},
                 {"half_width", c.estimate.half_width},
                 {"confidence", c.estimate.confidence},
                 {"samples", c.estimate.samples}};
      }
      emit(common, command, cfg, res, elapsed());
      return 0;
    }

    if (solve_cmd->parsed()) {
      SolveOptions so;
      so.seed = sf.seed;
      if (s_two->parsed()) {
        command = "solve two-squares";
        Field F = Field::parse_spec(field);
        Elem c = F.parse(value_text);
        auto [a, b] = sum_two_squares(F, c);
        bool ok = F.add(F.mul(a, a), F.mul(b, b)) == c;
        emit(common, command, {{"field", F.spec()}, {"value", elem_json(F, c)}},
             {{"solution", {elem_json(F, a), elem_json(F, b)}}, {"verified", ok}}, elapsed());
        return ok ? 0 : kExitError;
      }
      PolyFamily fam = load_variety_spec(variety_path).family();
      const Field& F = fam.F;
      Json cfg = variety_spec_json(fam);
      if (s_ax->parsed()) {
        command = "solve ax";
        auto r = ax_nonzero_solution(fam, sf.seed);
        bool ok = !is_zero(r.point) && fam.contains(r.point);
        cfg["seed"] = sf.seed;
        emit(common, command, cfg,
             {{"solution", vec_json(F, r.point)}, {"verified", ok}, {"precondition_met", r.precondition_met}},
             elapsed());
        return ok ? 0 : kExitError;
      }
      if (s_shift->parsed()) {
        command = "solve shifted-count";
        Json bj = parse_json_arg(basepoints_json, "--basepoints");
        if (!bj.is_array()) fail(ErrorCode::ConfigError, "--basepoints: expected a list of points");
        std::vector<Vec> bps;
        for (size_t i = 0; i < bj.size(); ++i) bps.push_back(vec_from_json(F, bj[i], fam.n, "--basepoints"));
        auto r = shifted_zero_count(fam, bps);
        cfg["basepoints"] = bj;
        emit(common, command, cfg, {{"solution", {{"count", r.count}, {"density", r.density}}}, {"verified", true}},
             elapsed());
        return 0;
      }
      QuadraticFunction Q = quadric_of(fam);
      if (s_gram->parsed()) {
        command = "solve gram";
        Json gj = parse_json_arg(gram_json, "--gram");
        if (!gj.is_array() || gj.empty()) fail(ErrorCode::ConfigError, "--gram: expected a square matrix");
        int k = static_cast<int>(gj.size());
        Mat D(k, k);
        for (int i = 0; i < k; ++i) {
          Vec row = vec_from_json(F, gj[i], k, "--gram row");
          for (int j = 0; j < k; ++j) D.at(i, j) = row[j];
        }
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < i; ++j)
            if (D.at(i, j) != D.at(j, i)) fail(ErrorCode::ConfigError, "--gram: matrix is not symmetric");
        auto vs = gram_realize(Q, D, so);
        bool ok = true;
        for (int i = 0; i < k; ++i) {
          ok = ok && Q.eval(vs[i]) == D.at(i, i);
          for (int j = 0; j < i; ++j) ok = ok && Q.pair(vs[i], vs[j]) == D.at(i, j);
        }
        Json sol = Json::array();
        for (auto& v : vs) sol.push_back(vec_json(F, v));
        cfg["gram"] = gj;
        cfg["seed"] = sf.seed;
        emit(common, command, cfg, {{"solution", sol}, {"verified", ok}}, elapsed());
        return ok ? 0 : kExitError;
      }
      if (s_arr->parsed()) {
        command = "solve sol-array";
        auto cube_vals = [&](const std::string& text, const char* what) {
          Vec v = vec_arg(F, text, 8, what);
          CubeValues c{};
          for (int i = 0; i < 8; ++i) c[i] = v[i];
          return c;
        };
        CubeValues al = cube_vals(alpha_json, "--alpha"), be = cube_vals(beta_json, "--beta"),
                   ga = cube_vals(gamma_json, "--gamma");
        auto s = sol_array(Q, al, be, ga, so);
        bool ok = true;
        for (uint32_t w = 0; w < 8; ++w) {
          Vec x(fam.n, 0), y(fam.n, 0);
          for (int i = 0; i < 3; ++i)
            if (w >> i & 1U) {
              x = vadd(F, x, s.z1[i]);
              y = vadd(F, y, s.z2[i]);
            }
          ok = ok && Q.eval(x) == F.neg(al[w]) && Q.eval(y) == F.neg(be[w]) && Q.eval(vadd(F, x, y)) == F.neg(ga[w]);
        }
        Json z1 = Json::array(), z2 = Json::array();
        for (int i = 0; i < 3; ++i) {
          z1.push_back(vec_json(F, s.z1[i]));
          z2.push_back(vec_json(F, s.z2[i]));
        }
        cfg["alpha"] = parse_json_arg(alpha_json, "--alpha");
        cfg["beta"] = parse_json_arg(beta_json, "--beta");
        cfg["gamma"] = parse_json_arg(gamma_json, "--gamma");
        cfg["seed"] = sf.seed;
        emit(common, command, cfg, {{"solution", {{"z1", z1}, {"z2", z2}}}, {"verified", ok}}, elapsed());
        return ok ? 0 : kExitError;
      }
      if (s_opp->parsed()) {
        command = "solve opposite";
        Vec u = vec_arg(F, u_json, fam.n, "--u"), u1 = vec_arg(F, u1_json, fam.n, "--u1"),
            u2 = vec_arg(F, u2_json, fam.n, "--u2");
        OppositeMode m;
        m.second = opp_second;
        m.t = F.parse(t_text);
        m.s = F.parse(s_text);
        Vec y = opposite_face(Q, u, u1, u2, m, so);
        Vec yu = vadd(F, y, u);
        Elem b = F.add(F.sub(F.sub(Q.eval(u), Q.eval(vadd(F, u, u2))), Q.eval(vadd(F, u, u1))),
                       Q.eval(vadd(F, vadd(F, u, u1), u2)));
        Elem w0 = m.second ? m.t : b, w1 = m.second ? m.s : 0;
        bool ok = Q.eval(yu) == w0 && Q.eval(vadd(F, yu, u1)) == w1 && Q.eval(vadd(F, yu, u2)) == 0 &&
                  Q.eval(vadd(F, vadd(F, yu, u1), u2)) == 0;
        cfg["u"] = vec_json(F, u);
        cfg["u1"] = vec_json(F, u1);
        cfg["u2"] = vec_json(F, u2);
        cfg["second"] = opp_second;
        if (opp_second) {
          cfg["t"] = elem_json(F, m.t);
          cfg["s"] = elem_json(F, m.s);
        }
        cfg["seed"] = sf.seed;
        emit(common, command, cfg, {{"solution", vec_json(F, y)}, {"verified", ok}}, elapsed());
        return ok ? 0 : kExitError;
      }
      if (s_comp->parsed()) {
        command = "solve complete";
        Vec v0 = vec_arg(F, v0_json, fam.n, "--v0"), v = vec_arg(F, v_json, fam.n, "--v");
        Elem a = F.parse(a_text), b = F.parse(b_text);
        auto g = complete_cube_v0(Q, v0, v, a, b, so);
        bool ok = true;
        for (auto& x : g) ok = ok && Q.pair(x, v0) == 0;
        for (uint32_t w = 1; w < 8; ++w) {
          Vec x = v;
          for (int i = 0; i < 3; ++i)
            if (w >> i & 1U) x = vadd(F, x, g[i]);
          ok = ok && Q.eval(x) == (w == 1 ? a : w == 2 ? b : Elem{0});
        }
        Json sol = Json::array();
        for (auto& x : g) sol.push_back(vec_json(F, x));
        cfg["v0"] = vec_json(F, v0);
        cfg["v"] = vec_json(F, v);
        cfg["a"] = elem_json(F, a);
        cfg["b"] = elem_json(F, b);
        cfg["seed"] = sf.seed;
        emit(common, command, cfg, {{"solution", sol}, {"verified", ok}}, elapsed());
        return ok ? 0 : kExitError;
      }
    }

    if (test_cmd->parsed()) {
      bool lin = t_lin->parsed();
      command = lin ? "test linear" : "test quadratic";
      PolyFamily fam = load_variety_spec(variety_path).family();
      Variety X(fam);
      FunctionTable f = load_function_csv(function_path, X.space());
      WitnessReport r = lin ? is_weakly_linear(f, X, sf.mode()) : is_weakly_quadratic(f, X, sf.mode());
      Json cfg = variety_spec_json(fam);
      cfg["function"] = function_path;
      cfg["sampling"] = sf.echo();
      Json w = Json::array();
      for (auto& v : r.witness) w.push_back(vec_json(fam.F, v));
      emit(common, command, cfg, {{"verdict", r.verdict}, {"checked", r.checked}, {"witness", w}, {"detail", r.detail}},
           elapsed());
      return r.verdict ? 0 : 2;
    }

    if (ext_cmd->parsed()) {
      PolyFamily fam = load_variety_spec(variety_path).family();
      Variety X(fam);
      FunctionTable f = load_function_csv(function_path, X.space());
      Json cfg = variety_spec_json(fam);
      cfg["function"] = function_path;
      if (e_lin->parsed()) {
        command = "extend linear";
        LinearOptions lo;
        lo.force = force;
        lo.mode = sf.mode();
        cfg["force"] = force;
        cfg["sampling"] = sf.echo();
        ExtensionCertificate c = extend_weakly_linear(f, X, lo);
        emit(common, command, cfg, certificate_json(c, fam.F), elapsed());
        return status_exit_code(c.status);
      }
      command = "extend quadratic";
      QuadOptions qo;
      qo.seed = sf.seed;
      qo.votes = votes;
      cfg["seed"] = sf.seed;
      cfg["margin"] = votes.margin;
      cfg["min_votes"] = votes.min_votes;
      cfg["max_votes"] = votes.max_votes;
      QuadCertificate c = extend_weakly_quadratic(f, X, qo);
      emit(common, command, cfg, certificate_json(c, fam.F), elapsed());
      return status_exit_code(c.status);
    }

    if (sc_br->parsed()) {
      command = "scan bias-rank";
      Field F = Field::parse_spec(field);
      auto rows = bias_rank_scan(degree, F, n_list, per_cell, sf.seed, max_bucket);
      if (scan_format == "csv") {
        std::string out = "field,n,d,rank_bucket,statistic,value,samples,seed\n";
        char buf[64];
        for (auto& r : rows) {
          std::snprintf(buf, sizeof buf, "%.17g", r.value);
          out += r.field + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," + std::to_string(r.rank_bucket) +
                 "," + r.statistic + "," + buf + "," + std::to_string(r.samples) + "," + std::to_string(r.seed) + "\n";
        }
        if (common.output.empty())
          std::cout << out;
        else
          write_file(common.output, out);
      } else {
        Json res = Json::array();
        for (auto& r : rows)
          res.push_back({{"field", r.field},
                         {"n", r.n},
                         {"d", r.d},
                         {"rank_bucket", r.rank_bucket},
                         {"statistic", r.statistic},
                         {"value", r.value},
                         {"samples", r.samples},
                         {"seed", r.seed}});
        Json cfg = {{"field", F.spec()}, {"degree", degree},         {"n", n_list},
                    {"samples", per_cell}, {"seed", sf.seed}, {"max_bucket", max_bucket}};
        emit(common, command, cfg, res, elapsed());
      }
      return 0;
    }

    if (acc_cmd->parsed()) {
      command = "accept";
      AcceptOptions ao;
      ao.level = quick ? AcceptLevel::Quick : AcceptLevel::Full;
      ao.seed = sf.seed;
      ao.only = only;
      ao.on_result = [](const CriterionResult& r) { std::cerr << format_result_line(r) << std::endl; };
      auto rs = run_acceptance(ao);
      Json res = acceptance_json(rs, ao);
      emit(common, command, {{"level", quick ? "quick" : "full"}, {"seed", sf.seed}, {"only", only}}, res, elapsed());
      return res["passed"] == res["total"] ? 0 : kExitError;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    Json err = {{"error", error_name(e.code())}, {"message", e.what()}, {"stage", command}};
    std::cerr << err.dump() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    Json err = {{"error", "InternalError"}, {"message", e.what()}, {"stage", command}};
    std::cerr << err.dump() << "\n";
    return kExitError;
  }
  return kExitConfig;
}
