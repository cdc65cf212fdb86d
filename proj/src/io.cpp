#include "hirank/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "hirank/errors.hpp"

namespace hirank {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Json stats_json(const Stats& s) {
  Json o = Json::object();
  for (auto& [k, v] : s) o[k] = v;
  return o;
}

Json witness_json(const Field& F, const std::vector<Vec>& w) {
  Json a = Json::array();
  for (auto& v : w) a.push_back(vec_json(F, v));
  return a;
}

}  // namespace

PolyFamily VarietySpec::family() const {
  PolyFamily fam{F, n, {}};
  for (size_t i = 0; i < polynomials.size(); ++i) {
    try {
      fam.members.push_back(parse_poly(polynomials[i], n, F));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "polynomials[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return fam;
}

VarietySpec parse_variety_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("variety spec is not JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, "variety spec: expected an object");
  VarietySpec s;
  if (!j.contains("field")) fail(ErrorCode::ConfigError, "variety spec: missing 'field'");
  const Json& f = j["field"];
  if (f.is_string())
    s.F = Field::parse_spec(f.get<std::string>());
  else if (f.is_number_integer())
    s.F = Field::parse_spec(std::to_string(f.get<int64_t>()));
  else
    fail(ErrorCode::ConfigError, "variety spec: 'field' must be a string like \"3\" or \"2^2\"");
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int64_t>() < 1 || j["n"].get<int64_t>() > 64)
    fail(ErrorCode::ConfigError, "variety spec: 'n' must be an integer in [1, 64]");
  s.n = j["n"].get<int>();
  if (!j.contains("polynomials") || !j["polynomials"].is_array())
    fail(ErrorCode::ConfigError, "variety spec: 'polynomials' must be an array of strings");
  for (size_t i = 0; i < j["polynomials"].size(); ++i) {
    const Json& p = j["polynomials"][i];
    if (!p.is_string()) fail(ErrorCode::ConfigError, "variety spec: polynomials[" + std::to_string(i) + "] is not a string");
    s.polynomials.push_back(p.get<std::string>());
  }
  return s;
}

VarietySpec load_variety_spec(const std::string& path) { return parse_variety_spec(read_file(path)); }

Json variety_spec_json(const PolyFamily& fam) {
  Json j;
  j["field"] = fam.F.spec();
  j["n"] = fam.n;
  j["polynomials"] = Json::array();
  for (auto& p : fam.members) j["polynomials"].push_back(p.format());
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IOError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IOError, "cannot write " + path);
  out << data;
  if (!out) fail(ErrorCode::IOError, "write failed for " + path);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : line) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (depth < 0) fail(ErrorCode::SyntaxError, "unbalanced ']' in '" + line + "'");
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) fail(ErrorCode::SyntaxError, "unbalanced '[' in '" + line + "'");
  out.push_back(trim(cur));
  return out;
}

FunctionTable parse_function_csv(const std::string& text, const Space& S) {
  const Field& F = S.field();
  FunctionTable f(S);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_csv_row(line);
    if (first && !cells.empty() && !cells[0].empty() &&
        !(std::isdigit(static_cast<unsigned char>(cells[0][0])) || cells[0][0] == '[' || cells[0][0] == '-')) {
      first = false;
      continue;  // header
    }
    first = false;
    auto where = [&]() { return "line " + std::to_string(lineno); };
    if (static_cast<int>(cells.size()) != S.n() + 1)
      fail(ErrorCode::DimensionMismatch, where() + ": expected " + std::to_string(S.n() + 1) + " columns, got " +
                                             std::to_string(cells.size()));
    Vec x(S.n());
    Elem v = 0;
    try {
      for (int i = 0; i < S.n(); ++i) x[i] = F.parse(cells[i]);
      v = F.parse(cells[S.n()]);
    } catch (const Error& e) {
      fail(ErrorCode::SyntaxError, where() + ": " + e.what());
    }
    uint64_t idx = S.index(x);
    if (f.defined(idx) && f.at(idx) != v) fail(ErrorCode::ConfigError, where() + ": conflicting value for a repeated point");
    f.set(idx, v);
  }
  return f;
}

FunctionTable load_function_csv(const std::string& path, const Space& S) {
  return parse_function_csv(read_file(path), S);
}

std::string function_csv(const FunctionTable& f) {
  const Space& S = f.space();
  const Field& F = S.field();
  std::string out;
  for (int i = 0; i < S.n(); ++i) out += "x_" + std::to_string(i) + ",";
  out += "value\n";
  Vec x(S.n());
  for (uint64_t idx = 0; idx < S.size(); ++idx) {
    if (!f.defined(idx)) continue;
    S.point(idx, x.data());
    for (int i = 0; i < S.n(); ++i) out += F.format(x[i]) + ",";
    out += F.format(f.at(idx)) + "\n";
  }
  return out;
}

Json elem_json(const Field& F, Elem a) {
  if (F.prime()) return a;
  return Json(F.coeffs(a));
}

Json vec_json(const Field& F, const Vec& v) {
  Json a = Json::array();
  for (Elem e : v) a.push_back(elem_json(F, e));
  return a;
}

Json quadratic_json(const QuadraticFunction& g) {
  const Field& F = g.field();
  const int n = g.n();
  Json j;
  // Coefficient of x_i x_j (i <= j) and the symmetric matrix M with H(x) = x^T M x.
  Json coeff = Json::array(), sym = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array(), srow = Json::array();
    for (int j = 0; j < n; ++j) {
      row.push_back(elem_json(F, j >= i ? g.a(i, j) : Elem{0}));
      Elem m = i == j ? g.a(i, i) : (F.odd() ? F.mul(g.a(i, j), F.half()) : g.a(i, j));
      srow.push_back(elem_json(F, m));
    }
    coeff.push_back(row);
    sym.push_back(srow);
  }
  j["monomial_coefficients"] = coeff;
  if (F.odd()) j["symmetric_matrix"] = sym;
  j["linear"] = vec_json(F, g.lin());
  j["constant"] = elem_json(F, g.c());
  j["polynomial"] = g.to_poly().format();
  return j;
}

Json certificate_json(const ExtensionCertificate& c, const Field& F) {
  Json j;
  j["kind"] = "linear";
  j["status"] = status_name(c.status);
  j["weakly_linear"] = c.weakly_linear;
  j["forced"] = c.forced;
  if (c.status == ExtStatus::Extended) {
    j["g"] = {{"linear", vec_json(F, c.g)}, {"constant", elem_json(F, c.constant)}};
  } else {
    j["g"] = nullptr;
  }
  j["corrected_fraction"] = c.corrected_fraction;
  j["final_agreement"] = c.final_agreement;
  j["witness_kind"] = c.witness_kind;
  j["witness"] = witness_json(F, c.witness);
  j["detail"] = c.detail;
  j["stats"] = stats_json(c.stats);
  j["diagnostics"] = c.diagnostics;
  return j;
}

Json certificate_json(const QuadCertificate& c, const Field& F) {
  Json j;
  j["kind"] = "quadratic";
  j["status"] = status_name(c.status);
  j["weakly_quadratic"] = c.weakly_quadratic;
  j["g"] = c.status == ExtStatus::Extended ? quadratic_json(c.g) : Json(nullptr);
  j["v0"] = vec_json(F, c.v0);
  j["scale"] = elem_json(F, c.scale);
  j["odd_status"] = status_name(c.odd_status);
  j["final_agreement"] = c.final_agreement;
  j["witness_kind"] = c.witness_kind;
  j["witness"] = witness_json(F, c.witness);
  j["detail"] = c.detail;
  j["stats"] = stats_json(c.stats);
  j["diagnostics"] = c.diagnostics;
  return j;
}

}  // namespace hirank
