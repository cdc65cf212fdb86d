#include "hirank/field.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "hirank/errors.hpp"

namespace hirank {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrime: return "NonPrime";
    case ErrorCode::UnsupportedField: return "UnsupportedField";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::InfeasibleSearch: return "InfeasibleSearch";
    case ErrorCode::CharTwo: return "CharTwo";
    case ErrorCode::NotQuadratic: return "NotQuadratic";
    case ErrorCode::DegenerateSampling: return "DegenerateSampling";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::VertexOutsideDomain: return "VertexOutsideDomain";
    case ErrorCode::EmptyFiber: return "EmptyFiber";
    case ErrorCode::BasepointNotOnVariety: return "BasepointNotOnVariety";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoSolutionFound: return "NoSolutionFound";
    case ErrorCode::DegenerateSquare: return "DegenerateSquare";
    case ErrorCode::RankTooLow: return "RankTooLow";
    case ErrorCode::NoMajority: return "NoMajority";
    case ErrorCode::InconsistentRepresentations: return "InconsistentRepresentations";
    case ErrorCode::EmptyZ: return "EmptyZ";
    case ErrorCode::NoX0Found: return "NoX0Found";
    case ErrorCode::InconsistentFit: return "InconsistentFit";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

// Polynomials over F_p as coefficient vectors, low degree first.
using PPoly = std::vector<int>;

PPoly pmulmod(const PPoly& a, const PPoly& b, const PPoly& m, int p) {
  int l = static_cast<int>(m.size()) - 1;
  std::vector<int64_t> r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += static_cast<int64_t>(a[i]) * b[j];
  for (auto& x : r) x %= p;
  for (int d = static_cast<int>(r.size()) - 1; d >= l; --d) {
    int64_t c = r[d];
    if (c == 0) continue;
    for (int k = 0; k <= l; ++k) r[d - l + k] = ((r[d - l + k] - c * m[k]) % p + p) % p;
  }
  PPoly out(l, 0);
  for (int i = 0; i < l && i < static_cast<int>(r.size()); ++i) out[i] = static_cast<int>(r[i]);
  return out;
}

bool has_root(const PPoly& m, int p) {
  for (int x = 0; x < p; ++x) {
    int64_t v = 0;
    for (int k = static_cast<int>(m.size()) - 1; k >= 0; --k) v = (v * x + m[k]) % p;
    if (v == 0) return true;
  }
  return false;
}

}  // namespace

std::shared_ptr<const Field::Tables> Field::build(int p, int l) {
  auto t = std::make_shared<Tables>();
  t->p = p;
  t->l = l;
  uint32_t q = 1;
  for (int i = 0; i < l; ++i) q *= p;
  t->q = q;

  if (l > 1) {
    // Degree <= 3: irreducible iff no root. Scan in increasing base-p index order.
    for (uint32_t idx = 0; idx < q; ++idx) {
      PPoly m(l + 1, 0);
      uint32_t v = idx;
      for (int k = 0; k < l; ++k) {
        m[k] = v % p;
        v /= p;
      }
      m[l] = 1;
      if (m[0] == 0) continue;
      if (!has_root(m, p)) {
        t->modulus = m;
        break;
      }
    }
    auto to_poly = [&](uint32_t a) {
      PPoly c(l, 0);
      for (int k = 0; k < l; ++k) {
        c[k] = a % p;
        a /= p;
      }
      return c;
    };
    auto from_poly = [&](const PPoly& c) {
      uint32_t a = 0;
      for (int k = l - 1; k >= 0; --k) a = a * p + c[k];
      return a;
    };
    // Primitive element: smallest index whose powers reach every nonzero element.
    t->log.assign(q, 0);
    t->exp.assign(q, 0);
    for (uint32_t g = 2; g < q; ++g) {
      std::vector<uint32_t> seen(q, 0);
      PPoly cur = to_poly(1);
      PPoly gp = to_poly(g);
      uint32_t k = 0;
      bool ok = true;
      for (; k < q - 1; ++k) {
        uint32_t a = from_poly(cur);
        if (seen[a]) {
          ok = false;
          break;
        }
        seen[a] = 1;
        t->exp[k] = a;
        t->log[a] = k;
        cur = pmulmod(cur, gp, t->modulus, p);
      }
      if (ok) break;
    }
    t->neg_table.assign(q, 0);
    for (uint32_t a = 0; a < q; ++a) {
      PPoly c = to_poly(a);
      for (auto& x : c) x = (p - x) % p;
      t->neg_table[a] = from_poly(c);
    }
    if (q <= 256) {
      t->add_table.assign(static_cast<size_t>(q) * q, 0);
      for (uint32_t a = 0; a < q; ++a)
        for (uint32_t b = 0; b < q; ++b) {
          PPoly x = to_poly(a), y = to_poly(b);
          for (int k = 0; k < l; ++k) x[k] = (x[k] + y[k]) % p;
          t->add_table[a * q + b] = from_poly(x);
        }
    }
  }
  return t;
}

Field Field::make(int p, int l) {
  if (p < 2) fail(ErrorCode::NonPrime, std::to_string(p) + " is not prime");
  if (l < 1) fail(ErrorCode::InvalidArgument, "extension degree must be >= 1");
  if (!is_prime(p)) fail(ErrorCode::NonPrime, std::to_string(p) + " is not prime");
  if (p > 101 || l > 3) fail(ErrorCode::UnsupportedField, "supported range is p <= 101, l <= 3");

  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Tables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, l);
  auto it = cache.find(key);
  if (it != cache.end()) {
    Field f;
    f.t_ = it->second;
    return f;
  }

  Field f;
  auto base = build(p, l);
  f.t_ = base;
  // Remaining tables use the arithmetic defined above.
  auto t = std::make_shared<Tables>(*base);
  uint32_t q = t->q;
  t->inv.assign(q, 0);
  t->trace.assign(q, 0);
  t->sqrt.assign(q, kNoRoot);
  Field g;
  g.t_ = t;
  for (uint32_t a = 1; a < q; ++a) {
    if (l == 1) {
      t->inv[a] = g.pow(a, q - 2);
    } else {
      t->inv[a] = t->exp[(q - 1 - t->log[a]) % (q - 1)];
    }
  }
  for (uint32_t a = 0; a < q; ++a) {
    Elem s = 0, x = a;
    for (int i = 0; i < l; ++i) {
      s = g.add(s, x);
      x = g.pow(x, p);
    }
    t->trace[a] = static_cast<uint8_t>(s);
  }
  for (uint32_t r = q; r-- > 0;) {
    Elem sq = g.mul(r, r);
    t->sqrt[sq] = r;
  }
  f.t_ = t;
  cache[key] = t;
  return f;
}

Field Field::parse_spec(const std::string& spec) {
  int p = 0, l = 1;
  auto caret = spec.find('^');
  try {
    size_t used = 0;
    p = std::stoi(spec.substr(0, caret), &used);
    if (used != (caret == std::string::npos ? spec.size() : caret)) throw std::invalid_argument(spec);
    if (caret != std::string::npos) {
      l = std::stoi(spec.substr(caret + 1), &used);
      if (used != spec.size() - caret - 1) throw std::invalid_argument(spec);
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::ConfigError, "bad field spec '" + spec + "'");
  }
  return make(p, l);
}

std::string Field::spec() const {
  if (l() == 1) return std::to_string(p());
  return std::to_string(p()) + "^" + std::to_string(l());
}

Elem Field::add_digits(Elem a, Elem b) const {
  Elem r = 0, mult = 1;
  uint32_t p = t_->p;
  for (int k = 0; k < t_->l; ++k) {
    uint32_t d = (a % p + b % p) % p;
    r += d * mult;
    mult *= p;
    a /= p;
    b /= p;
  }
  return r;
}

Elem Field::inv(Elem a) const {
  if (a == 0) fail(ErrorCode::InvalidArgument, "inverse of zero");
  return t_->inv[a];
}

Elem Field::pow(Elem a, uint64_t e) const {
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Elem Field::half() const {
  if (!odd()) fail(ErrorCode::CharTwo, "1/2 does not exist in characteristic 2");
  return inv(from_int(2));
}

std::vector<int> Field::coeffs(Elem a) const {
  std::vector<int> c(l(), 0);
  for (int k = 0; k < l(); ++k) {
    c[k] = a % p();
    a /= p();
  }
  return c;
}

Elem Field::from_coeffs(const std::vector<int>& c) const {
  if (static_cast<int>(c.size()) != l()) fail(ErrorCode::InvalidArgument, "coefficient vector length must equal l");
  Elem a = 0;
  for (int k = l() - 1; k >= 0; --k) a = a * p() + static_cast<Elem>(((c[k] % p()) + p()) % p());
  return a;
}

CharacterValue Field::char_eq(Elem a) const {
  CharacterValue v;
  v.residue = trace(a);
  double ang = 2.0 * std::numbers::pi * v.residue / p();
  v.z = {std::cos(ang), std::sin(ang)};
  return v;
}

std::string Field::format(Elem a) const {
  if (l() == 1) return std::to_string(a);
  auto c = coeffs(a);
  std::ostringstream os;
  os << '[';
  for (int k = 0; k < l(); ++k) os << (k ? "," : "") << c[k];
  os << ']';
  return os.str();
}

Elem Field::parse(const std::string& text) const {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  auto bad = [&]() { fail(ErrorCode::SyntaxError, "bad field element '" + text + "'"); };
  if (s.empty()) bad();
  if (s.front() == '[') {
    if (s.back() != ']') bad();
    std::vector<int> c;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t used = 0;
        c.push_back(std::stoi(tok, &used));
        if (used != tok.size()) bad();
      } catch (const std::logic_error&) {
        bad();
      }
    }
    if (static_cast<int>(c.size()) != l()) bad();
    return from_coeffs(c);
  }
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) bad();
    return from_int(v);
  } catch (const std::logic_error&) {
    bad();
  }
  return 0;
}

}  // namespace hirank
