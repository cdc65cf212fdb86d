#include "hirank/poly.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hirank/errors.hpp"
#include "hirank/rng.hpp"

namespace hirank {

int total_degree(const Exps& e) {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

bool MonoOrder::operator()(const Exps& a, const Exps& b) const {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  return a > b;
}

Poly Poly::constant(const Field& F, int n, Elem c) {
  Poly P(F, n);
  P.add_term(Exps(n, 0), c);
  return P;
}

Poly Poly::variable(const Field& F, int n, int i) {
  Poly P(F, n);
  Exps e(n, 0);
  e[i] = 1;
  P.add_term(e, 1);
  return P;
}

Poly Poly::linear(const Field& F, const Vec& coeffs, Elem c) {
  int n = static_cast<int>(coeffs.size());
  Poly P(F, n);
  for (int i = 0; i < n; ++i) {
    Exps e(n, 0);
    e[i] = 1;
    P.add_term(e, coeffs[i]);
  }
  P.add_term(Exps(n, 0), c);
  return P;
}

void Poly::add_term(const Exps& e, Elem c) {
  if (static_cast<int>(e.size()) != n_) fail(ErrorCode::DimensionMismatch, "monomial length");
  if (c == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second = F_.add(it->second, c);
  if (it->second == 0) terms_.erase(it);
}

Elem Poly::coeff(const Exps& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0 : it->second;
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.begin()->first);
}

bool Poly::is_homogeneous() const {
  if (terms_.empty()) return true;
  int d = degree();
  for (auto& [e, c] : terms_)
    if (total_degree(e) != d) return false;
  return true;
}

Poly Poly::homogeneous_part(int d) const {
  Poly R(F_, n_);
  for (auto& [e, c] : terms_)
    if (total_degree(e) == d) R.terms_.emplace(e, c);
  return R;
}

std::vector<int> Poly::variables() const {
  std::vector<int> used(n_, 0);
  for (auto& [e, c] : terms_)
    for (int i = 0; i < n_; ++i)
      if (e[i]) used[i] = 1;
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (used[i]) out.push_back(i);
  return out;
}

Poly Poly::operator+(const Poly& o) const {
  if (o.n_ != n_) fail(ErrorCode::DimensionMismatch, "polynomial rings differ");
  Poly R = *this;
  for (auto& [e, c] : o.terms_) R.add_term(e, c);
  return R;
}

Poly Poly::operator-() const {
  Poly R(F_, n_);
  for (auto& [e, c] : terms_) R.terms_.emplace(e, F_.neg(c));
  return R;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::scaled(Elem c) const {
  Poly R(F_, n_);
  if (c == 0) return R;
  for (auto& [e, v] : terms_) R.terms_.emplace(e, F_.mul(c, v));
  return R;
}

Poly Poly::operator*(const Poly& o) const {
  if (o.n_ != n_) fail(ErrorCode::DimensionMismatch, "polynomial rings differ");
  Poly R(F_, n_);
  Exps e(n_);
  for (auto& [a, ca] : terms_)
    for (auto& [b, cb] : o.terms_) {
      for (int i = 0; i < n_; ++i) e[i] = static_cast<uint16_t>(a[i] + b[i]);
      R.add_term(e, F_.mul(ca, cb));
    }
  return R;
}

Elem Poly::eval(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_)
    fail(ErrorCode::DimensionMismatch, "point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(n_));
  Elem s = 0;
  for (auto& [e, c] : terms_) {
    Elem t = c;
    for (int i = 0; i < n_ && t; ++i)
      if (e[i]) t = F_.mul(t, F_.pow(x[i], e[i]));
    s = F_.add(s, t);
  }
  return s;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
  if (static_cast<int>(images.size()) != n_) fail(ErrorCode::DimensionMismatch, "substitution arity");
  int m = images.empty() ? 0 : images[0].n();
  Poly R(F_, m);
  // Cache powers of each image.
  std::vector<std::vector<Poly>> pw(n_);
  for (auto& [e, c] : terms_) {
    Poly t = Poly::constant(F_, m, c);
    for (int i = 0; i < n_; ++i) {
      if (!e[i]) continue;
      auto& cache = pw[i];
      if (cache.empty()) cache.push_back(Poly::constant(F_, m, 1));
      while (static_cast<int>(cache.size()) <= e[i]) cache.push_back(cache.back() * images[i]);
      t = t * cache[e[i]];
    }
    R = R + t;
  }
  return R;
}

Poly Poly::shifted(const Vec& s) const {
  if (static_cast<int>(s.size()) != n_) fail(ErrorCode::DimensionMismatch, "shift length");
  std::vector<Poly> img;
  for (int i = 0; i < n_; ++i) img.push_back(Poly::variable(F_, n_, i) + Poly::constant(F_, n_, s[i]));
  return substitute(img);
}

Poly Poly::compose_affine(const Mat& A, const Vec& b) const {
  std::vector<Poly> img;
  for (int i = 0; i < n_; ++i) {
    Vec row(A.cols);
    for (int j = 0; j < A.cols; ++j) row[j] = A.at(i, j);
    img.push_back(Poly::linear(F_, row, b.empty() ? 0 : b[i]));
  }
  return substitute(img);
}

Poly Poly::embedded(int n_new, int offset) const {
  Poly R(F_, n_new);
  for (auto& [e, c] : terms_) {
    Exps f(n_new, 0);
    for (int i = 0; i < n_; ++i) f[offset + i] = e[i];
    R.terms_.emplace(f, c);
  }
  return R;
}

std::string Poly::format() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    bool has_var = total_degree(e) > 0;
    if (c != 1 || !has_var) {
      os << F_.format(c);
      if (has_var) os << '*';
    }
    bool fv = true;
    for (int i = 0; i < n_; ++i) {
      if (!e[i]) continue;
      if (!fv) os << '*';
      fv = false;
      os << 'x' << i;
      if (e[i] > 1) os << '^' << e[i];
    }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& s, int n, const Field& F) : s_(s), n_(n), F_(F) {}

  Poly parse() {
    Poly P(F_, n_);
    skip();
    if (pos_ >= s_.size()) error("empty polynomial");
    bool first = true;
    while (pos_ < s_.size()) {
      bool neg = false;
      if (accept_sign(neg)) {
      } else if (!first) {
        error("expected '+' or '-'");
      }
      first = false;
      skip();
      parse_term(P, neg);
      skip();
    }
    return P;
  }

 private:
  [[noreturn]] void error(const std::string& msg) {
    fail(ErrorCode::SyntaxError, msg + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept_sign(bool& neg) {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      neg = s_[pos_] == '-';
      ++pos_;
      return true;
    }
    // U+2212 minus sign
    if (s_.compare(pos_, 3, "\xE2\x88\x92") == 0) {
      neg = true;
      pos_ += 3;
      return true;
    }
    return false;
  }
  uint64_t number() {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) error("expected a number");
    uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (1ULL << 40)) error("number too large");
      ++pos_;
    }
    return v;
  }
  void parse_term(Poly& P, bool neg) {
    Elem c = 1;
    Exps e(n_, 0);
    bool any = false;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) error("expected a factor");
      char ch = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        c = F_.mul(c, F_.from_int(static_cast<int64_t>(number() % F_.p())));
      } else if (ch == '[') {
        size_t close = s_.find(']', pos_);
        if (close == std::string::npos) error("unterminated element");
        Elem v;
        try {
          v = F_.parse(s_.substr(pos_, close - pos_ + 1));
        } catch (const Error&) {
          error("bad field element");
        }
        c = F_.mul(c, v);
        pos_ = close + 1;
      } else if (ch == 'x') {
        size_t at = pos_;
        ++pos_;
        uint64_t idx = number();
        if (idx >= static_cast<uint64_t>(n_)) {
          pos_ = at;
          fail(ErrorCode::UnknownVariable, "x" + std::to_string(idx) + " with n = " + std::to_string(n_) +
                                               " at position " + std::to_string(at));
        }
        skip();
        uint64_t pw = 1;
        if (pos_ < s_.size() && s_[pos_] == '^') {
          ++pos_;
          skip();
          pw = number();
          if (pw > 1000) error("exponent too large");
        }
        e[idx] = static_cast<uint16_t>(e[idx] + pw);
      } else {
        error(std::string("unexpected character '") + ch + "'");
      }
      any = true;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!any) error("empty term");
    P.add_term(e, neg ? F_.neg(c) : c);
  }

  const std::string& s_;
  int n_;
  const Field& F_;
  size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text, int n, const Field& F) { return PolyParser(text, n, F).parse(); }

CompiledPoly::CompiledPoly(const Poly& P) : F_(P.field()), n_(P.n()) {
  for (auto& [e, c] : P.terms()) {
    coef_.push_back(c);
    start_.push_back(static_cast<uint32_t>(var_.size()));
    for (int i = 0; i < n_; ++i)
      if (e[i]) {
        var_.push_back(static_cast<uint16_t>(i));
        exp_.push_back(e[i]);
      }
  }
  start_.push_back(static_cast<uint32_t>(var_.size()));
}

Elem CompiledPoly::eval(const Elem* x) const {
  Elem s = 0;
  for (size_t t = 0; t < coef_.size(); ++t) {
    Elem v = coef_[t];
    for (uint32_t k = start_[t]; k < start_[t + 1] && v; ++k) {
      Elem b = x[var_[k]];
      uint16_t e = exp_[k];
      if (e == 1)
        v = F_.mul(v, b);
      else if (e == 2)
        v = F_.mul(v, F_.mul(b, b));
      else
        v = F_.mul(v, F_.pow(b, e));
    }
    s = F_.add(s, v);
  }
  return s;
}

int PolyFamily::max_degree() const {
  int d = 0;
  for (auto& P : members) d = std::max(d, P.degree());
  return d;
}

int PolyFamily::D() const {
  int d = 0;
  for (auto& P : members) d += std::max(0, P.degree());
  return d;
}

bool PolyFamily::homogeneous() const {
  for (auto& P : members)
    if (!P.is_homogeneous()) return false;
  return true;
}

bool PolyFamily::contains(const Vec& x) const {
  for (auto& P : members)
    if (P.eval(x) != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Rank search

namespace {

std::vector<Exps> monomials_of_degree(int n, int d) {
  std::vector<Exps> out;
  Exps e(n, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n - 1) {
      e[i] = static_cast<uint16_t>(left);
      out.push_back(e);
      e[i] = 0;
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[i] = static_cast<uint16_t>(k);
      self(self, i + 1, left - k);
    }
    e[i] = 0;
  };
  if (n == 0) {
    if (d == 0) out.push_back(e);
    return out;
  }
  rec(rec, 0, d);
  return out;
}

std::vector<Exps> monomials_up_to(int n, int lo, int hi) {
  std::vector<Exps> out;
  for (int d = lo; d <= hi; ++d) {
    auto m = monomials_of_degree(n, d);
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

double ipow(double b, double e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct ProductSet {
  std::vector<Exps> target;
  std::map<Exps, int> index;
  std::unordered_set<std::string> keys;
  size_t width = 1;

  std::string key_of(const std::vector<Elem>& v) const {
    std::string k(v.size() * width, '\0');
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t b = 0; b < width; ++b) k[i * width + b] = static_cast<char>((v[i] >> (8 * b)) & 0xFF);
    return k;
  }
};

// Odometer over nonzero coefficient vectors; `normalized` keeps only those
// whose first nonzero entry is 1.
bool next_vec(std::vector<Elem>& v, uint32_t q) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (++v[i] < q) return true;
    v[i] = 0;
  }
  return false;
}

bool first_nonzero_is_one(const std::vector<Elem>& v) {
  for (Elem e : v)
    if (e) return e == 1;
  return false;
}

bool has_nonconstant(const std::vector<Elem>& v, const std::vector<Exps>& monos) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] && total_degree(monos[i]) > 0) return true;
  return false;
}

}  // namespace

RankResult schmidt_rank(const Poly& P, const RankOptions& opt) {
  const Field& F = P.field();
  int n = P.n();
  int d = P.degree();
  if (P.is_zero()) return {0, true};
  if (d < 2) fail(ErrorCode::PreconditionViolated, "rank search needs degree >= 2");
  bool homog = P.is_homogeneous();
  uint32_t q = F.q();

  ProductSet S;
  S.width = q <= 256 ? 1 : (q <= 65536 ? 2 : 4);
  S.target = homog ? monomials_of_degree(n, d) : monomials_up_to(n, 0, d);
  for (size_t i = 0; i < S.target.size(); ++i) S.index[S.target[i]] = static_cast<int>(i);

  // Size check before any enumeration.
  double planned = 0;
  for (int e = 1; 2 * e <= d; ++e) {
    auto A = homog ? monomials_of_degree(n, e) : monomials_up_to(n, 0, e);
    auto B = homog ? monomials_of_degree(n, d - e) : monomials_up_to(n, 0, d - e);
    planned += ipow(q, A.size()) / (q - 1) * ipow(q, B.size());
  }
  if (planned > static_cast<double>(opt.budget))
    fail(ErrorCode::InfeasibleSearch, "product space of size " + std::to_string(planned) + " exceeds budget");

  std::vector<Elem> prod(S.target.size());
  for (int e = 1; 2 * e <= d; ++e) {
    auto A = homog ? monomials_of_degree(n, e) : monomials_up_to(n, 0, e);
    auto B = homog ? monomials_of_degree(n, d - e) : monomials_up_to(n, 0, d - e);
    std::vector<std::vector<int>> mt(A.size(), std::vector<int>(B.size()));
    for (size_t i = 0; i < A.size(); ++i)
      for (size_t j = 0; j < B.size(); ++j) {
        Exps s(n);
        for (int k = 0; k < n; ++k) s[k] = static_cast<uint16_t>(A[i][k] + B[j][k]);
        mt[i][j] = S.index.at(s);
      }
    std::vector<Elem> a(A.size(), 0);
    while (next_vec(a, q)) {
      if (!first_nonzero_is_one(a) || !has_nonconstant(a, A)) continue;
      std::vector<Elem> b(B.size(), 0);
      while (next_vec(b, q)) {
        if (!has_nonconstant(b, B)) continue;
        std::fill(prod.begin(), prod.end(), 0);
        for (size_t i = 0; i < A.size(); ++i) {
          if (!a[i]) continue;
          for (size_t j = 0; j < B.size(); ++j)
            if (b[j]) prod[mt[i][j]] = F.add(prod[mt[i][j]], F.mul(a[i], b[j]));
        }
        S.keys.insert(S.key_of(prod));
      }
    }
  }

  std::vector<Elem> target(S.target.size(), 0);
  for (auto& [e, c] : P.terms()) target[S.index.at(e)] = c;

  if (S.keys.count(S.key_of(target))) return {1, true};
  if (opt.search_bound < 2) return {2, false};

  // Decode keys back into vectors for subtraction.
  std::vector<std::vector<Elem>> members;
  members.reserve(S.keys.size());
  for (auto& k : S.keys) {
    std::vector<Elem> v(S.target.size());
    for (size_t i = 0; i < v.size(); ++i) {
      Elem x = 0;
      for (size_t b = 0; b < S.width; ++b) x |= static_cast<Elem>(static_cast<uint8_t>(k[i * S.width + b])) << (8 * b);
      v[i] = x;
    }
    members.push_back(std::move(v));
  }

  // rank r: some (r-1)-tuple of members leaves a remainder in S.
  std::vector<Elem> rem(S.target.size());
  for (int r = 2; r <= opt.search_bound; ++r) {
    double cost = ipow(static_cast<double>(members.size()), r - 1);
    if (cost > static_cast<double>(opt.budget))
      fail(ErrorCode::InfeasibleSearch, "rank-" + std::to_string(r) + " test needs " + std::to_string(cost) + " candidates");
    std::vector<size_t> idx(r - 1, 0);
    for (;;) {
      rem = target;
      for (size_t t : idx)
        for (size_t i = 0; i < rem.size(); ++i) rem[i] = F.sub(rem[i], members[t][i]);
      if (S.keys.count(S.key_of(rem))) return {r, true};
      // nondecreasing tuples
      int k = r - 2;
      while (k >= 0 && idx[k] + 1 >= members.size()) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < r - 1; ++j) idx[j] = idx[k];
    }
  }
  return {opt.search_bound + 1, false};
}

RankResult family_rank(const PolyFamily& fam, const RankOptions& opt) {
  if (fam.members.empty()) fail(ErrorCode::PreconditionViolated, "empty family");
  const Field& F = fam.F;
  int L = fam.L();
  std::vector<Elem> a(L, 0);
  int best_exact = INT32_MAX;
  int best_bound = INT32_MAX;
  while (next_vec(a, F.q())) {
    Poly comb(F, fam.n);
    for (int i = 0; i < L; ++i) comb = comb + fam.members[i].scaled(a[i]);
    if (comb.is_zero()) continue;
    if (comb.degree() <= 1) return {0, true};
    if (best_exact == 1) continue;
    RankOptions o = opt;
    if (best_exact != INT32_MAX) o.search_bound = std::min(o.search_bound, best_exact - 1);
    if (o.search_bound < 1) continue;
    RankResult r = schmidt_rank(comb, o);
    if (r.exact)
      best_exact = std::min(best_exact, r.rank);
    else
      best_bound = std::min(best_bound, r.rank);
  }
  if (best_exact == INT32_MAX && best_bound == INT32_MAX) fail(ErrorCode::PreconditionViolated, "all combinations vanish");
  if (best_exact <= best_bound) return {best_exact, true};
  return {best_bound, false};
}

int classical_quadratic_rank(const Poly& Q) {
  const Field& F = Q.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "symmetric-matrix model needs odd characteristic");
  if (Q.is_zero()) return 0;
  if (Q.degree() != 2 || !Q.is_homogeneous()) fail(ErrorCode::NotQuadratic, "expected a homogeneous quadratic");
  int n = Q.n();
  Mat M(n, n);
  Elem h = F.half();
  for (auto& [e, c] : Q.terms()) {
    std::vector<int> v;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < e[i]; ++k) v.push_back(i);
    if (v[0] == v[1]) {
      M.at(v[0], v[0]) = c;
    } else {
      M.at(v[0], v[1]) = F.mul(c, h);
      M.at(v[1], v[0]) = F.mul(c, h);
    }
  }
  return rank(F, M);
}

// ---------------------------------------------------------------------------
// Degree estimate

namespace {

using UPoly = std::vector<Elem>;  // low degree first

void trim(UPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

UPoly umod(const Field& K, UPoly a, const UPoly& b) {
  trim(a);
  Elem ib = K.inv(b.back());
  while (a.size() >= b.size()) {
    Elem c = K.mul(a.back(), ib);
    size_t off = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = K.sub(a[off + i], K.mul(c, b[i]));
    trim(a);
  }
  return a;
}

UPoly udiv(const Field& K, UPoly a, const UPoly& b) {
  trim(a);
  if (a.size() < b.size()) return {};
  UPoly qt(a.size() - b.size() + 1, 0);
  Elem ib = K.inv(b.back());
  while (a.size() >= b.size()) {
    Elem c = K.mul(a.back(), ib);
    size_t off = a.size() - b.size();
    qt[off] = c;
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = K.sub(a[off + i], K.mul(c, b[i]));
    a.pop_back();
    trim(a);
    if (a.size() < b.size()) break;
  }
  trim(qt);
  return qt;
}

UPoly umonic(const Field& K, UPoly a) {
  trim(a);
  if (a.empty()) return a;
  Elem iv = K.inv(a.back());
  for (auto& x : a) x = K.mul(x, iv);
  return a;
}

UPoly ugcd(const Field& K, UPoly a, UPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    UPoly r = umod(K, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return umonic(K, a);
}

UPoly uderiv(const Field& K, const UPoly& a) {
  UPoly d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(K.mul(K.from_int(static_cast<int64_t>(i)), a[i]));
  trim(d);
  return d;
}

bool is_one(const UPoly& a) { return a.size() == 1 && a[0] == 1; }

// Degree of the radical (number of distinct roots over the closure).
int rad_degree(const Field& K, UPoly f) {
  f = umonic(K, f);
  if (f.size() <= 1) return 0;
  int p = K.p();
  uint64_t root_exp = K.q() / p;  // a -> a^(q/p) inverts Frobenius
  UPoly g = uderiv(K, f);
  int total = 0;
  if (!g.empty()) {
    UPoly c = ugcd(K, f, g);
    UPoly w = udiv(K, f, c);
    while (!is_one(w)) {
      UPoly y = ugcd(K, w, c);
      UPoly fac = udiv(K, w, y);
      total += static_cast<int>(fac.size()) - 1;
      w = y;
      c = udiv(K, c, y);
    }
    if (!is_one(c)) {
      UPoly r;
      for (size_t i = 0; i < c.size(); i += p) r.push_back(K.pow(c[i], root_exp));
      total += rad_degree(K, r);
    }
  } else {
    UPoly r;
    for (size_t i = 0; i < f.size(); i += p) r.push_back(K.pow(f[i], root_exp));
    total += rad_degree(K, r);
  }
  return total;
}

}  // namespace

DegreeEstimate variety_degree_estimate(const PolyFamily& fam, int ext_degree, int trials, uint64_t seed) {
  const Field& F = fam.F;
  if (fam.members.empty()) fail(ErrorCode::PreconditionViolated, "empty family");
  if (ext_degree < 1 || F.l() * ext_degree > 3) fail(ErrorCode::UnsupportedField, "extension degree must keep l*m <= 3");
  if (ext_degree > 1 && F.l() > 1) fail(ErrorCode::UnsupportedField, "extension of a non-prime field");
  Field K = Field::make(F.p(), F.l() * ext_degree);
  int n = fam.n;
  int L = fam.L();
  int k = L + 1;  // vector dimension of the sampled subspace
  if (k > n) fail(ErrorCode::PreconditionViolated, "codimension too large for the ambient space");

  // Coefficients move into K: for l = 1 through the prime subfield; for m = 1 K is F.
  auto lift = [&](Elem c) -> Elem { return ext_degree == 1 ? c : K.from_int(c); };
  std::vector<Poly> lifted;
  for (auto& P : fam.members) {
    Poly R(K, n);
    for (auto& [e, c] : P.terms()) R.add_term(e, lift(c));
    lifted.push_back(R);
  }

  Rng rng(seed);
  DegreeEstimate out;
  for (int t = 0; t < trials; ++t) {
    Mat B(n, k);
    for (;;) {
      for (auto& e : B.a) e = static_cast<Elem>(rng.below(K.q()));
      if (rank(K, B) == k) break;
    }
    // Restriction to the subspace: x = B t.
    std::vector<Poly> restricted;
    for (auto& P : lifted) restricted.push_back(P.compose_affine(B, {}));
    int count = 0;
    if (L == 1) {
      const Poly& R = restricted[0];
      if (R.is_zero()) {
        out.counts.push_back(-1);
        continue;
      }
      int d = R.degree();
      // f(t0) = R(t0, 1); root at infinity iff the t0^d coefficient vanishes.
      UPoly f(d + 1, 0);
      for (auto& [e, c] : R.terms()) f[e[0]] = K.add(f[e[0]], c);
      Exps top(2, 0);
      top[0] = static_cast<uint16_t>(d);
      bool at_inf = R.coeff(top) == 0;
      UPoly g = f;
      trim(g);
      count = (g.empty() ? 0 : rad_degree(K, g)) + (at_inf ? 1 : 0);
      if (g.empty()) {
        out.counts.push_back(-1);
        continue;
      }
    } else {
      // Rational points of P^L(K); a lower bound for the closure count.
      std::vector<CompiledPoly> cp;
      for (auto& R : restricted) cp.emplace_back(R);
      Vec x(k, 0);
      uint64_t total = 1;
      for (int i = 0; i < k; ++i) total *= K.q();
      for (uint64_t idx = 1; idx < total; ++idx) {
        uint64_t v = idx;
        for (int i = k - 1; i >= 0; --i) {
          x[i] = static_cast<Elem>(v % K.q());
          v /= K.q();
        }
        // first nonzero coordinate equal to one: one representative per line
        int fnz = 0;
        while (x[fnz] == 0) ++fnz;
        if (x[fnz] != 1) continue;
        bool on = true;
        for (auto& c : cp)
          if (c.eval(x) != 0) {
            on = false;
            break;
          }
        if (on) ++count;
      }
    }
    out.counts.push_back(count);
  }
  std::map<int, int> freq;
  for (int c : out.counts)
    if (c >= 0) freq[c]++;
  int best = -1, best_n = 0;
  for (auto& [c, m] : freq)
    if (m > best_n) {
      best = c;
      best_n = m;
    }
  if (best_n < 2) fail(ErrorCode::DegenerateSampling, "no two trials agree");
  out.value = best;
  return out;
}

bool is_function_of(const Poly& P, const std::vector<Poly>& Qs, uint64_t budget) {
  const Field& F = P.field();
  int n = P.n();
  double total = 1;
  for (int i = 0; i < n; ++i) total *= F.q();
  if (total > static_cast<double>(budget)) fail(ErrorCode::BudgetExceeded, "q^n exceeds enumeration budget");
  CompiledPoly cP(P);
  std::vector<CompiledPoly> cQ;
  for (auto& Q : Qs) {
    if (Q.n() != n) fail(ErrorCode::DimensionMismatch, "ring mismatch");
    cQ.emplace_back(Q);
  }
  std::unordered_map<std::string, Elem> seen;
  Vec x(n, 0);
  std::string key(cQ.size() * 4, '\0');
  for (uint64_t idx = 0; idx < static_cast<uint64_t>(total); ++idx) {
    uint64_t v = idx;
    for (int i = n - 1; i >= 0; --i) {
      x[i] = static_cast<Elem>(v % F.q());
      v /= F.q();
    }
    for (size_t j = 0; j < cQ.size(); ++j) {
      Elem y = cQ[j].eval(x);
      std::memcpy(&key[j * 4], &y, 4);
    }
    Elem pv = cP.eval(x);
    auto [it, ins] = seen.emplace(key, pv);
    if (!ins && it->second != pv) return false;
  }
  return true;
}

}  // namespace hirank

namespace hirank {

QuadraticFunction::QuadraticFunction(Field F, int n)
    : F_(std::move(F)), n_(n), a_(static_cast<size_t>(n) * (n + 1) / 2, 0), b_(n, 0) {}

QuadraticFunction QuadraticFunction::from_poly(const Poly& P) {
  if (P.degree() > 2) fail(ErrorCode::NotQuadratic, "degree " + std::to_string(P.degree()) + " > 2");
  QuadraticFunction g(P.field(), P.n());
  for (auto& [e, c] : P.terms()) {
    std::vector<int> v;
    for (int i = 0; i < P.n(); ++i)
      for (int k = 0; k < e[i]; ++k) v.push_back(i);
    if (v.empty())
      g.c_ = c;
    else if (v.size() == 1)
      g.b_[v[0]] = c;
    else
      g.a(v[0], v[1]) = c;
  }
  return g;
}

QuadraticFunction QuadraticFunction::linear_form(const Field& F, const Vec& b, Elem c) {
  QuadraticFunction g(F, static_cast<int>(b.size()));
  g.b_ = b;
  g.c_ = c;
  return g;
}

Poly QuadraticFunction::to_poly() const {
  Poly P(F_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      Exps e(n_, 0);
      e[i]++;
      e[j]++;
      P.add_term(e, a(i, j));
    }
  for (int i = 0; i < n_; ++i) {
    Exps e(n_, 0);
    e[i] = 1;
    P.add_term(e, b_[i]);
  }
  P.add_term(Exps(n_, 0), c_);
  return P;
}

Elem QuadraticFunction::quad(const Elem* x) const {
  Elem s = 0;
  size_t k = 0;
  for (int i = 0; i < n_; ++i) {
    if (x[i] == 0) {
      k += n_ - i;
      continue;
    }
    Elem row = 0;
    for (int j = i; j < n_; ++j, ++k)
      if (a_[k] && x[j]) row = F_.add(row, F_.mul(a_[k], x[j]));
    s = F_.add(s, F_.mul(row, x[i]));
  }
  return s;
}

Elem QuadraticFunction::eval(const Elem* x) const {
  Elem s = F_.add(quad(x), c_);
  for (int i = 0; i < n_; ++i)
    if (b_[i] && x[i]) s = F_.add(s, F_.mul(b_[i], x[i]));
  return s;
}

Vec QuadraticFunction::pair_row(const Vec& v) const {
  // B(u,v) = sum_i 2 a_ii u_i v_i + sum_{i<j} a_ij (u_i v_j + u_j v_i)
  Vec row(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      Elem c = a(i, j);
      if (!c) continue;
      if (i == j) {
        row[i] = F_.add(row[i], F_.mul(F_.add(c, c), v[i]));
      } else {
        row[i] = F_.add(row[i], F_.mul(c, v[j]));
        row[j] = F_.add(row[j], F_.mul(c, v[i]));
      }
    }
  return row;
}

Elem QuadraticFunction::pair(const Vec& u, const Vec& v) const { return dot(F_, pair_row(v), u); }

bool QuadraticFunction::homogeneous() const { return c_ == 0 && hirank::is_zero(b_); }

bool QuadraticFunction::is_zero() const {
  for (Elem e : a_)
    if (e) return false;
  return homogeneous();
}

QuadraticFunction QuadraticFunction::operator+(const QuadraticFunction& o) const {
  QuadraticFunction r = *this;
  for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = F_.add(a_[k], o.a_[k]);
  for (int i = 0; i < n_; ++i) r.b_[i] = F_.add(b_[i], o.b_[i]);
  r.c_ = F_.add(c_, o.c_);
  return r;
}

QuadraticFunction QuadraticFunction::scaled(Elem s) const {
  QuadraticFunction r = *this;
  for (auto& e : r.a_) e = F_.mul(s, e);
  for (auto& e : r.b_) e = F_.mul(s, e);
  r.c_ = F_.mul(s, r.c_);
  return r;
}

QuadraticFunction QuadraticFunction::operator-(const QuadraticFunction& o) const { return *this + o.scaled(F_.neg(1)); }

QuadraticFunction QuadraticFunction::compose_affine(const Mat& A, const Vec& t) const {
  return from_poly(to_poly().compose_affine(A, t));
}

}  // namespace hirank
