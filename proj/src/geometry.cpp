#include "hirank/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "hirank/errors.hpp"
#include "hirank/fourier.hpp"
#include "hirank/solve.hpp"

namespace hirank {

namespace {

uint64_t env_budget() {
  static const uint64_t v = [] {
    const char* s = std::getenv("HIRANK_BUDGET");
    if (!s || !*s) return uint64_t{0};
    std::string t(s);
    try {
      auto caret = t.find('^');
      if (caret != std::string::npos) {
        uint64_t b = std::stoull(t.substr(0, caret));
        uint64_t e = std::stoull(t.substr(caret + 1));
        uint64_t r = 1;
        for (uint64_t i = 0; i < e && r < (1ULL << 62); ++i) r *= b;
        return r;
      }
      return static_cast<uint64_t>(std::stoull(t));
    } catch (const std::exception&) {
      return uint64_t{0};
    }
  }();
  return v;
}

}  // namespace

uint64_t enumeration_budget() {
  uint64_t e = env_budget();
  return e ? e : (1ULL << 26);
}

uint64_t loop_budget() {
  uint64_t e = env_budget();
  return e ? e : (1ULL << 24);
}

Space::Space(Field F, int n) : F_(std::move(F)), n_(n) {
  size_ = 1;
  for (int i = 0; i < n; ++i) {
    if (size_ > (1ULL << 62) / F_.q()) fail(ErrorCode::BudgetExceeded, "q^n does not fit the index encoding");
    size_ *= F_.q();
  }
}

uint64_t Space::index(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_) fail(ErrorCode::DimensionMismatch, "point dimension");
  uint64_t idx = 0;
  for (int i = 0; i < n_; ++i) idx = idx * F_.q() + x[i];
  return idx;
}

void Space::point(uint64_t idx, Elem* out) const {
  for (int i = n_ - 1; i >= 0; --i) {
    out[i] = static_cast<Elem>(idx % F_.q());
    idx /= F_.q();
  }
}

Vec Space::point(uint64_t idx) const {
  Vec x(n_);
  point(idx, x.data());
  return x;
}

Variety::Variety(PolyFamily fam) : fam_(std::move(fam)) {
  for (auto& P : fam_.members)
    if (P.n() != fam_.n) fail(ErrorCode::DimensionMismatch, "family members live in different rings");
  S_ = Space(fam_.F, fam_.n);
}

Variety Variety::from_points(const Space& S, const std::vector<uint64_t>& points) {
  Variety X;
  X.S_ = S;
  X.fam_.F = S.field();
  X.fam_.n = S.n();
  X.explicit_ = true;
  auto c = std::make_shared<Cache>();
  c->member = Bitset(S.size());
  c->points = points;
  std::sort(c->points.begin(), c->points.end());
  c->points.erase(std::unique(c->points.begin(), c->points.end()), c->points.end());
  for (auto p : c->points) c->member.set(p);
  X.cache_ = c;
  return X;
}

const Variety::Cache* Variety::cache() const {
  if (cache_) return cache_.get();
  uint64_t N = S_.size();
  if (N > enumeration_budget())
    fail(ErrorCode::BudgetExceeded, "q^n = " + std::to_string(N) + " exceeds enumeration budget " +
                                        std::to_string(enumeration_budget()));
  auto c = std::make_shared<Cache>();
  c->member = Bitset(N);
  std::vector<CompiledPoly> cp;
  for (auto& P : fam_.members) cp.emplace_back(P);
  Vec x(S_.n(), 0);
  uint32_t q = S_.field().q();
  for (uint64_t idx = 0; idx < N; ++idx) {
    bool on = true;
    for (auto& P : cp)
      if (P.eval(x) != 0) {
        on = false;
        break;
      }
    if (on) {
      c->points.push_back(idx);
      c->member.set(idx);
    }
    for (int i = S_.n() - 1; i >= 0; --i) {
      if (++x[i] < q) break;
      x[i] = 0;
    }
  }
  cache_ = c;
  return cache_.get();
}

bool Variety::contains(const Vec& x) const {
  if (cache_) return cache_->member.test(S_.index(x));
  if (explicit_) return false;
  return fam_.contains(x);
}

std::optional<QuadraticFunction> Variety::quadric() const {
  if (explicit_ || fam_.L() != 1 || !field().odd()) return std::nullopt;
  const Poly& P = fam_.members[0];
  if (P.degree() != 2 || !P.is_homogeneous()) return std::nullopt;
  return QuadraticFunction::from_poly(P);
}

FunctionTable FunctionTable::restrict(const Variety& X, const std::function<Elem(const Vec&)>& f) {
  FunctionTable t(X.space());
  Vec x(X.n());
  for (uint64_t idx : X.points()) {
    X.space().point(idx, x.data());
    t.set(idx, f(x));
  }
  return t;
}

FunctionTable FunctionTable::restrict(const Variety& X, const Poly& P) {
  CompiledPoly cp(P);
  return restrict(X, [&](const Vec& x) { return cp.eval(x); });
}

FunctionTable FunctionTable::on_space(const Space& S, const std::function<Elem(const Vec&)>& f) {
  if (S.size() > enumeration_budget()) fail(ErrorCode::BudgetExceeded, "table over V exceeds budget");
  FunctionTable t(S);
  Vec x(S.n());
  for (uint64_t idx = 0; idx < S.size(); ++idx) {
    S.point(idx, x.data());
    t.set(idx, f(x));
  }
  return t;
}

Elem FunctionTable::at(uint64_t idx) const {
  Elem v = v_[idx];
  if (v == kUndef) {
    Vec x = S_.point(idx);
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
    fail(ErrorCode::VertexOutsideDomain, "point " + s + ") is outside the table's domain");
  }
  return v;
}

uint64_t FunctionTable::domain_size() const {
  uint64_t c = 0;
  for (Elem v : v_) c += v != kUndef;
  return c;
}

Vec Cube::vertex(const Field& F, uint32_t mask) const {
  Vec x = base;
  for (int i = 0; i < m(); ++i)
    if (mask >> i & 1U) x = vadd(F, x, gens[i]);
  return x;
}

Elem derivative_fm_prime(const FunctionTable& f, const Cube& c) {
  const Field& F = f.field();
  Elem s = 0;
  thread_local Vec x;
  const size_t n = c.base.size();
  for (uint32_t mask = 1; mask < (1U << c.m()); ++mask) {
    x = c.base;
    for (int i = 0; i < c.m(); ++i)
      if (mask >> i & 1U)
        for (size_t j = 0; j < n; ++j) x[j] = F.add(x[j], c.gens[i][j]);
    Elem v = f.at(x);
    s = (__builtin_popcount(mask) & 1) ? F.sub(s, v) : F.add(s, v);
  }
  return s;
}

Elem derivative_fm(const FunctionTable& f, const Cube& c) {
  return f.field().add(f.at(c.base), derivative_fm_prime(f, c));
}

CubeStreamStats cubes(const Variety& X, int m, const Mode& mode, const CubeSink& sink) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  CubeStreamStats st;
  if (mode.exhaustive) {
    double work = std::pow(static_cast<double>(pts.size()), m + 1);
    if (work > static_cast<double>(loop_budget()) * 16)
      fail(ErrorCode::BudgetExceeded, "exhaustive cube stream over budget");
    // v_i ranges over X - u so that every vertex u + v_i is already in X.
    Cube c;
    c.gens.assign(m, Vec());
    std::vector<Vec> P;
    P.reserve(pts.size());
    for (auto idx : pts) P.push_back(S.point(idx));
    std::vector<size_t> pick(m, 0);
    const int n = S.n();
    Vec w(n);
    for (int i = 0; i < m; ++i) c.gens[i].assign(n, 0);
    for (const Vec& u : P) {
      c.base = u;
      std::fill(pick.begin(), pick.end(), 0);
      int dirty = 0;
      if (m == 0) {
        ++st.tried;
        ++st.emitted;
        if (!sink(c)) return st;
        continue;
      }
      for (;;) {
        for (int i = dirty; i < m; ++i) {
          const Vec& a = P[pick[i]];
          for (int j = 0; j < n; ++j) c.gens[i][j] = F.sub(a[j], u[j]);
        }
        ++st.tried;
        bool ok = true;
        for (uint32_t mask = 1; mask < (1U << m) && ok; ++mask) {
          if (__builtin_popcount(mask) < 2) continue;
          w = u;
          for (int i = 0; i < m; ++i)
            if (mask >> i & 1U)
              for (int j = 0; j < n; ++j) w[j] = F.add(w[j], c.gens[i][j]);
          ok = X.contains_idx(S.index(w));
        }
        if (ok) {
          ++st.emitted;
          if (!sink(c)) return st;
        }
        int k = m - 1;
        while (k >= 0 && ++pick[k] == P.size()) pick[k--] = 0;
        if (k < 0) break;
        dirty = k;
      }
    }
    return st;
  }
  Rng rng(mode.seed);
  if (pts.empty()) return st;
  Cube c;
  c.gens.assign(m, Vec());
  for (uint64_t t = 0; t < mode.samples; ++t) {
    c.base = S.point(pts[rng.below(pts.size())]);
    for (int i = 0; i < m; ++i) c.gens[i] = S.random(rng);
    ++st.tried;
    bool ok = true;
    for (uint32_t mask = 1; mask < (1U << m) && ok; ++mask) ok = X.contains_idx(S.index(c.vertex(F, mask)));
    if (ok) {
      ++st.emitted;
      if (!sink(c)) return st;
    }
  }
  return st;
}

namespace {

// All points a . gens for a in F_q^k, with coefficient vectors.
void span_points(const Field& F, const std::vector<Vec>& gens, const std::function<bool(const Vec&, const Vec&)>& fn) {
  int k = static_cast<int>(gens.size());
  int n = gens.empty() ? 0 : static_cast<int>(gens[0].size());
  Vec a(k, 0);
  for (;;) {
    Vec x(n, 0);
    for (int i = 0; i < k; ++i)
      if (a[i])
        for (int j = 0; j < n; ++j) x[j] = F.add(x[j], F.mul(a[i], gens[i][j]));
    if (!fn(a, x)) return;
    int i = k - 1;
    while (i >= 0 && ++a[i] == F.q()) a[i--] = 0;
    if (i < 0) return;
  }
}

bool span_inside(const Variety& X, const std::vector<Vec>& gens) {
  bool ok = true;
  span_points(X.field(), gens, [&](const Vec&, const Vec& x) {
    ok = X.contains(x);
    return ok;
  });
  return ok;
}

std::string mat_key(const Field& F, const std::vector<Vec>& gens) {
  Mat m = Mat::from_rows(gens, static_cast<int>(gens[0].size()));
  rref(F, m);
  return std::string(reinterpret_cast<const char*>(m.a.data()), m.a.size() * sizeof(Elem));
}

// Check of f on the span of a frame. deg 1 means homogeneous linear.
bool check_frame(const FunctionTable& f, const std::vector<Vec>& gens, int deg, std::string& detail) {
  const Field& F = f.field();
  if (deg == 1) {
    std::vector<Elem> fv;
    for (auto& g : gens) fv.push_back(f.at(g));
    bool ok = true;
    span_points(F, gens, [&](const Vec& a, const Vec& x) {
      Elem want = 0;
      for (size_t i = 0; i < gens.size(); ++i) want = F.add(want, F.mul(a[i], fv[i]));
      if (f.at(x) != want) {
        ok = false;
        detail = "coefficients (";
        for (size_t i = 0; i < a.size(); ++i) detail += (i ? "," : "") + std::to_string(a[i]);
        detail += ")";
      }
      return ok;
    });
    return ok;
  }
  bool ok = restriction_is_polynomial(f, gens, deg);
  if (!ok) detail = "no polynomial of degree <= " + std::to_string(deg) + " fits";
  return ok;
}

WitnessReport weak_check(const FunctionTable& f, const Variety& X, const Mode& mode, int k, int deg) {
  const Space& S = X.space();
  const Field& F = S.field();
  WitnessReport rep;
  if (mode.exhaustive) {
    const auto& pts = X.points();
    double work = std::pow(static_cast<double>(pts.size()), 2);
    if (work > static_cast<double>(loop_budget()) * 16)
      fail(ErrorCode::BudgetExceeded, "exhaustive frame enumeration over budget");
    std::vector<Vec> P;
    for (auto idx : pts) P.push_back(S.point(idx));
    // Extensions depend only on the span, so each partial span is explored once.
    std::vector<std::set<std::string>> seen(k + 1);
    std::vector<Vec> frame;
    std::vector<std::vector<uint32_t>> cand(k + 1);
    std::vector<int> pivots(k + 1, -1);
    cand[0].resize(P.size());
    for (size_t i = 0; i < P.size(); ++i) cand[0][i] = static_cast<uint32_t>(i);
    std::function<bool()> rec = [&]() -> bool {
      if (static_cast<int>(frame.size()) == k) {
        ++rep.checked;
        std::string detail;
        if (!check_frame(f, frame, deg, detail)) {
          rep.verdict = false;
          rep.witness = frame;
          rep.detail = detail;
          return false;
        }
        return true;
      }
      const size_t L = frame.size();
      // Only points whose sum with the newest frame vector stays in X can extend it.
      if (L > 0) {
        cand[L].clear();
        for (uint32_t i : cand[L - 1])
          if (X.contains(vadd(F, P[i], frame.back()))) cand[L].push_back(i);
      }
      // Echelon frames only: leading entry 1, pivots increasing, zero at earlier pivots.
      // The reduced echelon basis of every subspace passes this filter.
      for (uint32_t i : cand[L]) {
        const Vec& v = P[i];
        int lead = 0;
        while (lead < S.n() && v[lead] == 0) ++lead;
        if (lead == S.n() || v[lead] != 1 || (L > 0 && lead <= pivots[L - 1])) continue;
        bool clean = true;
        for (size_t j = 0; j < L && clean; ++j) clean = v[pivots[j]] == 0;
        if (!clean) continue;
        pivots[L] = lead;
        frame.push_back(v);
        bool good = rank(F, frame, S.n()) == static_cast<int>(frame.size()) &&
                    seen[frame.size()].insert(mat_key(F, frame)).second && span_inside(X, frame);
        if (good && !rec()) return false;
        frame.pop_back();
      }
      return true;
    };
    rec();
    return rep;
  }
  Rng rng(mode.seed);
  for (uint64_t t = 0; t < mode.samples; ++t) {
    auto frame = sample_isotropic_frame(X, k, rng);
    if (!frame) continue;
    ++rep.checked;
    std::string detail;
    if (!check_frame(f, *frame, deg, detail)) {
      rep.verdict = false;
      rep.witness = *frame;
      rep.detail = detail;
      return rep;
    }
  }
  return rep;
}

}  // namespace

bool restriction_is_polynomial(const FunctionTable& f, const std::vector<Vec>& gens, int deg) {
  const Field& F = f.field();
  int k = static_cast<int>(gens.size());
  // Monomials in the frame coordinates of degree <= deg, exponents < q.
  std::vector<Exps> monos;
  Exps e(k, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == k) {
      monos.push_back(e);
      return;
    }
    for (int d = 0; d <= left && d < static_cast<int>(F.q()); ++d) {
      e[i] = static_cast<uint16_t>(d);
      rec(i + 1, left - d);
    }
    e[i] = 0;
  };
  rec(0, deg);
  std::vector<Vec> rows;
  Vec rhs;
  span_points(F, gens, [&](const Vec& a, const Vec& x) {
    Vec row;
    for (auto& m : monos) {
      Elem v = 1;
      for (int i = 0; i < k; ++i)
        if (m[i]) v = F.mul(v, F.pow(a[i], m[i]));
      row.push_back(v);
    }
    rows.push_back(row);
    rhs.push_back(f.at(x));
    return true;
  });
  Mat A = Mat::from_rows(rows, static_cast<int>(monos.size()));
  return solve_affine(F, A, rhs).has_value();
}

WitnessReport is_weakly_linear(const FunctionTable& f, const Variety& X, const Mode& mode) {
  return weak_check(f, X, mode, 2, 1);
}

WitnessReport is_weakly_quadratic(const FunctionTable& f, const Variety& X, const Mode& mode) {
  return weak_check(f, X, mode, 3, 2);
}

std::optional<std::vector<Vec>> sample_isotropic_frame(const Variety& X, int k, Rng& rng, int attempts) {
  const Space& S = X.space();
  const Field& F = S.field();
  if (auto Q = X.quadric()) {
    for (int t = 0; t < attempts; ++t) {
      Mat D(k, k);
      auto fr = try_gram_realize(*Q, D, rng, {}, 2);
      if (!fr) continue;
      if (rank(F, *fr, S.n()) == k) return fr;
    }
    return std::nullopt;
  }
  const auto& pts = X.points();
  if (pts.size() < 2) return std::nullopt;
  for (int t = 0; t < attempts; ++t) {
    std::vector<Vec> fr;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      bool found = false;
      for (int r = 0; r < 64 && !found; ++r) {
        Vec v = S.point(pts[rng.below(pts.size())]);
        fr.push_back(v);
        if (rank(F, fr, S.n()) == static_cast<int>(fr.size()) && span_inside(X, fr))
          found = true;
        else
          fr.pop_back();
      }
      ok = found;
    }
    if (ok) return fr;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// F and E

namespace {

struct ShiftTables {
  uint64_t N = 0, W = 0;
  std::vector<uint64_t> shift;  // row v: {x : x + v in X}
  std::vector<uint64_t> refl;   // row u: {y : u - y in X}
  const uint64_t* S(uint64_t v) const { return &shift[v * W]; }
  const uint64_t* R(uint64_t u) const { return &refl[u * W]; }
};

ShiftTables build_shift_tables(const Variety& X, bool with_refl) {
  const Space& S = X.space();
  ShiftTables t;
  t.N = S.size();
  t.W = (t.N + 63) / 64;
  if (static_cast<double>(t.N) * static_cast<double>(t.N) > static_cast<double>(1ULL << 30))
    fail(ErrorCode::BudgetExceeded, "shift tables need q^{2n} bits");
  t.shift.assign(t.N * t.W, 0);
  if (with_refl) t.refl.assign(t.N * t.W, 0);
  std::vector<Vec> P(t.N);
  for (uint64_t i = 0; i < t.N; ++i) P[i] = S.point(i);
  const Field& F = S.field();
  for (uint64_t v = 0; v < t.N; ++v)
    for (uint64_t x = 0; x < t.N; ++x) {
      if (X.contains_idx(S.index(vadd(F, P[x], P[v])))) t.shift[v * t.W + (x >> 6)] |= 1ULL << (x & 63);
      if (with_refl && X.contains_idx(S.index(vsub(F, P[v], P[x])))) t.refl[v * t.W + (x >> 6)] |= 1ULL << (x & 63);
    }
  return t;
}

}  // namespace

bool in_F(const Variety& X, const Vec& v, const Vec& w) {
  const Space& S = X.space();
  const Field& F = S.field();
  Vec x(S.n());
  for (uint64_t idx : X.points()) {
    S.point(idx, x.data());
    if (X.contains_idx(S.index(vadd(F, x, v))) && X.contains_idx(S.index(vadd(F, x, w)))) return false;
  }
  return true;
}

bool in_E(const Variety& X, const Vec& v, const Vec& w, const Vec& u) {
  const Space& S = X.space();
  const Field& F = S.field();
  Vec y(S.n());
  Vec vw = vadd(F, v, w);
  for (uint64_t idx : X.points()) {
    S.point(idx, y.data());
    if (X.contains_idx(S.index(vadd(F, y, v))) && X.contains_idx(S.index(vadd(F, y, vw))) &&
        X.contains_idx(S.index(vsub(F, u, y))))
      return false;
  }
  return true;
}

CountResult ancillary_F(const Variety& X, const Mode& mode) {
  const Space& S = X.space();
  uint64_t N = S.size();
  CountResult r;
  if (mode.exhaustive) {
    if (static_cast<double>(N) * N > static_cast<double>(loop_budget()) * 4)
      fail(ErrorCode::BudgetExceeded, "F count needs q^{2n} pairs");
    auto t = build_shift_tables(X, false);
    const auto& Xw = X.membership().words();
    std::vector<uint64_t> A(t.W);
    for (uint64_t v = 0; v < N; ++v) {
      const uint64_t* Sv = t.S(v);
      for (uint64_t k = 0; k < t.W; ++k) A[k] = Xw[k] & Sv[k];
      for (uint64_t w = 0; w < N; ++w) {
        const uint64_t* Sw = t.S(w);
        bool hit = false;
        for (uint64_t k = 0; k < t.W && !hit; ++k) hit = (A[k] & Sw[k]) != 0;
        if (!hit) ++r.count;
      }
    }
    r.density = static_cast<double>(r.count) / (static_cast<double>(N) * N);
    r.estimate.value = r.density;
    return r;
  }
  Rng rng(mode.seed);
  uint64_t hits = 0;
  for (uint64_t s = 0; s < mode.samples; ++s) {
    Vec v = S.random(rng), w = S.random(rng);
    if (in_F(X, v, w)) ++hits;
  }
  r.count = hits;
  r.estimate = bernoulli_estimate(hits, mode.samples, mode.confidence, mode.seed);
  r.density = r.estimate.value;
  return r;
}

CountResult ancillary_E(const Variety& X, const Mode& mode) {
  const Space& S = X.space();
  const Field& F = S.field();
  uint64_t N = S.size();
  CountResult r;
  bool tables = static_cast<double>(N) * N <= static_cast<double>(1ULL << 30);
  if (mode.exhaustive) {
    if (static_cast<double>(N) * N * N > static_cast<double>(loop_budget()))
      fail(ErrorCode::BudgetExceeded, "E count needs q^{3n} triples");
    auto t = build_shift_tables(X, true);
    const auto& Xw = X.membership().words();
    std::vector<uint64_t> A(t.W);
    for (uint64_t v = 0; v < N; ++v) {
      Vec pv = S.point(v);
      for (uint64_t w = 0; w < N; ++w) {
        uint64_t vw = S.index(vadd(F, pv, S.point(w)));
        const uint64_t *Sv = t.S(v), *Svw = t.S(vw);
        bool any = false;
        for (uint64_t k = 0; k < t.W; ++k) {
          A[k] = Xw[k] & Sv[k] & Svw[k];
          any |= A[k] != 0;
        }
        if (!any) {
          r.count += N;
          continue;
        }
        for (uint64_t u = 0; u < N; ++u) {
          const uint64_t* Ru = t.R(u);
          bool hit = false;
          for (uint64_t k = 0; k < t.W && !hit; ++k) hit = (A[k] & Ru[k]) != 0;
          if (!hit) ++r.count;
        }
      }
    }
    r.density = static_cast<double>(r.count) / (static_cast<double>(N) * N * N);
    r.estimate.value = r.density;
    return r;
  }
  Rng rng(mode.seed);
  uint64_t hits = 0;
  if (tables) {
    auto t = build_shift_tables(X, true);
    const auto& Xw = X.membership().words();
    for (uint64_t s = 0; s < mode.samples; ++s) {
      uint64_t v = rng.below(N), w = rng.below(N), u = rng.below(N);
      uint64_t vw = S.index(vadd(F, S.point(v), S.point(w)));
      const uint64_t *Sv = t.S(v), *Svw = t.S(vw), *Ru = t.R(u);
      bool hit = false;
      for (uint64_t k = 0; k < t.W && !hit; ++k) hit = (Xw[k] & Sv[k] & Svw[k] & Ru[k]) != 0;
      if (!hit) ++hits;
    }
  } else {
    for (uint64_t s = 0; s < mode.samples; ++s) {
      Vec v = S.random(rng), w = S.random(rng), u = S.random(rng);
      if (in_E(X, v, w, u)) ++hits;
    }
  }
  r.count = hits;
  r.estimate = bernoulli_estimate(hits, mode.samples, mode.confidence, mode.seed);
  r.density = r.estimate.value;
  return r;
}

// ---------------------------------------------------------------------------
// Y2 / Y3

uint64_t y2_count_brute(const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  double work = std::pow(static_cast<double>(pts.size()), 3);
  if (work > static_cast<double>(loop_budget()) * 16) fail(ErrorCode::BudgetExceeded, "Y2 brute force over budget");
  std::vector<Vec> P;
  for (auto idx : pts) P.push_back(S.point(idx));
  uint64_t count = 0;
  // v_i = x_i - x with x + v_i in X.
  for (const Vec& x : P)
    for (const Vec& a : P) {
      Vec base = vsub(F, a, x);  // v1
      for (const Vec& b : P)
        if (X.contains_idx(S.index(vadd(F, b, base)))) ++count;  // x + v1 + v2 = b + v1
    }
  return count;
}

uint64_t y3_count_brute(const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  double work = std::pow(static_cast<double>(pts.size()), 4);
  if (work > static_cast<double>(loop_budget()) * 16) fail(ErrorCode::BudgetExceeded, "Y3 brute force over budget");
  std::vector<Vec> P;
  for (auto idx : pts) P.push_back(S.point(idx));
  uint64_t count = 0;
  for (const Vec& x : P)
    for (const Vec& a : P) {
      Vec v1 = vsub(F, a, x);
      for (const Vec& b : P) {
        Vec v2 = vsub(F, b, x);
        if (!X.contains_idx(S.index(vadd(F, a, v2)))) continue;
        for (const Vec& c : P) {
          Vec v3 = vsub(F, c, x);
          if (X.contains_idx(S.index(vadd(F, a, v3))) && X.contains_idx(S.index(vadd(F, b, v3))) &&
              X.contains_idx(S.index(vadd(F, vadd(F, a, v2), v3))))
            ++count;
        }
      }
    }
  return count;
}

namespace {

// P(x + sum of selected blocks) in a ring of blocks*n variables.
Poly lift_poly(const Poly& P, int n, int blocks, uint32_t mask) {
  const Field& F = P.field();
  int N = n * blocks;
  std::vector<Poly> img;
  for (int j = 0; j < n; ++j) {
    Poly t = Poly::variable(F, N, j);
    for (int b = 1; b < blocks; ++b)
      if (mask >> (b - 1) & 1U) t = t + Poly::variable(F, N, b * n + j);
    img.push_back(t);
  }
  return P.substitute(img);
}

uint64_t cube_count_characters(const Variety& X, int m) {
  if (X.explicit_points()) fail(ErrorCode::PreconditionViolated, "character count needs a polynomial family");
  std::vector<Poly> polys;
  for (auto& P : X.family().members)
    for (uint32_t mask = 0; mask < (1U << m); ++mask) polys.push_back(lift_poly(P, X.n(), m + 1, mask));
  std::vector<Elem> targets(polys.size(), 0);
  return count_via_characters(X.field(), X.n() * (m + 1), polys, {}, targets);
}

}  // namespace

uint64_t y2_count(const Variety& X) { return cube_count_characters(X, 2); }
uint64_t y3_count(const Variety& X) { return cube_count_characters(X, 3); }

// ---------------------------------------------------------------------------
// Fubini

double measure_homogeneity(const std::vector<uint32_t>& p, uint32_t image_size) {
  std::vector<uint64_t> fiber(image_size, 0);
  for (uint32_t t : p) {
    if (t >= image_size) fail(ErrorCode::InvalidArgument, "map value outside the declared image");
    ++fiber[t];
  }
  uint64_t lo = UINT64_MAX, hi = 0;
  for (uint32_t t = 0; t < image_size; ++t) {
    if (fiber[t] == 0) fail(ErrorCode::EmptyFiber, "fiber over " + std::to_string(t) + " is empty");
    lo = std::min(lo, fiber[t]);
    hi = std::max(hi, fiber[t]);
  }
  return static_cast<double>(hi) / static_cast<double>(lo);
}

FubiniReport fubini_check(const std::vector<uint32_t>& p, uint32_t image_size, const std::vector<bool>& in_P,
                          double eps) {
  FubiniReport r;
  r.C = measure_homogeneity(p, image_size);
  std::vector<uint64_t> fiber(image_size, 0), good(image_size, 0);
  uint64_t pc = 0;
  for (size_t s = 0; s < p.size(); ++s) {
    ++fiber[p[s]];
    if (in_P[s]) {
      ++good[p[s]];
      ++pc;
    }
  }
  double frac = static_cast<double>(pc) / static_cast<double>(p.size());
  r.applicable = frac >= 1.0 - eps && eps <= 1.0 / (r.C * r.C);
  r.bound = 1.0 - r.C * r.C * eps / 2.0;
  uint64_t qn = 0;
  for (uint32_t t = 0; t < image_size; ++t)
    if (static_cast<double>(good[t]) / static_cast<double>(fiber[t]) >= r.bound) ++qn;
  r.q_fraction = static_cast<double>(qn) / image_size;
  r.holds = !r.applicable || r.q_fraction >= r.bound;
  return r;
}

}  // namespace hirank
