#include "hirank/extend_quadratic.hpp"

#include <array>
#include <cmath>
#include <unordered_map>

#include "hirank/errors.hpp"
#include "hirank/solve.hpp"
#include "vote.hpp"

namespace hirank {

namespace {

// Give up on a point after this many failed draws; cube completion is the expensive one.
constexpr uint64_t kDrawMisses = 1024;
constexpr uint64_t kCubeMisses = 64;

void add_stat(Stats& s, const std::string& k, uint64_t v) { s.emplace_back(k, v); }

std::string vec_str(const Vec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

Vec vertex3(const Field& F, const Vec& x, const std::array<Vec, 3>& g, uint32_t mask) {
  Vec v = x;
  for (int i = 0; i < 3; ++i)
    if (mask >> i & 1U) v = vadd(F, v, g[i]);
  return v;
}

// Draw (y, z, w) so that x + omega.(y,z,w) is in X for every omega != 0.
// Quadric X: pairing constraints turn each step into a 1/q or 1/q^2 rejection.
bool draw_cube3(const Variety& X, const std::optional<QuadraticFunction>& Q, const Vec& x, Rng& rng,
                std::array<Vec, 3>& g) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  if (pts.empty()) return false;
  auto pick = [&]() { return S.point(pts[rng.below(pts.size())]); };
  if (Q) {
    Vec a = pick();
    g[0] = vsub(F, a, x);
    Vec ry = Q->pair_row(g[0]);
    Elem ty = dot(F, ry, x);
    bool found = false;
    for (int t = 0; t < 64 && !found; ++t) {
      Vec b = pick();
      if (dot(F, ry, b) != ty) continue;
      g[1] = vsub(F, b, x);
      found = true;
    }
    if (!found) return false;
    Vec rz = Q->pair_row(g[1]);
    Elem tz = dot(F, rz, x);
    found = false;
    for (int t = 0; t < 512 && !found; ++t) {
      Vec c = pick();
      if (dot(F, ry, c) != ty || dot(F, rz, c) != tz) continue;
      g[2] = vsub(F, c, x);
      found = true;
    }
    if (!found) return false;
  } else {
    bool found = false;
    for (int t = 0; t < 256 && !found; ++t) {
      Vec a = pick(), b = pick();
      g[0] = vsub(F, a, x);
      g[1] = vsub(F, b, x);
      found = X.contains(vadd(F, a, g[1]));
    }
    if (!found) return false;
    found = false;
    for (int t = 0; t < 4096 && !found; ++t) {
      g[2] = vsub(F, pick(), x);
      found = X.contains(vertex3(F, x, g, 5)) && X.contains(vertex3(F, x, g, 6)) && X.contains(vertex3(F, x, g, 7));
    }
    if (!found) return false;
  }
  for (uint32_t m = 1; m < 8; ++m)
    if (!X.contains(vertex3(F, x, g, m))) return false;
  return true;
}

// sum_{omega != 0} (-1)^{|omega|+1} f(x + omega.g): the value f(x) must take for f_3 to vanish.
template <class Fn>
std::optional<Elem> window3(const Field& F, const Vec& x, const std::array<Vec, 3>& g, Fn&& f) {
  Elem s = 0;
  for (uint32_t m = 1; m < 8; ++m) {
    std::optional<Elem> v = f(vertex3(F, x, g, m));
    if (!v) return std::nullopt;
    s = (__builtin_popcount(m) & 1) ? F.add(s, *v) : F.sub(s, *v);
  }
  return s;
}

void require_total(const FunctionTable& f, const Variety& X) {
  for (auto idx : X.points())
    if (!f.defined(idx)) f.at(idx);
}

std::vector<Exps> quad_monomials(int n) {
  std::vector<Exps> m;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Exps e(n, 0);
      ++e[i];
      ++e[j];
      m.push_back(e);
    }
  return m;
}

// Quadratic form from an oracle known to be a homogeneous quadratic, by polarization.
QuadraticFunction form_from_oracle(const Field& F, int n, const std::function<Elem(const Vec&)>& q) {
  QuadraticFunction r(F, n);
  std::vector<Elem> diag(n);
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0);
    e[i] = 1;
    diag[i] = q(e);
    r.a(i, i) = diag[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vec e(n, 0);
      e[i] = e[j] = 1;
      r.a(i, j) = F.sub(q(e), F.add(diag[i], diag[j]));
    }
  return r;
}

}  // namespace

EvenOdd even_odd_split(const FunctionTable& f, const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "even/odd split needs odd characteristic");
  require_total(f, X);
  EvenOdd r;
  r.odd = FunctionTable(S);
  r.even = FunctionTable(S);
  if (X.contains_idx(0)) r.f0 = f.at(uint64_t{0});
  Elem half = F.half();
  for (auto idx : X.points()) {
    Vec x = S.point(idx);
    uint64_t mi = S.index(vscale(F, F.neg(1), x));
    if (!X.contains_idx(mi)) fail(ErrorCode::PreconditionViolated, "X is not symmetric under negation");
    Elem a = F.sub(f.at(idx), r.f0), b = F.sub(f.at(mi), r.f0);
    r.odd.set(idx, F.mul(half, F.sub(a, b)));
    r.even.set(idx, F.mul(half, F.add(a, b)));
  }
  return r;
}

WitnessReport check_3cubes_origin(const FunctionTable& f, const Variety& X, const Mode& mode) {
  const Space& S = X.space();
  const Field& F = S.field();
  WitnessReport rep;
  Vec zero = S.zero();
  if (!X.contains_idx(0)) return rep;
  auto fval = [&](const Vec& v) -> std::optional<Elem> { return f.at(v); };
  auto test = [&](const std::array<Vec, 3>& g) {
    ++rep.checked;
    Elem s = F.sub(f.at(zero), *window3(F, zero, g, fval));
    if (s == 0) return true;
    rep.verdict = false;
    rep.witness = {g[0], g[1], g[2]};
    rep.detail = "f_3(0|y,z,w) = " + std::to_string(s);
    return false;
  };
  if (mode.exhaustive) {
    const auto& pts = X.points();
    double work = std::pow(static_cast<double>(pts.size()), 3);
    if (work > 16.0 * static_cast<double>(loop_budget())) fail(ErrorCode::BudgetExceeded, "3-cube enumeration over budget");
    std::vector<Vec> P;
    for (auto idx : pts) P.push_back(S.point(idx));
    std::array<Vec, 3> g;
    for (const Vec& y : P)
      for (const Vec& z : P) {
        Vec yz = vadd(F, y, z);
        if (!X.contains(yz)) continue;
        for (const Vec& w : P) {
          if (!X.contains(vadd(F, y, w)) || !X.contains(vadd(F, z, w)) || !X.contains(vadd(F, yz, w))) continue;
          g = {y, z, w};
          if (!test(g)) return rep;
        }
      }
    return rep;
  }
  Rng rng(mode.seed);
  auto Q = X.quadric();
  std::array<Vec, 3> g;
  for (uint64_t t = 0; t < mode.samples; ++t)
    if (draw_cube3(X, Q, zero, rng, g) && !test(g)) return rep;
  return rep;
}

Correction testing_correct_3(const FunctionTable& f, const Variety& X, const Mode& mode, const VotePolicy& policy) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  require_total(f, X);
  Correction out;
  out.h = FunctionTable(S);
  out.margin.assign(pts.size(), 0.0);
  auto fval = [&](const Vec& v) -> std::optional<Elem> { return f.at(v); };
  auto settle = [&](size_t k, bool majority, Elem value, double margin, uint64_t votes) {
    out.votes += votes;
    out.margin[k] = margin;
    if (majority) {
      out.h.set(pts[k], value);
    } else {
      out.h.set(pts[k], f.at(pts[k]));
      out.no_majority.push_back(pts[k]);
    }
  };
  if (mode.exhaustive) {
    double work = std::pow(static_cast<double>(pts.size()), 4);
    if (work > 16.0 * static_cast<double>(loop_budget())) fail(ErrorCode::BudgetExceeded, "exhaustive 3-correction over budget");
    std::vector<Vec> P;
    for (auto idx : pts) P.push_back(S.point(idx));
    std::array<Vec, 3> g;
    for (size_t k = 0; k < pts.size(); ++k) {
      const Vec& x = P[k];
      detail::Tally t(F.q());
      for (const Vec& a : P) {
        g[0] = vsub(F, a, x);
        for (const Vec& b : P) {
          g[1] = vsub(F, b, x);
          if (!X.contains(vertex3(F, x, g, 3))) continue;
          for (const Vec& c : P) {
            g[2] = vsub(F, c, x);
            if (!X.contains(vertex3(F, x, g, 5)) || !X.contains(vertex3(F, x, g, 6)) ||
                !X.contains(vertex3(F, x, g, 7)))
              continue;
            t.add(*window3(F, x, g, fval));
          }
        }
      }
      settle(k, t.strict_majority(), t.top(), t.margin(), t.total);
    }
    return out;
  }
  Rng rng(mode.seed);
  auto Q = X.quadric();
  std::array<Vec, 3> g;
  for (size_t k = 0; k < pts.size(); ++k) {
    Vec x = S.point(pts[k]);
    auto r = detail::adaptive_vote(F.q(), policy.min_votes, policy.max_votes, policy.margin, [&]() -> std::optional<Elem> {
      if (!draw_cube3(X, Q, x, rng, g)) return std::nullopt;
      return window3(F, x, g, fval);
    });
    settle(k, r.majority, r.value, r.margin, r.votes);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Setting

QuadraticSetting QuadraticSetting::make(const QuadraticFunction& Q) {
  const Field& F = Q.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "the quadratic pipeline needs odd characteristic");
  if (!Q.homogeneous()) fail(ErrorCode::NotQuadratic, "X must be cut out by a quadratic form");
  const int n = Q.n();
  QuadraticSetting s;
  Space S(F, n);
  // First point with Q = 1; otherwise the first represented nonzero value, rescaled.
  std::optional<Vec> first_nonzero;
  Vec x(n);
  uint64_t N = std::min<uint64_t>(S.size(), std::max<uint64_t>(enumeration_budget(), 1));
  for (uint64_t idx = 1; idx < N; ++idx) {
    S.point(idx, x.data());
    Elem v = Q.eval(x);
    if (v == 1) {
      s.v0 = x;
      break;
    }
    if (v && !first_nonzero) first_nonzero = x;
  }
  if (s.v0.empty()) {
    if (!first_nonzero) fail(ErrorCode::RankTooLow, "Q represents no nonzero value");
    s.v0 = *first_nonzero;
    s.scale = F.inv(Q.eval(*first_nonzero));
  }
  s.Q = Q.scaled(s.scale);
  s.v0_row = s.Q.pair_row(s.v0);
  return s;
}

bool QuadraticSetting::in_V0(const Vec& v) const { return dot(Q.field(), v0_row, v) == 0; }

std::optional<Elem> QuadraticSetting::root(const Vec& v) const {
  int64_t r = Q.field().sqrt(Q.eval(v));
  if (r < 0) return std::nullopt;
  return static_cast<Elem>(r);
}

Vec QuadraticSetting::project_V0(const Vec& v) const {
  const Field& F = Q.field();
  // B(v0, v0) = 2
  Elem c = F.mul(dot(F, v0_row, v), F.half());
  return vsub(F, v, vscale(F, c, v0));
}

// ---------------------------------------------------------------------------
// Lazy extender

struct QuadraticExtender::Impl {
  const Variety& X;
  const FunctionTable& f;
  QuadraticSetting s;
  VotePolicy policy;
  Rng rng;
  bool corrected;
  std::optional<QuadraticFunction> Xq;
  const FunctionTable* xsq_table = nullptr;
  std::unordered_map<uint64_t, Valued> h_memo, raw_memo, sq_memo, v0_memo;
  QuadStats st;

  Impl(const Variety& X_, const FunctionTable& f_, QuadraticSetting s_, VotePolicy p, uint64_t seed, bool c)
      : X(X_), f(f_), s(std::move(s_)), policy(p), rng(seed), corrected(c), Xq(X_.quadric()) {}

  const Field& F() const { return X.field(); }
  uint64_t idx(const Vec& v) const { return X.space().index(v); }

  Valued raw(const Vec& x) {
    uint64_t i = idx(x);
    if (auto it = raw_memo.find(i); it != raw_memo.end()) return it->second;
    std::array<Vec, 3> g;
    auto fval = [&](const Vec& v) -> std::optional<Elem> { return f.at(v); };
    auto r = detail::adaptive_vote(F().q(), policy.min_votes, policy.max_votes, policy.margin,
                                   [&]() -> std::optional<Elem> {
                                     if (!draw_cube3(X, Xq, x, rng, g)) return std::nullopt;
                                     return window3(F(), x, g, fval);
                                   }, kDrawMisses);
    st.h_votes += r.votes;
    Valued v{r.value, r.majority, r.margin, r.votes};
    raw_memo.emplace(i, v);
    return v;
  }

  Valued h(const Vec& x) {
    uint64_t i = idx(x);
    if (auto it = h_memo.find(i); it != h_memo.end()) return it->second;
    if (!X.contains_idx(i)) fail(ErrorCode::VertexOutsideDomain, "h queried outside X at " + vec_str(x));
    Valued out;
    if (corrected) {
      out = {f.at(i), true, 1.0, 0};
    } else {
      ++st.h_evals;
      // Symmetrized: h(x) = (h'(x) + h'(-x)) / 2.
      Valued a = raw(x), b = raw(vscale(F(), F().neg(1), x));
      out.ok = a.ok && b.ok;
      out.value = F().mul(F().half(), F().add(a.value, b.value));
      out.margin = std::min(a.margin, b.margin);
      out.votes = a.votes + b.votes;
      if (!out.ok) ++st.h_failed;
    }
    h_memo.emplace(i, out);
    return out;
  }

  bool reliable(const Valued& v) const { return v.ok && v.margin >= policy.margin; }

  Valued g_sq(const Vec& v) {
    if (xsq_table) return {xsq_table->at(v), true, 1.0, 0};
    uint64_t i = idx(v);
    if (auto it = sq_memo.find(i); it != sq_memo.end()) return it->second;
    if (!s.in_V0(v)) fail(ErrorCode::PreconditionViolated, "point not in V0: " + vec_str(v));
    auto a = s.root(v);
    if (!a) fail(ErrorCode::PreconditionViolated, "point not in X_sq: " + vec_str(v));
    Valued out;
    if (*a == 0) {
      out = h(v);
    } else {
      ++st.xsq_evals;
      const Field& K = F();
      const Elem A = *a, A2 = K.mul(A, A), twoA = K.add(A, A);
      const auto& pts = X.points();
      const Space& S = X.space();
      Vec rv = s.Q.pair_row(v);
      Vec av0 = vscale(K, A, s.v0);
      auto r = detail::adaptive_vote(K.q(), policy.min_votes, policy.max_votes, policy.margin,
                                     [&]() -> std::optional<Elem> {
                                       // y' = a v0 + y and z' = a v0 + z in X with y, z in V0,
                                       // B(y, v) = B(z, v) = 0 and B(y, z) = a^2.
                                       std::optional<Vec> yp, zp;
                                       for (int t = 0; t < 256 && !yp; ++t) {
                                         Vec c = S.point(pts[rng.below(pts.size())]);
                                         if (dot(K, s.v0_row, c) == twoA && dot(K, rv, c) == 0) yp = c;
                                       }
                                       if (!yp) return std::nullopt;
                                       Vec y = vsub(K, *yp, av0);
                                       Vec ry = s.Q.pair_row(y);
                                       for (int t = 0; t < 2048 && !zp; ++t) {
                                         Vec c = S.point(pts[rng.below(pts.size())]);
                                         if (dot(K, s.v0_row, c) == twoA && dot(K, rv, c) == 0 && dot(K, ry, c) == A2)
                                           zp = c;
                                       }
                                       if (!zp) return std::nullopt;
                                       Vec z = vsub(K, *zp, av0);
                                       Vec p[6] = {*yp, *zp, vadd(K, *yp, z), vadd(K, v, y), vadd(K, v, z),
                                                   vadd(K, vadd(K, v, y), z)};
                                       for (auto& q : p)
                                         if (!X.contains(q)) return std::nullopt;
                                       Valued hv[6];
                                       for (int k = 0; k < 6; ++k) {
                                         hv[k] = h(p[k]);
                                         if (!reliable(hv[k])) return std::nullopt;
                                       }
                                       // g(v) = -F_v(y, z)
                                       Elem Fv = K.sub(K.add(hv[0].value, hv[1].value), hv[2].value);
                                       Fv = K.sub(Fv, K.add(hv[3].value, hv[4].value));
                                       Fv = K.add(Fv, hv[5].value);
                                       return K.neg(Fv);
                                     }, kDrawMisses);
      st.xsq_votes += r.votes;
      if (r.votes == 0) ++st.empty_z;
      out = {r.value, r.majority, r.margin, r.votes};
      if (!out.ok) ++st.xsq_failed;
    }
    sq_memo.emplace(i, out);
    return out;
  }

  Valued g_v0(const Vec& v) {
    uint64_t i = idx(v);
    if (auto it = v0_memo.find(i); it != v0_memo.end()) return it->second;
    if (!s.in_V0(v)) fail(ErrorCode::PreconditionViolated, "point not in V0: " + vec_str(v));
    Valued out;
    if (s.root(v)) {
      out = g_sq(v);
    } else {
      ++st.v0_evals;
      const Field& K = F();
      auto [al, be] = sum_two_squares(K, s.Q.eval(v));
      Elem a = K.mul(al, al), b = K.mul(be, be);
      auto r = detail::adaptive_vote(K.q(), policy.min_votes, policy.max_votes, policy.margin,
                                     [&]() -> std::optional<Elem> {
                                       auto cube = try_complete_cube_v0(s.Q, s.v0, v, a, b, rng);
                                       if (!cube) {
                                         ++st.cube_failures;
                                         return std::nullopt;
                                       }
                                       std::array<Vec, 3> g = *cube;
                                       auto gval = [&](const Vec& u) -> std::optional<Elem> {
                                         if (!s.in_Xsq(u)) return std::nullopt;
                                         Valued gv = g_sq(u);
                                         if (!reliable(gv)) return std::nullopt;
                                         return gv.value;
                                       };
                                       // g(v) = sum_{omega != 0} (-1)^{|omega|+1} g(v + omega.g)
                                       return window3(K, v, g, gval);
                                     }, kCubeMisses);
      st.v0_votes += r.votes;
      out = {r.value, r.majority, r.margin, r.votes};
      if (!out.ok) ++st.v0_failed;
    }
    v0_memo.emplace(i, out);
    return out;
  }
};

QuadraticExtender::QuadraticExtender(const Variety& X, const FunctionTable& f_even, QuadraticSetting setting,
                                     VotePolicy policy, uint64_t seed, bool corrected)
    : p_(std::make_unique<Impl>(X, f_even, std::move(setting), policy, seed, corrected)) {}
QuadraticExtender::~QuadraticExtender() = default;
QuadraticExtender::QuadraticExtender(QuadraticExtender&&) noexcept = default;

Valued QuadraticExtender::h(const Vec& x) { return p_->h(x); }
Valued QuadraticExtender::g_sq(const Vec& v) { return p_->g_sq(v); }
Valued QuadraticExtender::g_v0(const Vec& v) { return p_->g_v0(v); }
void QuadraticExtender::set_xsq_table(const FunctionTable* g) { p_->xsq_table = g; }
const QuadraticSetting& QuadraticExtender::setting() const { return p_->s; }
const QuadStats& QuadraticExtender::stats() const { return p_->st; }
Rng& QuadraticExtender::rng() { return p_->rng; }

StageTable extend_to_Xsq(const FunctionTable& h, const Variety& X, const QuadraticSetting& s, const VotePolicy& policy,
                         uint64_t seed) {
  const Space& S = X.space();
  if (S.size() > enumeration_budget()) fail(ErrorCode::BudgetExceeded, "X_sq table over budget");
  QuadraticExtender ext(X, h, s, policy, seed, true);
  StageTable out;
  out.g = FunctionTable(S);
  Vec v(S.n());
  for (uint64_t i = 0; i < S.size(); ++i) {
    S.point(i, v.data());
    if (!s.in_Xsq(v)) continue;
    Valued r = ext.g_sq(v);
    out.votes += r.votes;
    out.g.set(i, r.value);
    if (!r.ok) out.failed.push_back(i);
  }
  return out;
}

StageTable extend_to_V0(const FunctionTable& g_sq, const Variety& X, const QuadraticSetting& s,
                        const VotePolicy& policy, uint64_t seed) {
  const Space& S = X.space();
  if (S.size() > enumeration_budget()) fail(ErrorCode::BudgetExceeded, "V0 table over budget");
  QuadraticExtender ext(X, g_sq, s, policy, seed, true);
  ext.set_xsq_table(&g_sq);
  StageTable out;
  out.g = FunctionTable(S);
  Vec v(S.n());
  for (uint64_t i = 0; i < S.size(); ++i) {
    S.point(i, v.data());
    if (!s.in_V0(v)) continue;
    Valued r = ext.g_v0(v);
    out.votes += r.votes;
    out.g.set(i, r.value);
    if (!r.ok) out.failed.push_back(i);
  }
  return out;
}

std::optional<FormFit> fit_quadratic_form(const Field& F, int n, const std::vector<Vec>& pts,
                                          const std::vector<Elem>& vals) {
  auto monos = quad_monomials(n);
  const int K = static_cast<int>(monos.size());
  Mat A(static_cast<int>(pts.size()), K);
  for (size_t r = 0; r < pts.size(); ++r) {
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) A.at(static_cast<int>(r), c++) = F.mul(pts[r][i], pts[r][j]);
  }
  auto sol = solve_affine(F, A, vals);
  if (!sol) return std::nullopt;
  FormFit out;
  out.unknowns = K;
  out.rank = K - static_cast<int>(sol->kernel.size());
  out.form = QuadraticFunction(F, n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.form.a(i, j) = sol->particular[c++];
  return out;
}

QuadraticFunction lift_V0_to_V(const QuadraticFunction& gV0, const std::function<std::optional<Elem>(const Vec&)>& f,
                               const Variety& X, const QuadraticSetting& s, Rng& rng, LiftReport* report) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  const auto& Q = s.Q;
  const auto& pts = X.points();
  LiftReport rep;

  // x0 in X outside W = V0, with a usable value.
  std::optional<Vec> x0;
  std::optional<Elem> fx0;
  for (int t = 0; t < 4096 && !x0 && !pts.empty(); ++t) {
    Vec c = S.point(pts[rng.below(pts.size())]);
    if (s.in_V0(c)) continue;
    if (auto v = f(c)) {
      x0 = c;
      fx0 = v;
    }
  }
  for (size_t k = 0; k < pts.size() && !x0; ++k) {
    Vec c = S.point(pts[k]);
    if (s.in_V0(c)) continue;
    if (auto v = f(c)) {
      x0 = c;
      fx0 = v;
    }
  }
  if (!x0) fail(ErrorCode::NoX0Found, "X lies inside V0 (or no reliable value off V0)");
  rep.x0 = *x0;
  const Elem bx = dot(F, s.v0_row, *x0);  // B(x0, v0) != 0
  const Elem ibx = F.inv(bx);
  auto cof = [&](const Vec& v) { return F.mul(dot(F, s.v0_row, v), ibx); };

  // q(v) = c(v)^2 f(x0) + gV0(w(v)), v = c(v) x0 + w(v), w(v) in W.
  QuadraticFunction q = form_from_oracle(F, n, [&](const Vec& v) {
    Elem c = cof(v);
    Vec w = vsub(F, v, vscale(F, c, *x0));
    return F.add(F.mul(F.mul(c, c), *fx0), gV0.quad(w));
  });

  std::vector<LinearConstraint> WN = {{s.v0_row, 0}, {Q.pair_row(*x0), 0}};
  SolveOptions so;
  so.rng = &rng;
  so.prefer_exhaustive = false;
  so.random_trials = 96;
  so.exhaustive_limit = 1ULL << 14;
  so.fallback_limit = 1ULL << 16;

  // lambda on x0 + M, affine with lambda(x0) = 0; extended linearly with lambda(x0) = 0.
  std::vector<Vec> rows;
  Vec rhs;
  rows.push_back(*x0);
  rhs.push_back(0);
  const int want_aff = 2 * n + 8;
  for (int t = 0; t < 8 * want_aff && static_cast<int>(rows.size()) < want_aff + 1; ++t) {
    auto u = try_affine_quadric_solve(Q, WN, *x0, 0, so);
    if (!u) continue;
    Vec x = vadd(F, *x0, *u);
    auto fv = f(x);
    if (!fv) continue;
    rows.push_back(*u);
    rhs.push_back(F.sub(*fv, q.quad(x)));
  }
  rep.affine_points = rows.size() - 1;
  Mat A = Mat::from_rows(rows, n);
  auto lam = solve_affine(F, A, rhs);
  if (!lam) fail(ErrorCode::InconsistentFit, "f - q is not affine on (x0 + M) meet X");
  const Vec& lambda = lam->particular;
  Vec mu = vscale(F, ibx, s.v0_row);
  QuadraticFunction lm(F, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      lm.a(i, j) = i == j ? F.mul(lambda[i], mu[i]) : F.add(F.mul(lambda[i], mu[j]), F.mul(lambda[j], mu[i]));

  auto f2 = [&](const Vec& x) -> std::optional<Elem> {
    auto fv = f(x);
    if (!fv) return std::nullopt;
    return F.sub(F.sub(*fv, q.quad(x)), lm.quad(x));
  };

  // Spot check: f2 vanishes on X meet W and X meet N.
  for (int t = 0; t < 2 * n; ++t) {
    Vec c = S.point(pts[rng.below(pts.size())]);
    if (!s.in_V0(c) && dot(F, WN[1].coeffs, c) != 0) continue;
    auto v = f2(c);
    if (!v) continue;
    ++rep.residual_checks;
    rep.residual_failures += *v != 0;
  }

  // r(v) = f2(x_v) with v = x_v + w_v, x_v in X, w_v in W' = W meet N.
  const int K = n * (n + 1) / 2;
  std::vector<Vec> P;
  std::vector<Elem> V;
  std::optional<FormFit> fit;
  int target = 2 * K + 8;
  for (int round = 0; round < 3; ++round) {
    for (int t = 0; t < 8 * target && static_cast<int>(P.size()) < target; ++t) {
      Vec v = S.random(rng);
      auto w = try_affine_quadric_solve(Q, WN, v, 0, so);
      if (!w) continue;
      auto val = f2(vadd(F, v, *w));
      if (!val) continue;
      P.push_back(v);
      V.push_back(*val);
    }
    fit = fit_quadratic_form(F, n, P, V);
    if (!fit) fail(ErrorCode::InconsistentFit, "f(x_v) is not a quadratic form in v");
    if (fit->rank == K) break;
    target += K;
  }
  rep.lift_points = P.size();
  rep.lift_rank = fit->rank;
  if (report) *report = rep;
  return fit->form + q + lm;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Exact decision whether some quadratic polynomial equals f on X.
std::optional<bool> quadratic_system_consistent(const FunctionTable& f, const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  const int K = (n + 1) * (n + 2) / 2;
  double work = static_cast<double>(X.count()) * K * K;
  if (work > 16.0 * static_cast<double>(loop_budget())) return std::nullopt;
  std::vector<Vec> basis;
  std::vector<int> piv;
  for (auto idx : X.points()) {
    Vec x = S.point(idx);
    Vec row;
    row.reserve(K + 1);
    row.push_back(1);
    for (int i = 0; i < n; ++i) row.push_back(x[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) row.push_back(F.mul(x[i], x[j]));
    row.push_back(f.at(idx));
    for (size_t b = 0; b < basis.size(); ++b) {
      Elem c = row[piv[b]];
      if (!c) continue;
      for (int j = 0; j <= K; ++j) row[j] = F.sub(row[j], F.mul(c, basis[b][j]));
    }
    int p = -1;
    for (int j = 0; j < K; ++j)
      if (row[j]) {
        p = j;
        break;
      }
    if (p < 0) {
      if (row[K]) return false;
      continue;
    }
    Elem inv = F.inv(row[p]);
    for (auto& e : row) e = F.mul(e, inv);
    basis.push_back(row);
    piv.push_back(p);
  }
  return true;
}

}  // namespace

QuadCertificate extend_weakly_quadratic(const FunctionTable& f, const Variety& X, const QuadOptions& opt) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  if (!F.odd()) fail(ErrorCode::CharTwo, "the quadratic pipeline needs odd characteristic");
  auto XQ = X.quadric();
  if (!XQ) fail(ErrorCode::NotQuadratic, "X must be a single homogeneous quadric");
  require_total(f, X);
  const auto& pts = X.points();
  QuadCertificate cert;
  cert.g = QuadraticFunction(F, n);

  auto give_up = [&](const std::string& why) {
    cert.diagnostics.push_back(why);
    auto cons = quadratic_system_consistent(f, X);
    if (cons && !*cons) {
      cert.status = ExtStatus::NotExtendable;
      cert.witness_kind = "inconsistent_quadratic_system";
      cert.detail = "no polynomial of degree <= 2 equals f on X";
    } else {
      cert.status = ExtStatus::Inconclusive;
      if (cons) cert.diagnostics.push_back("a quadratic extension exists; the pipeline did not reach it");
    }
    return cert;
  };

  // Gate
  double frames = static_cast<double>(pts.size()) * static_cast<double>(pts.size());
  Mode gate_mode = frames <= 16.0 * static_cast<double>(loop_budget()) ? Mode::exact()
                                                                       : Mode::sampled(opt.gate_samples, opt.seed);
  WitnessReport gate = is_weakly_quadratic(f, X, gate_mode);
  cert.weakly_quadratic = gate.verdict;
  add_stat(cert.stats, "frames_checked", gate.checked);
  if (!gate.verdict) {
    cert.status = ExtStatus::NotExtendable;
    cert.witness_kind = "isotropic_3_space";
    cert.witness = gate.witness;
    cert.detail = "f is not quadratic on an isotropic 3-space: " + gate.detail;
    return cert;
  }

  // Odd part through the linear pipeline.
  EvenOdd eo = even_odd_split(f, X);
  LinearOptions lo;
  double cubes3 = std::pow(static_cast<double>(pts.size()), 3);
  if (cubes3 > static_cast<double>(loop_budget())) {
    lo.mode = Mode::sampled(opt.gate_samples, opt.seed ^ 0x9e3779b97f4a7c15ULL);
    lo.reps = 2;
  }
  lo.votes = opt.votes;
  ExtensionCertificate lin = extend_weakly_linear(eo.odd, X, lo);
  cert.odd_status = lin.status;
  add_stat(cert.stats, "odd_votes", [&] {
    for (auto& [k, v] : lin.stats)
      if (k == "votes") return v;
    return uint64_t{0};
  }());
  if (lin.status == ExtStatus::NotExtendable) {
    cert.status = ExtStatus::NotExtendable;
    cert.witness_kind = "odd_part_" + lin.witness_kind;
    cert.witness = lin.witness;
    cert.detail = "odd part has no linear extension: " + lin.detail;
    return cert;
  }
  if (lin.status != ExtStatus::Extended) return give_up("odd part inconclusive");

  // Even part.
  QuadraticSetting set = QuadraticSetting::make(*XQ);
  cert.v0 = set.v0;
  cert.scale = set.scale;
  QuadraticExtender ext(X, eo.even, set, opt.votes, opt.seed ^ 0x2545f4914f6cdd1dULL);
  Rng& rng = ext.rng();
  auto reliable = [&](const Valued& v) { return v.ok && v.margin >= opt.votes.margin; };

  // Re-check h_3 on sampled cubes of X.
  uint64_t cube_checks = 0, cube_fail = 0;
  {
    std::array<Vec, 3> g;
    for (uint64_t t = 0; t < opt.verify_samples; ++t) {
      Vec x = S.point(pts[rng.below(pts.size())]);
      if (!draw_cube3(X, XQ, x, rng, g)) continue;
      Valued hx = ext.h(x);
      if (!reliable(hx)) continue;
      auto w = window3(F, x, g, [&](const Vec& u) -> std::optional<Elem> {
        Valued r = ext.h(u);
        if (!reliable(r)) return std::nullopt;
        return r.value;
      });
      if (!w) continue;
      ++cube_checks;
      cube_fail += *w != hx.value;
    }
  }
  add_stat(cert.stats, "h3_cubes_checked", cube_checks);
  add_stat(cert.stats, "h3_cubes_failed", cube_fail);

  // Quadratic form on V0 through sampled values of the extension.
  std::vector<Vec> P;
  std::vector<Elem> V;
  const int K = n * (n + 1) / 2;
  const int K0 = (n - 1) * n / 2;
  uint64_t V0size = S.size() / F.q();
  std::optional<FormFit> fit;
  try {
    if (V0size <= static_cast<uint64_t>(4 * opt.fit_oversample * K)) {
      Vec v(n);
      for (uint64_t i = 0; i < S.size(); ++i) {
        S.point(i, v.data());
        if (!set.in_V0(v)) continue;
        Valued r = ext.g_v0(v);
        if (!reliable(r)) continue;
        P.push_back(v);
        V.push_back(r.value);
      }
      fit = fit_quadratic_form(F, n, P, V);
    } else {
      int target = opt.fit_oversample * K0 + 8;
      for (int round = 0; round < 3; ++round) {
        for (int t = 0; t < 8 * target && static_cast<int>(P.size()) < target; ++t) {
          Vec v = set.project_V0(S.random(rng));
          Valued r = ext.g_v0(v);
          if (!reliable(r)) continue;
          P.push_back(v);
          V.push_back(r.value);
        }
        fit = fit_quadratic_form(F, n, P, V);
        if (!fit || fit->rank >= K0) break;
        target += K0;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankTooLow && e.code() != ErrorCode::NoSolutionFound) throw;
    cert.diagnostics.push_back(e.what());
  }
  const QuadStats& qs = ext.stats();
  auto push_stats = [&] {
    add_stat(cert.stats, "h_evals", qs.h_evals);
    add_stat(cert.stats, "h_votes", qs.h_votes);
    add_stat(cert.stats, "h_failed", qs.h_failed);
    add_stat(cert.stats, "xsq_evals", qs.xsq_evals);
    add_stat(cert.stats, "xsq_votes", qs.xsq_votes);
    add_stat(cert.stats, "xsq_failed", qs.xsq_failed);
    add_stat(cert.stats, "empty_z", qs.empty_z);
    add_stat(cert.stats, "v0_evals", qs.v0_evals);
    add_stat(cert.stats, "v0_votes", qs.v0_votes);
    add_stat(cert.stats, "v0_failed", qs.v0_failed);
    add_stat(cert.stats, "cube_failures", qs.cube_failures);
  };
  add_stat(cert.stats, "v0_fit_points", P.size());
  if (!fit) {
    push_stats();
    return give_up("values on V0 are not a quadratic form (InconsistentFit)");
  }
  add_stat(cert.stats, "v0_fit_rank", static_cast<uint64_t>(fit->rank));
  if (fit->rank < K0) cert.diagnostics.push_back("V0 fit under-determined: rank " + std::to_string(fit->rank));

  // Lift to V.
  QuadraticFunction g_even(F, n);
  try {
    LiftReport lr;
    g_even = lift_V0_to_V(
        fit->form,
        [&](const Vec& x) -> std::optional<Elem> {
          Valued r = ext.h(x);
          if (!reliable(r)) return std::nullopt;
          return r.value;
        },
        X, set, rng, &lr);
    add_stat(cert.stats, "lift_affine_points", lr.affine_points);
    add_stat(cert.stats, "lift_points", lr.lift_points);
    add_stat(cert.stats, "lift_rank", static_cast<uint64_t>(lr.lift_rank));
    add_stat(cert.stats, "lift_residual_failures", lr.residual_failures);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InconsistentFit && e.code() != ErrorCode::NoX0Found) throw;
    push_stats();
    return give_up(e.what());
  }
  push_stats();

  // Gauge: the quadratic part vanishes at v0.
  g_even = g_even - set.Q.scaled(g_even.quad(set.v0));

  QuadraticFunction g = g_even;
  g.lin() = lin.g;
  g.c() = F.add(lin.constant, eo.f0);

  // Exhaustive verification on X.
  uint64_t agree = 0;
  std::vector<uint64_t> bad;
  Vec x(n);
  for (auto idx : pts) {
    S.point(idx, x.data());
    if (g.eval(x) == f.at(idx))
      ++agree;
    else if (bad.size() < 100)
      bad.push_back(idx);
  }
  cert.final_agreement = static_cast<double>(agree) / static_cast<double>(pts.size());
  add_stat(cert.stats, "disagreements", pts.size() - agree);
  if (agree == pts.size()) {
    cert.status = ExtStatus::Extended;
    cert.g = g;
    return cert;
  }
  // Repair step: an isotropic <x, y, z> with f - g vanishing off x pins (f - g)(x) = 0.
  uint64_t witnesses = 0;
  for (auto idx : bad) {
    Vec xv = S.point(idx);
    for (int t = 0; t < 64; ++t) {
      std::array<Vec, 3> fr;
      Mat D(2, 2);
      auto yz = try_gram_realize(*XQ, D, rng, {{xv, Vec(2, 0)}}, 2);
      if (!yz) continue;
      fr = {xv, (*yz)[0], (*yz)[1]};
      bool vanish = true;
      for (uint32_t m = 2; m < 8 && vanish; ++m) {
        Vec u = vertex3(F, S.zero(), fr, m);
        vanish = g.eval(u) == f.at(u);
      }
      if (vanish && g.eval(S.zero()) == f.at(uint64_t{0})) {
        ++witnesses;
        if (cert.witness.empty()) cert.witness = {fr[0], fr[1], fr[2]};
        break;
      }
    }
  }
  add_stat(cert.stats, "repair_witnesses", witnesses);
  cert.g = g;
  return give_up("final g disagrees with f at " + std::to_string(pts.size() - agree) + " points of X");
}

}  // namespace hirank
