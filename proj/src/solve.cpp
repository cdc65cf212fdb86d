#include "hirank/solve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hirank/errors.hpp"
#include "hirank/fourier.hpp"

namespace hirank {

namespace {

struct Param {
  Vec p;
  std::vector<Vec> N;
};

std::optional<Param> parametrize(const Field& F, int n, const std::vector<LinearConstraint>& cons) {
  Mat A(static_cast<int>(cons.size()), n);
  Vec b(cons.size());
  for (size_t r = 0; r < cons.size(); ++r) {
    if (static_cast<int>(cons[r].coeffs.size()) != n) fail(ErrorCode::DimensionMismatch, "constraint length");
    for (int c = 0; c < n; ++c) A.at(static_cast<int>(r), c) = cons[r].coeffs[c];
    b[r] = cons[r].value;
  }
  auto s = solve_affine(F, A, b);
  if (!s) return std::nullopt;
  return Param{s->particular, s->kernel};
}

Vec combine(const Field& F, const Param& P, const Vec& s) {
  Vec u = P.p;
  for (size_t i = 0; i < P.N.size(); ++i)
    if (s[i])
      for (size_t j = 0; j < u.size(); ++j) u[j] = F.add(u[j], F.mul(s[i], P.N[i][j]));
  return u;
}

bool satisfies(const Field& F, const QuadraticFunction& Q, const std::vector<LinearConstraint>& cons, const Vec& u0,
               const Vec& u, Elem a) {
  for (auto& c : cons)
    if (dot(F, c.coeffs, u) != c.value) return false;
  return Q.eval(vadd(F, u0, u)) == a;
}

std::optional<Vec> exhaust(const Field& F, const QuadraticFunction& Q, const Param& P, const Vec& u0, Elem a) {
  size_t k = P.N.size();
  Vec s(k, 0);
  for (;;) {
    Vec u = combine(F, P, s);
    if (Q.eval(vadd(F, u0, u)) == a) return u;
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && ++s[i] == F.q()) s[i--] = 0;
    if (i < 0) return std::nullopt;
  }
}

// Roots of A x^2 + B x + C.
std::vector<Elem> quad_roots(const Field& F, Elem A, Elem B, Elem C) {
  std::vector<Elem> r;
  if (!F.odd() || F.q() <= 16) {
    for (Elem x = 0; x < F.q(); ++x)
      if (F.add(F.add(F.mul(A, F.mul(x, x)), F.mul(B, x)), C) == 0) r.push_back(x);
    return r;
  }
  if (A == 0) {
    if (B != 0) r.push_back(F.div(F.neg(C), B));
    else if (C == 0) r.push_back(0);
    return r;
  }
  Elem disc = F.sub(F.mul(B, B), F.mul(F.from_int(4), F.mul(A, C)));
  int64_t sq = F.sqrt(disc);
  if (sq < 0) return r;
  Elem inv2a = F.inv(F.mul(F.from_int(2), A));
  r.push_back(F.mul(F.add(F.neg(B), static_cast<Elem>(sq)), inv2a));
  if (sq != 0) r.push_back(F.mul(F.sub(F.neg(B), static_cast<Elem>(sq)), inv2a));
  return r;
}

uint64_t pow_or_max(uint64_t b, size_t e) {
  uint64_t r = 1;
  for (size_t i = 0; i < e; ++i) {
    if (r > (1ULL << 62) / b) return UINT64_MAX;
    r *= b;
  }
  return r;
}

}  // namespace

std::optional<Vec> try_affine_quadric_solve(const QuadraticFunction& Q, const std::vector<LinearConstraint>& constraints,
                                            const Vec& u0, Elem a, const SolveOptions& opt) {
  const Field& F = Q.field();
  int n = Q.n();
  if (static_cast<int>(u0.size()) != n) fail(ErrorCode::DimensionMismatch, "u0 length");
  auto P = parametrize(F, n, constraints);
  if (!P) return std::nullopt;
  size_t k = P->N.size();
  uint64_t size = pow_or_max(F.q(), k);
  if (opt.prefer_exhaustive && size <= opt.exhaustive_limit) return exhaust(F, Q, *P, u0, a);
  Rng local(opt.seed);
  Rng& rng = opt.rng ? *opt.rng : local;
  if (k > 0) {
    for (int t = 0; t < opt.random_trials; ++t) {
      Vec s(k), ds(k);
      for (auto& x : s) x = static_cast<Elem>(rng.below(F.q()));
      for (auto& x : ds) x = static_cast<Elem>(rng.below(F.q()));
      Vec w = vadd(F, u0, combine(F, *P, s));
      Vec d(n, 0);
      for (size_t i = 0; i < k; ++i)
        if (ds[i]) d = vadd(F, d, vscale(F, ds[i], P->N[i]));
      Elem A = Q.quad(d);
      Elem B = F.add(Q.pair(w, d), dot(F, Q.lin(), d));
      Elem C = F.sub(Q.eval(w), a);
      auto roots = quad_roots(F, A, B, C);
      if (roots.empty()) continue;
      Elem lam = roots[rng.below(roots.size())];
      Vec u = vsub(F, vadd(F, w, vscale(F, lam, d)), u0);
      if (satisfies(F, Q, constraints, u0, u, a)) return u;
    }
  } else if (Q.eval(vadd(F, u0, P->p)) == a) {
    return P->p;
  }
  uint64_t fb = opt.fallback_limit ? opt.fallback_limit : loop_budget();
  if (size <= std::max<uint64_t>(opt.exhaustive_limit, fb)) return exhaust(F, Q, *P, u0, a);
  return std::nullopt;
}

Vec affine_quadric_solve(const QuadraticFunction& Q, const std::vector<LinearConstraint>& constraints, const Vec& u0,
                         Elem a, const SolveOptions& opt) {
  auto u = try_affine_quadric_solve(Q, constraints, u0, a, opt);
  if (!u) fail(ErrorCode::NoSolutionFound, "no u in U with Q(u0 + u) = " + Q.field().format(a));
  if (!satisfies(Q.field(), Q, constraints, u0, *u, a))
    fail(ErrorCode::NoSolutionFound, "candidate failed verification");
  return *u;
}

std::optional<std::vector<Vec>> try_gram_realize(const QuadraticFunction& Q, const Mat& D, Rng& rng,
                                                 const std::vector<FixedPairing>& extra, int restarts) {
  int m = D.rows;
  if (D.cols != m) fail(ErrorCode::DimensionMismatch, "Gram target must be square");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      if (D.at(i, j) != D.at(j, i)) fail(ErrorCode::InvalidArgument, "Gram target must be symmetric");
  for (auto& e : extra)
    if (static_cast<int>(e.values.size()) < m) fail(ErrorCode::DimensionMismatch, "fixed pairing values");
  std::vector<Vec> rows_extra;
  for (auto& e : extra) rows_extra.push_back(Q.pair_row(e.w));
  SolveOptions so;
  so.rng = &rng;
  so.prefer_exhaustive = false;
  so.random_trials = 96;
  so.exhaustive_limit = 1ULL << 14;
  so.fallback_limit = 1ULL << 16;
  for (int r = 0; r <= restarts; ++r) {
    std::vector<Vec> v;
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) {
      std::vector<LinearConstraint> cons;
      for (int b = 0; b < a; ++b) cons.push_back({Q.pair_row(v[b]), D.at(a, b)});
      for (size_t e = 0; e < extra.size(); ++e) cons.push_back({rows_extra[e], extra[e].values[a]});
      auto u = try_affine_quadric_solve(Q, cons, Vec(Q.n(), 0), D.at(a, a), so);
      if (!u) ok = false;
      else v.push_back(*u);
    }
    if (!ok) continue;
    bool good = true;
    for (int a = 0; a < m && good; ++a) {
      good = Q.eval(v[a]) == D.at(a, a);
      for (int b = 0; b < a && good; ++b) good = Q.pair(v[a], v[b]) == D.at(a, b);
      for (size_t e = 0; e < extra.size() && good; ++e) good = Q.pair(v[a], extra[e].w) == extra[e].values[a];
    }
    if (good) return v;
  }
  return std::nullopt;
}

std::vector<Vec> gram_realize(const QuadraticFunction& Q, const Mat& D, const SolveOptions& opt,
                              const std::vector<FixedPairing>& extra, int restarts) {
  if (!Q.field().odd()) fail(ErrorCode::CharTwo, "Gram realization needs odd characteristic");
  Rng local(opt.seed);
  Rng& rng = opt.rng ? *opt.rng : local;
  auto v = try_gram_realize(Q, D, rng, extra, restarts);
  if (!v) fail(ErrorCode::NoSolutionFound, "Gram target not realized after " + std::to_string(restarts + 1) + " attempts");
  return *v;
}

ShiftedCount shifted_zero_count(const PolyFamily& fam, const std::vector<Vec>& basepoints) {
  const Field& F = fam.F;
  for (auto& a : basepoints)
    if (!fam.contains(a)) fail(ErrorCode::BasepointNotOnVariety, "basepoint is not on X");
  std::vector<Poly> polys;
  std::vector<Vec> shifts;
  std::set<std::string> seen;
  for (auto& a : basepoints)
    for (auto& P : fam.members) {
      Poly s = P.shifted(a);
      if (s.is_zero()) continue;
      if (!seen.insert(s.format()).second) continue;
      polys.push_back(s);
      shifts.push_back(Vec(fam.n, 0));
    }
  std::vector<Elem> targets(polys.size(), 0);
  Space S(F, fam.n);
  ShiftedCount r;
  if (S.size() <= enumeration_budget())
    r.count = polys.empty() ? S.size() : count_by_enumeration(F, fam.n, polys, {}, targets);
  else
    r.count = count_via_characters(F, fam.n, polys, {}, targets);
  r.density = static_cast<double>(r.count) / static_cast<double>(S.size());
  if (fam.homogeneous() && r.count == 0) fail(ErrorCode::PreconditionViolated, "homogeneous family with empty Z");
  return r;
}

AxResult ax_nonzero_solution(const PolyFamily& fam, uint64_t seed, uint64_t random_tries) {
  const Field& F = fam.F;
  int n = fam.n;
  AxResult r;
  r.precondition_met = fam.homogeneous() && n > fam.D();
  std::vector<CompiledPoly> cp;
  for (auto& P : fam.members) cp.emplace_back(P);
  auto zero_of = [&](const Vec& x) {
    for (auto& P : cp)
      if (P.eval(x) != 0) return false;
    return true;
  };
  Rng rng(seed);
  for (uint64_t t = 0; t < random_tries; ++t) {
    Vec x = random_vec(F, n, rng);
    if (!is_zero(x) && zero_of(x)) {
      r.point = x;
      return r;
    }
  }
  Space S(F, n);
  if (S.size() <= std::max<uint64_t>(1ULL << 20, enumeration_budget())) {
    Vec x(n);
    for (uint64_t i = 1; i < S.size(); ++i) {
      S.point(i, x.data());
      if (zero_of(x)) {
        r.point = x;
        return r;
      }
    }
  }
  fail(ErrorCode::NoSolutionFound, r.precondition_met ? "no nonzero zero found within budget"
                                                      : "no nonzero zero; n <= D so none is guaranteed");
}

DLargeReport d_large_verify(const PolyFamily& fam) {
  const Field& F = fam.F;
  if (!fam.homogeneous()) fail(ErrorCode::PreconditionViolated, "D-large bound needs a homogeneous family");
  Variety X(fam);
  uint64_t q = F.q();
  DLargeReport r;
  r.projective_count = (X.count() - 1) / (q - 1);
  r.projective_space = (X.space().size() - 1) / (q - 1);
  uint64_t den = 2;
  for (int i = 0; i <= fam.D(); ++i) den = den > (1ULL << 62) / q ? (1ULL << 62) : den * q;
  r.bound = (r.projective_space + den - 1) / den;
  r.holds = r.projective_count >= r.bound;
  return r;
}

ArraySolution sol_array(const QuadraticFunction& Q, const CubeValues& alpha, const CubeValues& beta,
                        const CubeValues& gamma, const SolveOptions& opt) {
  const Field& F = Q.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "array system needs odd characteristic");
  if (!Q.homogeneous()) fail(ErrorCode::InvalidArgument, "array system needs a quadratic form");
  for (auto* m : {&alpha, &beta, &gamma}) {
    if ((*m)[0] != 0) fail(ErrorCode::PreconditionViolated, "value at omega = 0 must vanish");
    Elem alt = 0;
    for (uint32_t w = 0; w < 8; ++w)
      alt = (__builtin_popcount(w) & 1) ? F.sub(alt, (*m)[w]) : F.add(alt, (*m)[w]);
    if (alt != 0) fail(ErrorCode::PreconditionViolated, "alternating sum over the cube must vanish");
  }
  auto e = [](int i) { return 1U << i; };
  auto e2 = [](int i, int j) { return (1U << i) | (1U << j); };
  Elem A[3], C[3], B[3], a[3][3] = {}, b[3][3] = {}, c[3][3] = {};
  for (int i = 0; i < 3; ++i) {
    A[i] = F.neg(alpha[e(i)]);
    C[i] = F.neg(beta[e(i)]);
    B[i] = F.sub(F.sub(F.neg(gamma[e(i)]), A[i]), C[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      a[i][j] = F.sub(F.sub(F.neg(alpha[e2(i, j)]), A[i]), A[j]);
      c[i][j] = F.sub(F.sub(F.neg(beta[e2(i, j)]), C[i]), C[j]);
      // pairing of z_i and z_j for z = z' + z''
      Elem pz = F.add(F.sub(gamma[e(i)], gamma[e2(i, j)]), gamma[e(j)]);
      b[i][j] = F.sub(F.sub(pz, a[i][j]), c[i][j]);
    }
  Mat D(6, 6);
  for (int i = 0; i < 3; ++i) {
    D.at(i, i) = A[i];
    D.at(3 + i, 3 + i) = C[i];
    D.at(i, 3 + i) = D.at(3 + i, i) = B[i];
    for (int j = i + 1; j < 3; ++j) {
      D.at(i, j) = D.at(j, i) = a[i][j];
      D.at(3 + i, 3 + j) = D.at(3 + j, 3 + i) = c[i][j];
      D.at(i, 3 + j) = D.at(3 + j, i) = b[i][j];
      D.at(j, 3 + i) = D.at(3 + i, j) = 0;
    }
  }
  auto v = gram_realize(Q, D, opt);
  ArraySolution s;
  for (int i = 0; i < 3; ++i) {
    s.z1[i] = v[i];
    s.z2[i] = v[3 + i];
  }
  for (uint32_t w = 1; w < 8; ++w) {
    Vec x(Q.n(), 0), y(Q.n(), 0);
    for (int i = 0; i < 3; ++i)
      if (w >> i & 1U) {
        x = vadd(F, x, s.z1[i]);
        y = vadd(F, y, s.z2[i]);
      }
    if (Q.eval(x) != F.neg(alpha[w]) || Q.eval(y) != F.neg(beta[w]) || Q.eval(vadd(F, x, y)) != F.neg(gamma[w]))
      fail(ErrorCode::NoSolutionFound, "array solution failed verification");
  }
  return s;
}

Vec opposite_face(const QuadraticFunction& Q, const Vec& u, const Vec& u1, const Vec& u2, const OppositeMode& mode,
                  const SolveOptions& opt) {
  const Field& F = Q.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "opposite-face solver needs odd characteristic");
  if (!Q.homogeneous()) fail(ErrorCode::InvalidArgument, "opposite-face solver needs a quadratic form");
  int n = Q.n();
  Vec r1 = Q.pair_row(u1), r2 = Q.pair_row(u2);
  if (rank(F, {u1, u2}, n) < 2 || rank(F, {r1, r2}, n) < 2)
    fail(ErrorCode::DegenerateSquare, "square generators or their pairings are dependent");
  Elem a00 = Q.eval(u), a10 = Q.eval(vadd(F, u, u1)), a01 = Q.eval(vadd(F, u, u2));
  Elem a11 = Q.eval(vadd(F, vadd(F, u, u1), u2));
  Elem b = F.add(F.sub(F.sub(a00, a01), a10), a11);
  std::vector<LinearConstraint> cons;
  Elem target;
  Elem want[4];  // Q(y+u+omega.u) for omega = 00, 10, 01, 11
  if (!mode.second) {
    cons = {{r1, F.sub(a01, a11)}, {r2, F.sub(a10, a11)}};
    target = b;
    want[0] = b;
    want[1] = want[2] = want[3] = 0;
  } else {
    if (F.sub(mode.t, mode.s) != b) fail(ErrorCode::PreconditionViolated, "t - s must equal the square's second difference");
    Elem t0 = F.sub(mode.t, a00);
    cons = {{r1, F.sub(F.sub(mode.s, a10), t0)}, {r2, F.sub(F.neg(a01), t0)}};
    target = mode.t;
    want[0] = mode.t;
    want[1] = mode.s;
    want[2] = want[3] = 0;
  }
  Vec y = affine_quadric_solve(Q, cons, u, target, opt);
  Vec yu = vadd(F, y, u);
  if (Q.eval(yu) != want[0] || Q.eval(vadd(F, yu, u1)) != want[1] || Q.eval(vadd(F, yu, u2)) != want[2] ||
      Q.eval(vadd(F, vadd(F, yu, u1), u2)) != want[3])
    fail(ErrorCode::NoSolutionFound, "opposite-face solution failed verification");
  return y;
}

std::pair<Elem, Elem> sum_two_squares(const Field& F, Elem c) {
  if (!F.odd()) return {static_cast<Elem>(F.sqrt(c)), 0};
  for (Elem a = 0; a < F.q(); ++a) {
    int64_t b = F.sqrt(F.sub(c, F.mul(a, a)));
    if (b >= 0) return {a, static_cast<Elem>(b)};
  }
  fail(ErrorCode::NoSolutionFound, "no two-square representation");
}

namespace {

int restricted_rank(const QuadraticFunction& Q, const Vec& v0) {
  const Field& F = Q.field();
  int n = Q.n();
  Mat A(1, n);
  Vec row = Q.pair_row(v0);
  for (int j = 0; j < n; ++j) A.at(0, j) = row[j];
  auto sol = solve_affine(F, A, Vec{0});
  int k = static_cast<int>(sol->kernel.size());
  Mat B(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) B.at(i, j) = sol->kernel[j][i];
  return classical_quadratic_rank(Q.compose_affine(B, Vec(n, 0)).to_poly());
}

Mat cube_v0_target(const Field& F, Elem a, Elem b, Elem s) {
  Mat D(3, 3);
  D.at(0, 0) = F.neg(b);
  D.at(1, 1) = F.neg(a);
  D.at(2, 2) = F.neg(s);
  D.at(0, 2) = D.at(2, 0) = b;
  D.at(1, 2) = D.at(2, 1) = a;
  return D;
}

void check_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a, Elem b) {
  const Field& F = Q.field();
  if (!F.odd()) fail(ErrorCode::CharTwo, "cube completion needs odd characteristic");
  if (!Q.homogeneous()) fail(ErrorCode::InvalidArgument, "cube completion needs a quadratic form");
  if (Q.pair(v, v0) != 0) fail(ErrorCode::PreconditionViolated, "v is not in V0");
  if (F.add(a, b) != Q.eval(v)) fail(ErrorCode::PreconditionViolated, "a + b must equal Q(v)");
}

bool verify_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a, Elem b,
                    const std::array<Vec, 3>& g) {
  const Field& F = Q.field();
  for (auto& x : g)
    if (Q.pair(x, v0) != 0) return false;
  for (uint32_t w = 1; w < 8; ++w) {
    Vec x = v;
    for (int i = 0; i < 3; ++i)
      if (w >> i & 1U) x = vadd(F, x, g[i]);
    Elem want = w == 1 ? a : w == 2 ? b : 0;
    if (Q.eval(x) != want) return false;
  }
  return true;
}

}  // namespace

std::optional<std::array<Vec, 3>> try_complete_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a,
                                                       Elem b, Rng& rng) {
  check_cube_v0(Q, v0, v, a, b);
  const Field& F = Q.field();
  Mat D = cube_v0_target(F, a, b, Q.eval(v));
  std::vector<FixedPairing> extra = {{v, Vec(3, 0)}, {v0, Vec(3, 0)}};
  auto r = try_gram_realize(Q, D, rng, extra, 8);
  if (!r) return std::nullopt;
  std::array<Vec, 3> g = {(*r)[0], (*r)[1], (*r)[2]};
  if (!verify_cube_v0(Q, v0, v, a, b, g)) return std::nullopt;
  return g;
}

std::array<Vec, 3> complete_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a, Elem b,
                                    const SolveOptions& opt) {
  check_cube_v0(Q, v0, v, a, b);
  Rng local(opt.seed);
  Rng& rng = opt.rng ? *opt.rng : local;
  auto g = try_complete_cube_v0(Q, v0, v, a, b, rng);
  if (g) return *g;
  int r = restricted_rank(Q, v0);
  if (r <= 15) fail(ErrorCode::RankTooLow, "rank of Q on V0 is " + std::to_string(r));
  fail(ErrorCode::NoSolutionFound, "cube through v not completed");
}

ShiftedCount equi_count(const QuadraticFunction& Q, const CubeValues& a) {
  const Field& F = Q.field();
  int n = Q.n();
  Poly P = Q.to_poly();
  std::vector<Poly> polys;
  for (uint32_t w = 0; w < 8; ++w) {
    std::vector<Poly> img;
    for (int j = 0; j < n; ++j) {
      Poly t = Poly::variable(F, 4 * n, j);
      for (int i = 0; i < 3; ++i)
        if (w >> i & 1U) t = t + Poly::variable(F, 4 * n, (i + 1) * n + j);
      img.push_back(t);
    }
    polys.push_back(P.substitute(img));
  }
  ShiftedCount r;
  r.count = count_via_characters(F, 4 * n, polys, {}, std::vector<Elem>(a.begin(), a.end()));
  r.density = static_cast<double>(r.count) / std::pow(static_cast<double>(F.q()), 4 * n);
  return r;
}

}  // namespace hirank
