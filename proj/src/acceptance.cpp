#include "hirank/acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "hirank/errors.hpp"
#include "hirank/fourier.hpp"
#include "hirank/solve.hpp"

namespace hirank {

namespace {

// Tolerances and budgets.
constexpr double kBiasTol = 1e-9;
constexpr double kU2Tol = 1e-10;
constexpr double kCorrectedFloor = 0.99;
constexpr double kQuadSuccess = 0.9;   // 18 of 20
constexpr double kLinearForced = 0.9;  // 45 of 50
constexpr std::array<double, kCriteria> kSeconds = {30, 120, 300, 600, 600, 900, 1, 3600, 600, 300};
constexpr std::array<const char*, kCriteria> kNames = {
    "gauss-sum bias law",         "counting engine vs enumeration", "U2 fold vs naive, Gowers-CS",
    "Y2 density trend",           "F/E density decay",              "linear plant-and-recover",
    "two-hyperplane negative",    "quadratic plant-and-recover",    "solver soundness fuzz",
    "Fubini and D-large bounds"};

using Clock = std::chrono::steady_clock;

bool full(const AcceptOptions& o) { return o.level == AcceptLevel::Full; }
int scaled(const AcceptOptions& o, int full_count, int quick_count) { return full(o) ? full_count : quick_count; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Poly random_poly(const Field& F, int n, int deg, int terms, Rng& rng) {
  Poly A(F, n);
  for (int k = 0; k < terms; ++k) {
    Exps e(n, 0);
    int d = static_cast<int>(rng.below(deg + 1));
    for (int j = 0; j < d; ++j) ++e[rng.below(n)];
    A.add_term(e, static_cast<Elem>(rng.below(F.q())));
  }
  return A;
}

Poly random_homogeneous(const Field& F, int n, int deg, Rng& rng) {
  for (;;) {
    Poly A(F, n);
    int terms = 1 + static_cast<int>(rng.below(4));
    for (int k = 0; k < terms; ++k) {
      Exps e(n, 0);
      for (int j = 0; j < deg; ++j) ++e[rng.below(n)];
      A.add_term(e, static_cast<Elem>(1 + rng.below(F.q() - 1)));
    }
    if (!A.is_zero() && A.degree() == deg) return A;
  }
}

FunctionTable random_table(const Space& S, Rng& rng) {
  return FunctionTable::on_space(S, [&](const Vec&) { return static_cast<Elem>(rng.below(S.field().q())); });
}

Poly diagonal_sum(const Field& F, int n, int r) {
  Poly P(F, n);
  for (int i = 0; i < r; ++i) {
    Exps e(n, 0);
    e[i] = 2;
    P.add_term(e, 1);
  }
  return P;
}

QuadraticFunction diagonal_form(const Field& F, int n, int r) { return QuadraticFunction::from_poly(diagonal_sum(F, n, r)); }

Vec vertex(const Field& F, const Vec& base, const std::vector<Vec>& g, uint32_t mask) {
  Vec v = base;
  for (size_t i = 0; i < g.size(); ++i)
    if (mask >> i & 1U) v = vadd(F, v, g[i]);
  return v;
}

// ---------------------------------------------------------------------------

CriterionResult c1(const AcceptOptions& o) {
  CriterionResult r;
  Rng rng(o.seed ^ 0xC1);
  const std::array<int, 4> qs = {3, 5, 7, 11};
  int draws = scaled(o, 50, 20);
  double max_err = 0, max_brute = 0;
  int brute = 0;
  for (int t = 0; t < draws; ++t) {
    int q = qs[rng.below(qs.size())];
    int rk = 1 + static_cast<int>(rng.below(8));
    Field F = Field::make(q);
    Poly P(F, rk);
    for (int i = 0; i < rk; ++i) {
      Exps e(rk, 0);
      e[i] = 2;
      P.add_term(e, static_cast<Elem>(1 + rng.below(q - 1)));
    }
    double b = bias(P);
    max_err = std::max(max_err, std::abs(b - std::pow(q, -rk / 2.0)));
    if (std::pow(q, rk) <= 729) {
      Space S(F, rk);
      std::complex<double> s = 0;
      Vec x(rk);
      for (uint64_t i = 0; i < S.size(); ++i) {
        S.point(i, x.data());
        s += F.char_eq(P.eval(x)).z;
      }
      max_brute = std::max(max_brute, std::abs(std::abs(s) / static_cast<double>(S.size()) - b));
      ++brute;
    }
  }
  r.pass = max_err <= kBiasTol && max_brute <= kBiasTol && brute > 0;
  r.detail = std::to_string(draws) + " draws, max |bias - q^(-r/2)| = " + fmt("%.2e", max_err) + ", " +
             std::to_string(brute) + " brute-force cross-checks, max diff " + fmt("%.2e", max_brute);
  r.data = {{"draws", draws}, {"max_error", max_err}, {"brute_checks", brute}, {"max_brute_diff", max_brute}};
  return r;
}

CriterionResult c2(const AcceptOptions& o) {
  CriterionResult r;
  Rng rng(o.seed ^ 0xC2);
  int inst = scaled(o, 200, 50), bad = 0;
  for (int t = 0; t < inst; ++t) {
    Field F = Field::make(t % 2 ? 3 : 2);
    int n = 1 + static_cast<int>(rng.below(6));
    int M = 1 + static_cast<int>(rng.below(3));
    std::vector<Poly> polys;
    std::vector<Vec> shifts;
    std::vector<Elem> targets;
    for (int i = 0; i < M; ++i) {
      Poly P = random_poly(F, n, 3, 4, rng);
      int k = 1 + static_cast<int>(rng.below(3));
      for (int s = 0; s < k; ++s) {
        polys.push_back(P);
        shifts.push_back(random_vec(F, n, rng));
        targets.push_back(static_cast<Elem>(rng.below(F.q())));
      }
    }
    bad += count_via_characters(F, n, polys, shifts, targets) != count_by_enumeration(F, n, polys, shifts, targets);
  }
  r.pass = bad == 0;
  r.detail = std::to_string(inst) + " instances, " + std::to_string(bad) + " mismatches";
  r.data = {{"instances", inst}, {"mismatches", bad}};
  return r;
}

CriterionResult c3(const AcceptOptions& o) {
  CriterionResult r;
  Rng rng(o.seed ^ 0xC3);
  const uint64_t cap = 1ULL << 24;
  int inst = 0;
  double max_diff = 0;
  int exact_mismatch = 0;
  for (int p = 2; p <= 101; ++p) {
    if (!is_prime(p)) continue;
    for (int l = 1; l <= 3; ++l) {
      uint64_t q = 1;
      for (int i = 0; i < l; ++i) q *= p;
      if (q * q * q > cap) continue;
      Field F = Field::make(p, l);
      uint64_t work = q * q * q;
      for (int n = 1; work <= cap; ++n, work *= q * q * q) {
        if (!full(o) && work > (1ULL << 18)) continue;
        Space S(F, n);
        int reps = work > (1ULL << 21) ? 1 : 2;
        for (int t = 0; t < reps; ++t) {
          auto f = random_table(S, rng);
          max_diff = std::max(max_diff, std::abs(u2_norm(f) - u2_norm_naive(f)));
          exact_mismatch += !(u2_sum_folded(f) == u2_sum_naive(f));
          ++inst;
        }
      }
    }
  }
  int cs = scaled(o, 500, 100), cs_fail = 0;
  Space S2(Field::make(2), 3), S3(Field::make(3), 2);
  for (int t = 0; t < cs; ++t) {
    const Space& S = t % 2 ? S3 : S2;
    auto g = gowers_cs_verify(random_table(S, rng), random_table(S, rng), random_table(S, rng), random_table(S, rng));
    cs_fail += !g.holds;
  }
  r.pass = max_diff <= kU2Tol && exact_mismatch == 0 && cs_fail == 0;
  r.detail = std::to_string(inst) + " U2 instances, max |folded - naive| = " + fmt("%.2e", max_diff) + ", " +
             std::to_string(exact_mismatch) + " exact-sum mismatches; Gowers-CS " + std::to_string(cs) + " tuples, " +
             std::to_string(cs_fail) + " violations";
  r.data = {{"u2_instances", inst}, {"max_diff", max_diff}, {"exact_mismatches", exact_mismatch},
            {"cs_tuples", cs},      {"cs_violations", cs_fail}};
  return r;
}

CriterionResult c4(const AcceptOptions& o) {
  (void)o;
  CriterionResult r;
  Field F = Field::make(3);
  const int n = 8;
  double prev = 2;
  bool dec = true;
  Json rows = Json::array();
  std::string d;
  for (int m : {2, 4, 6, 8}) {
    // split diagonal form sum (x_{2i}^2 - x_{2i+1}^2)
    Poly P(F, n);
    for (int i = 0; i < m; ++i) {
      Exps e(n, 0);
      e[i] = 2;
      P.add_term(e, i % 2 ? 2 : 1);
    }
    Variety X(PolyFamily{F, n, {P}});
    double y2 = static_cast<double>(y2_count(X));
    double dens = y2 / std::pow(3.0, 3 * n);
    double dev = std::abs(dens - std::pow(3.0, -4));
    dec = dec && dev < prev;
    prev = dev;
    rows.push_back({{"m", m}, {"y2", y2}, {"deviation", dev}});
    d += (d.empty() ? "" : ", ") + ("m=" + std::to_string(m) + ": " + fmt("%.5f", dev));
  }
  r.pass = dec;
  r.detail = "deviation |Y2|/|V|^3 - 3^-4: " + d + (dec ? " (strictly decreasing)" : " (not strictly decreasing)");
  r.data = {{"rows", rows}};
  return r;
}

CriterionResult c5(const AcceptOptions& o) {
  CriterionResult r;
  Field F = Field::make(2);
  const int n = 8;
  const uint64_t draws = 100000;
  std::vector<double> fd;
  std::vector<EstimateWithCI> ed;
  Json rows = Json::array();
  for (int m : {2, 4, 6, 8}) {
    // hyperbolic form x0 x1 + ... + x_{m-2} x_{m-1}
    Poly P(F, n);
    for (int i = 0; i < m; i += 2) {
      Exps e(n, 0);
      e[i] = e[i + 1] = 1;
      P.add_term(e, 1);
    }
    Variety X(PolyFamily{F, n, {P}});
    fd.push_back(ancillary_F(X).density);
    ed.push_back(ancillary_E(X, Mode::sampled(draws, o.seed ^ (0xC5 + m))).estimate);
    rows.push_back({{"m", m},
                    {"F_density", fd.back()},
                    {"E_estimate", ed.back().value},
                    {"E_lo", ed.back().lo()},
                    {"E_hi", ed.back().hi()}});
  }
  bool f_dec = true, e_sep = true;
  for (size_t i = 1; i < fd.size(); ++i) {
    f_dec = f_dec && fd[i] < fd[i - 1];
    e_sep = e_sep && ed[i].hi() < ed[i - 1].lo();
  }
  r.pass = f_dec && e_sep;
  std::string fs, es;
  for (size_t i = 0; i < fd.size(); ++i) {
    fs += (i ? ", " : "") + fmt("%.4g", fd[i]);
    es += (i ? ", " : "") + fmt("%.4g", ed[i].value) + fmt("+-%.4f", ed[i].half_width);
  }
  r.detail = "F density m=2..8: " + fs + (f_dec ? " (strict decrease)" : " (NOT strictly decreasing)") +
             "; E estimate: " + es + (e_sep ? " (CIs separated)" : " (CIs overlap)");
  r.data = {{"rows", rows}, {"F_strictly_decreasing", f_dec}, {"E_separated", e_sep}};
  return r;
}

CriterionResult c6(const AcceptOptions& o) {
  CriterionResult r;
  Field F = Field::make(3);
  const int n = 6;
  Variety X(PolyFamily{F, n, {diagonal_sum(F, n, n)}});
  const auto& pts = X.points();
  const int runs = scaled(o, 50, 10);
  const size_t corrupt = (pts.size() + 99) / 100;
  int clean_ok = 0, forced_ok = 0, h_ok = 0;
  double min_h = 1;
  for (int t = 0; t < runs; ++t) {
    Rng rng(o.seed * 1000003ULL + 0xC6 + t);
    Vec l = random_vec(F, n, rng);
    auto lin = [&](const Vec& x) { return dot(F, l, x); };
    auto f = FunctionTable::restrict(X, lin);
    auto agrees = [&](const ExtensionCertificate& c) {
      if (c.status != ExtStatus::Extended) return false;
      for (auto idx : pts)
        if (c.eval(F, X.space().point(idx)) != f.at(idx)) return false;
      return true;
    };
    clean_ok += agrees(extend_weakly_linear(f, X));

    auto bad = f;
    std::set<uint64_t> hit;
    while (hit.size() < corrupt) hit.insert(pts[rng.below(pts.size())]);
    for (auto idx : hit) bad.set(idx, F.add(f.at(idx), static_cast<Elem>(1 + rng.below(F.q() - 1))));
    Correction c = testing_correct(bad, X);
    uint64_t eq = 0;
    for (auto idx : pts) eq += c.h.at(idx) == f.at(idx);
    double frac = static_cast<double>(eq) / static_cast<double>(pts.size());
    min_h = std::min(min_h, frac);
    h_ok += frac >= kCorrectedFloor;
    LinearOptions lo;
    lo.force = true;
    forced_ok += agrees(extend_weakly_linear(bad, X, lo));
  }
  int need = static_cast<int>(std::ceil(kLinearForced * runs));
  r.pass = clean_ok == runs && h_ok == runs && forced_ok >= need;
  r.detail = "clean " + std::to_string(clean_ok) + "/" + std::to_string(runs) + " Extended and exact; " +
             std::to_string(corrupt) + " corrupted points of " + std::to_string(pts.size()) + ": min h agreement " +
             fmt("%.4f", min_h) + ", forced recovery " + std::to_string(forced_ok) + "/" + std::to_string(runs) +
             " (need " + std::to_string(need) + ")";
  r.data = {{"runs", runs},   {"clean_ok", clean_ok},     {"corrupted_points", corrupt},
            {"min_h", min_h}, {"forced_ok", forced_ok}, {"forced_needed", need}};
  return r;
}

CriterionResult c7(const AcceptOptions& o) {
  (void)o;
  CriterionResult r;
  Field F = Field::make(3);
  Poly P(F, 3);
  P.add_term({1, 1, 0}, 1);
  Variety X(PolyFamily{F, 3, {P}});
  auto f = FunctionTable::restrict(X, [](const Vec& x) { return x[0] == 0 ? x[1] : Elem{0}; });
  ExtensionCertificate c = extend_weakly_linear(f, X);
  CandidateSearch s = affine_candidate_search(f, X);
  r.pass = c.weakly_linear && c.status == ExtStatus::NotExtendable && !s.found && s.eliminated == 81;
  std::string g;
  if (s.found) {
    for (size_t i = 0; i < s.g.size(); ++i) g += (i ? "," : "") + std::to_string(s.g[i]);
  }
  r.detail = std::string("weakly linear: ") + (c.weakly_linear ? "yes" : "no") + ", status " + status_name(c.status) +
             ", candidates eliminated " + std::to_string(s.eliminated) + "/81" +
             (s.found ? ", surviving candidate g = (" + g + ") + " + std::to_string(s.constant) : "");
  r.data = {{"weakly_linear", c.weakly_linear},
            {"status", status_name(c.status)},
            {"eliminated", s.eliminated},
            {"candidate_found", s.found}};
  return r;
}

CriterionResult c8(const AcceptOptions& o) {
  CriterionResult r;
  Field F = Field::make(3);
  const int n = 14;
  Variety X(PolyFamily{F, n, {diagonal_sum(F, n, n)}});
  const auto& pts = X.points();
  const int runs = scaled(o, 20, 2);
  int ok = 0, inconclusive = 0, wrong = 0;
  Json rows = Json::array();
  for (int t = 0; t < runs; ++t) {
    Rng rng(o.seed * 1000003ULL + 0xC8 + t);
    QuadraticFunction q0(F, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) q0.a(i, j) = static_cast<Elem>(rng.below(3));
    q0.lin() = random_vec(F, n, rng);
    q0.c() = static_cast<Elem>(rng.below(3));
    auto f = FunctionTable::restrict(X, [&](const Vec& x) { return q0.eval(x); });
    QuadOptions qo;
    qo.seed = o.seed * 7919ULL + t;
    auto t0 = Clock::now();
    QuadCertificate c = extend_weakly_quadratic(f, X, qo);
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool exact = false;
    if (c.status == ExtStatus::Extended) {
      exact = c.g.quad(c.v0) == 0;
      Vec x(n);
      for (auto idx : pts) {
        if (!exact) break;
        X.space().point(idx, x.data());
        exact = c.g.eval(x) == f.at(idx);
      }
    }
    if (exact)
      ++ok;
    else if (c.status == ExtStatus::Inconclusive)
      ++inconclusive;
    else
      ++wrong;
    rows.push_back({{"run", t}, {"status", status_name(c.status)}, {"exact", exact}, {"seconds", secs}});
  }
  int need = static_cast<int>(std::ceil(kQuadSuccess * runs));
  r.pass = ok >= need && wrong == 0;
  r.detail = std::to_string(ok) + "/" + std::to_string(runs) + " Extended with exact agreement on |X| = " +
             std::to_string(pts.size()) + " (need " + std::to_string(need) + "), " + std::to_string(inconclusive) +
             " Inconclusive, " + std::to_string(wrong) + " wrong";
  r.data = {{"runs", runs}, {"ok", ok}, {"inconclusive", inconclusive}, {"wrong", wrong}, {"rows", rows}};
  return r;
}

CriterionResult c9(const AcceptOptions& o) {
  CriterionResult r;
  Rng rng(o.seed ^ 0xC9);
  Field F3 = Field::make(3);
  Json fails = Json::object();
  auto guard = [&](const char* name, const std::function<bool()>& fn) {
    bool good = false;
    try {
      good = fn();
    } catch (const Error&) {
      good = false;
    }
    if (!good) fails[name] = fails.value(name, 0) + 1;
  };

  // Gram targets.
  QuadraticFunction Q13 = diagonal_form(F3, 13, 13);
  int gram = scaled(o, 100, 20);
  for (int t = 0; t < gram; ++t) {
    Mat D(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) D.at(i, j) = D.at(j, i) = static_cast<Elem>(rng.below(3));
    guard("gram_realize", [&] {
      SolveOptions so;
      so.seed = o.seed + t;
      auto v = gram_realize(Q13, D, so);
      for (int i = 0; i < 6; ++i) {
        if (Q13.eval(v[i]) != D.at(i, i)) return false;
        for (int j = 0; j < i; ++j)
          if (Q13.pair(v[i], v[j]) != D.at(i, j)) return false;
      }
      return true;
    });
  }

  // 8-vertex arrays.
  int arrays = scaled(o, 50, 10);
  auto admissible = [&]() {
    CubeValues a{};
    for (int w = 1; w < 7; ++w) a[w] = static_cast<Elem>(rng.below(3));
    Elem alt = 0;
    for (uint32_t w = 0; w < 7; ++w) alt = (__builtin_popcount(w) & 1) ? F3.sub(alt, a[w]) : F3.add(alt, a[w]);
    a[7] = alt;
    return a;
  };
  for (int t = 0; t < arrays; ++t) {
    CubeValues al = admissible(), be = admissible(), ga = admissible();
    guard("sol_array", [&] {
      SolveOptions so;
      so.seed = o.seed + t;
      auto s = sol_array(Q13, al, be, ga, so);
      std::vector<Vec> z1(s.z1.begin(), s.z1.end()), z2(s.z2.begin(), s.z2.end());
      Vec zero(13, 0);
      for (uint32_t w = 0; w < 8; ++w) {
        Vec x = vertex(F3, zero, z1, w), y = vertex(F3, zero, z2, w);
        if (Q13.eval(x) != F3.neg(al[w]) || Q13.eval(y) != F3.neg(be[w]) || Q13.eval(vadd(F3, x, y)) != F3.neg(ga[w]))
          return false;
      }
      return true;
    });
  }

  // Opposite faces.
  int squares = scaled(o, 100, 20);
  for (int t = 0; t < squares; ++t) {
    Vec u = random_vec(F3, 13, rng), u1 = random_vec(F3, 13, rng), u2 = random_vec(F3, 13, rng);
    OppositeMode m;
    Elem a00 = Q13.eval(u), a10 = Q13.eval(vadd(F3, u, u1)), a01 = Q13.eval(vadd(F3, u, u2));
    Elem a11 = Q13.eval(vadd(F3, vadd(F3, u, u1), u2));
    Elem b = F3.add(F3.sub(F3.sub(a00, a01), a10), a11);
    if (t % 2) {
      m.second = true;
      m.t = static_cast<Elem>(rng.below(3));
      m.s = F3.sub(m.t, b);
    }
    guard("opposite_face", [&] {
      SolveOptions so;
      so.seed = o.seed + t;
      Vec y = opposite_face(Q13, u, u1, u2, m, so);
      Vec yu = vadd(F3, y, u);
      Elem want0 = m.second ? m.t : b, want1 = m.second ? m.s : 0;
      return Q13.eval(yu) == want0 && Q13.eval(vadd(F3, yu, u1)) == want1 && Q13.eval(vadd(F3, yu, u2)) == 0 &&
             Q13.eval(vadd(F3, vadd(F3, yu, u1), u2)) == 0;
    });
  }

  // Cube completion through v0.
  const int n16 = 16;
  QuadraticFunction Q16 = diagonal_form(F3, n16, n16);
  Vec v0(n16, 0);
  v0[n16 - 1] = 1;
  int cubes = scaled(o, 100, 20);
  for (int t = 0; t < cubes; ++t) {
    Vec v = random_vec(F3, n16, rng);
    v[n16 - 1] = 0;
    Elem s = Q16.eval(v);
    Elem a = static_cast<Elem>(rng.below(3));
    Elem b = F3.sub(s, a);
    guard("complete_cube_v0", [&] {
      SolveOptions so;
      so.seed = o.seed + t;
      auto g = complete_cube_v0(Q16, v0, v, a, b, so);
      std::vector<Vec> gv(g.begin(), g.end());
      for (auto& x : gv)
        if (Q16.pair(x, v0) != 0) return false;
      for (uint32_t w = 1; w < 8; ++w) {
        Elem want = w == 1 ? a : w == 2 ? b : 0;
        if (Q16.eval(vertex(F3, v, gv, w)) != want) return false;
      }
      return true;
    });
  }

  // Two squares, every residue of every odd prime up to 101.
  uint64_t two_sq = 0;
  for (int p = 3; p <= 101; ++p) {
    if (!is_prime(p)) continue;
    Field F = Field::make(p);
    for (Elem c = 0; c < F.q(); ++c) {
      ++two_sq;
      guard("sum_two_squares", [&] {
        auto [x, y] = sum_two_squares(F, c);
        return F.add(F.mul(x, x), F.mul(y, y)) == c;
      });
    }
  }

  // Nonzero solutions of homogeneous systems with n > D.
  int ax = scaled(o, 200, 40);
  for (int t = 0; t < ax; ++t) {
    Field F = Field::make(t % 2 ? 3 : 2);
    int n = 3 + static_cast<int>(rng.below(4));
    PolyFamily fam{F, n, {}};
    int budget = n - 1;  // D <= n - 1
    int L = 1 + static_cast<int>(rng.below(2));
    for (int i = 0; i < L && budget >= 2; ++i) {
      int d = 2 + static_cast<int>(rng.below(std::min(2, budget - 1)));
      fam.members.push_back(random_homogeneous(F, n, d, rng));
      budget -= d;
    }
    guard("ax_nonzero_solution", [&] {
      auto s = ax_nonzero_solution(fam, o.seed + t);
      return !is_zero(s.point) && fam.contains(s.point) && s.precondition_met;
    });
  }

  int total_fail = 0;
  for (auto& [k, v] : fails.items()) total_fail += v.get<int>();
  r.pass = total_fail == 0;
  r.detail = "gram " + std::to_string(gram) + ", arrays " + std::to_string(arrays) + ", squares " +
             std::to_string(squares) + ", cubes " + std::to_string(cubes) + ", two-squares " + std::to_string(two_sq) +
             ", ax " + std::to_string(ax) + "; failures " + std::to_string(total_fail) +
             (total_fail ? " " + fails.dump() : "");
  r.data = {{"gram", gram},     {"arrays", arrays}, {"squares", squares},
            {"cubes", cubes},   {"two_squares", two_sq}, {"ax", ax},
            {"failures", fails}};
  return r;
}

CriterionResult c10(const AcceptOptions& o) {
  CriterionResult r;
  Rng rng(o.seed ^ 0xCA);
  int inst = scaled(o, 10000, 2000);
  int applicable = 0, violated = 0;
  for (int t = 0; t < inst; ++t) {
    uint32_t T = 2 + static_cast<uint32_t>(rng.below(19));
    size_t Sz = T * (5 + rng.below(96));
    std::vector<uint32_t> p(Sz);
    for (uint32_t i = 0; i < T; ++i) p[i] = i;
    for (size_t i = T; i < Sz; ++i) p[i] = static_cast<uint32_t>(rng.below(T));
    double C = measure_homogeneity(p, T);
    double eps = std::max(rng.uniform(), 1e-6) / (C * C);
    std::vector<bool> inP(Sz, true);
    size_t drop = static_cast<size_t>(std::floor(eps * static_cast<double>(Sz)));
    std::vector<size_t> order(Sz);
    for (size_t i = 0; i < Sz; ++i) order[i] = i;
    for (size_t i = 0; i < drop; ++i) {
      size_t j = i + rng.below(Sz - i);
      std::swap(order[i], order[j]);
      inP[order[i]] = false;
    }
    auto rep = fubini_check(p, T, inP, eps);
    applicable += rep.applicable;
    violated += !rep.holds;
  }

  int fams = scaled(o, 10000, 2000), dl_fail = 0;
  for (int t = 0; t < fams; ++t) {
    Field F = Field::make(t % 2 ? 3 : 2);
    int nmax = F.q() == 2 ? 8 : 6;
    int n = 3 + static_cast<int>(rng.below(nmax - 2));
    PolyFamily fam{F, n, {}};
    int budget = n - 2;  // D + 1 < n
    int L = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < L && budget >= 1; ++i) {
      int d = 1 + static_cast<int>(rng.below(std::min(3, budget)));
      fam.members.push_back(random_homogeneous(F, n, d, rng));
      budget -= d;
    }
    dl_fail += !d_large_verify(fam).holds;
  }
  r.pass = violated == 0 && dl_fail == 0;
  r.detail = "Fubini: " + std::to_string(inst) + " maps, " + std::to_string(applicable) + " meet the hypotheses, " +
             std::to_string(violated) + " violate the bound; D-large: " + std::to_string(fams) + " families, " +
             std::to_string(dl_fail) + " violations";
  r.data = {{"fubini_instances", inst},
            {"fubini_applicable", applicable},
            {"fubini_violations", violated},
            {"dlarge_instances", fams},
            {"dlarge_violations", dl_fail}};
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptOptions& opt) {
  if (id < 1 || id > kCriteria) fail(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
  static const std::array<CriterionResult (*)(const AcceptOptions&), kCriteria> fns = {c1, c2, c3, c4, c5,
                                                                                       c6, c7, c8, c9, c10};
  auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = fns[id - 1](opt);
  } catch (const Error& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = kNames[id - 1];
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.seconds > kSeconds[id - 1]) {
    r.pass = false;
    r.detail += "; over the " + fmt("%.0f", kSeconds[id - 1]) + " s budget";
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptOptions& opt) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opt));
    if (opt.on_result) opt.on_result(out.back());
  }
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %2d %s  %-32s %8.2f s  ", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.seconds);
  return head + r.detail;
}

Json acceptance_json(const std::vector<CriterionResult>& rs, const AcceptOptions& opt) {
  Json j;
  j["level"] = opt.level == AcceptLevel::Full ? "full" : "quick";
  j["seed"] = opt.seed;
  j["criteria"] = Json::array();
  int passed = 0;
  for (auto& r : rs) {
    passed += r.pass;
    j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
  }
  j["passed"] = passed;
  j["total"] = rs.size();
  return j;
}

}  // namespace hirank
