#include "hirank/extend_linear.hpp"

#include <cmath>

#include "hirank/errors.hpp"
#include "vote.hpp"

namespace hirank {

const char* status_name(ExtStatus s) {
  switch (s) {
    case ExtStatus::Extended:
      return "Extended";
    case ExtStatus::NotExtendable:
      return "NotExtendable";
    case ExtStatus::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

int status_exit_code(ExtStatus s) {
  switch (s) {
    case ExtStatus::Extended:
      return 0;
    case ExtStatus::NotExtendable:
      return 2;
    case ExtStatus::Inconclusive:
      return 3;
  }
  return 3;
}

Elem ExtensionCertificate::eval(const Field& F, const Vec& x) const { return F.add(dot(F, g, x), constant); }

namespace {

void check_square_budget(uint64_t m, const char* what) {
  double work = static_cast<double>(m) * static_cast<double>(m);
  if (work > 16.0 * static_cast<double>(loop_budget())) fail(ErrorCode::BudgetExceeded, what);
}

// Points of X as coordinate vectors, in X.points() order.
std::vector<Vec> point_vectors(const Variety& X) {
  std::vector<Vec> P;
  P.reserve(X.count());
  for (auto idx : X.points()) P.push_back(X.space().point(idx));
  return P;
}

void require_total(const FunctionTable& f, const Variety& X) {
  for (auto idx : X.points())
    if (!f.defined(idx)) f.at(idx);  // throws VertexOutsideDomain with the point
}

}  // namespace

WitnessReport check_additive_triples(const FunctionTable& f, const Variety& X, const Mode& mode) {
  const Space& S = X.space();
  const Field& F = S.field();
  WitnessReport rep;
  auto test = [&](const Vec& x, const Vec& z) {
    Vec d = vsub(F, x, z);
    uint64_t di = S.index(d);
    if (!X.contains_idx(di)) return true;
    ++rep.checked;
    if (f.at(x) == F.add(f.at(z), f.at(di))) return true;
    rep.verdict = false;
    rep.witness = {x, z};
    rep.detail = "f(x) != f(z) + f(x - z)";
    return false;
  };
  if (mode.exhaustive) {
    check_square_budget(X.count(), "additive triple check over budget");
    auto P = point_vectors(X);
    for (const Vec& x : P)
      for (const Vec& z : P)
        if (!test(x, z)) return rep;
    return rep;
  }
  const auto& pts = X.points();
  if (pts.empty()) return rep;
  Rng rng(mode.seed);
  for (uint64_t t = 0; t < mode.samples; ++t) {
    Vec x = S.point(pts[rng.below(pts.size())]);
    Vec z = S.point(pts[rng.below(pts.size())]);
    if (!test(x, z)) return rep;
  }
  return rep;
}

EstimateWithCI parallelogram_vanish_fraction(const FunctionTable& f, const Variety& X, const Mode& mode) {
  uint64_t zero = 0;
  auto st = cubes(X, 2, mode, [&](const Cube& c) {
    zero += derivative_fm(f, c) == 0;
    return true;
  });
  if (mode.exhaustive) {
    EstimateWithCI e;
    e.value = st.emitted ? static_cast<double>(zero) / static_cast<double>(st.emitted) : 1.0;
    e.samples = st.emitted;
    return e;
  }
  return bernoulli_estimate(zero, st.emitted, mode.confidence, mode.seed);
}

Correction testing_correct(const FunctionTable& f, const Variety& X, const Mode& mode, const VotePolicy& policy) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  require_total(f, X);
  Correction out;
  out.h = FunctionTable(S);
  out.margin.assign(pts.size(), 0.0);
  auto P = point_vectors(X);
  const int n = S.n();
  Vec c(n);
  auto vote_of = [&](const Vec& a, const Vec& b, const Vec& x) -> std::optional<Elem> {
    for (int i = 0; i < n; ++i) c[i] = F.sub(F.add(a[i], b[i]), x[i]);
    uint64_t ci = S.index(c);
    if (!X.contains_idx(ci)) return std::nullopt;
    return F.sub(F.add(f.at(a), f.at(b)), f.at(ci));
  };
  if (mode.exhaustive) {
    double work = std::pow(static_cast<double>(pts.size()), 3);
    if (work > 16.0 * static_cast<double>(loop_budget())) fail(ErrorCode::BudgetExceeded, "exhaustive correction over budget");
    for (size_t k = 0; k < pts.size(); ++k) {
      detail::Tally t(F.q());
      for (const Vec& a : P)
        for (const Vec& b : P)
          if (auto v = vote_of(a, b, P[k])) t.add(*v);
      out.votes += t.total;
      out.margin[k] = t.margin();
      if (t.strict_majority()) {
        out.h.set(pts[k], t.top());
      } else {
        out.h.set(pts[k], f.at(pts[k]));
        out.no_majority.push_back(pts[k]);
      }
    }
    return out;
  }
  Rng rng(mode.seed);
  for (size_t k = 0; k < pts.size(); ++k) {
    auto r = detail::adaptive_vote(F.q(), policy.min_votes, policy.max_votes, policy.margin, [&]() {
      return vote_of(P[rng.below(P.size())], P[rng.below(P.size())], P[k]);
    });
    out.votes += r.votes;
    out.margin[k] = r.margin;
    if (r.majority) {
      out.h.set(pts[k], r.value);
    } else {
      out.h.set(pts[k], f.at(pts[k]));
      out.no_majority.push_back(pts[k]);
    }
  }
  return out;
}

DifferenceExtension extend_difference_set(const FunctionTable& h, const Variety& X, const Mode& mode, int reps) {
  const Space& S = X.space();
  const Field& F = S.field();
  const auto& pts = X.points();
  require_total(h, X);
  DifferenceExtension out;
  out.fV = FunctionTable(S);
  out.covered = Bitset(S.size());
  auto P = point_vectors(X);
  auto conflict = [&](const Vec& x, const Vec& y, uint64_t vi) {
    auto str = [](const Vec& v) {
      std::string s = "(";
      for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
      return s + ")";
    };
    fail(ErrorCode::InconsistentRepresentations,
         "h(x) - h(y) differs from the stored value " + std::to_string(out.fV.at(vi)) + " at x = " + str(x) +
             ", y = " + str(y) + ", v = " + str(S.point(vi)));
  };
  if (mode.exhaustive) {
    check_square_budget(pts.size(), "difference set enumeration over budget");
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = 0; j < pts.size(); ++j) {
        uint64_t vi = S.index(vsub(F, P[i], P[j]));
        Elem val = F.sub(h.at(pts[i]), h.at(pts[j]));
        ++out.representations_checked;
        if (!out.covered.test(vi)) {
          out.covered.set(vi);
          out.fV.set(vi, val);
        } else if (out.fV.at(vi) != val) {
          conflict(P[i], P[j], vi);
        }
      }
  } else {
    Rng rng(mode.seed ^ 0x5bd1e995ULL);
    if (!pts.empty()) {
      Vec v(S.n()), y(S.n());
      uint64_t tries = 16ULL * static_cast<uint64_t>(std::max(reps, 1));
      for (uint64_t vi = 0; vi < S.size(); ++vi) {
        S.point(vi, v.data());
        int found = 0;
        for (uint64_t t = 0; t < tries && found < reps; ++t) {
          const Vec& x = P[rng.below(P.size())];
          for (int i = 0; i < S.n(); ++i) y[i] = F.sub(x[i], v[i]);
          uint64_t yi = S.index(y);
          if (!X.contains_idx(yi)) continue;
          Elem val = F.sub(h.at(x), h.at(yi));
          ++found;
          ++out.representations_checked;
          if (!out.covered.test(vi)) {
            out.covered.set(vi);
            out.fV.set(vi, val);
          } else if (out.fV.at(vi) != val) {
            conflict(x, y, vi);
          }
        }
      }
    }
  }
  for (uint64_t vi = 0; vi < S.size(); ++vi)
    if (!out.covered.test(vi)) out.fV.set(vi, 0);
  return out;
}

LinearDecode decode_linear(const FunctionTable& fV, const Bitset* domain) {
  const Space& S = fV.space();
  const Field& F = S.field();
  const uint32_t q = F.q();
  const uint64_t N = S.size();
  const uint64_t cap = std::max<uint64_t>(1ULL << 26, enumeration_budget());
  if (static_cast<double>(N) * q > static_cast<double>(cap)) fail(ErrorCode::BudgetExceeded, "linear decode table over budget");
  // A[v * q + r] counts residues; after the transform row l holds #{v : fV(v) - l.v = r}.
  std::vector<uint32_t> A(N * q, 0);
  uint64_t dom = 0;
  for (uint64_t v = 0; v < N; ++v) {
    if (domain ? !domain->test(v) : !fV.defined(v)) continue;
    ++A[v * q + fV.at(v)];
    ++dom;
  }
  // shift[(l * q + x) * q + r] = r + l x
  std::vector<uint32_t> shift(static_cast<size_t>(q) * q * q);
  for (uint32_t l = 0; l < q; ++l)
    for (uint32_t x = 0; x < q; ++x)
      for (uint32_t r = 0; r < q; ++r) shift[(l * q + x) * q + r] = F.add(r, F.mul(l, x));
  std::vector<uint32_t> tmp(static_cast<size_t>(q) * q);
  uint64_t stride = N;
  for (int i = 0; i < S.n(); ++i) {
    stride /= q;
    for (uint64_t hi = 0; hi < N; hi += stride * q)
      for (uint64_t lo = 0; lo < stride; ++lo) {
        uint64_t base = hi + lo;
        std::fill(tmp.begin(), tmp.end(), 0);
        for (uint32_t l = 0; l < q; ++l)
          for (uint32_t x = 0; x < q; ++x) {
            const uint32_t* row = &A[(base + x * stride) * q];
            const uint32_t* sh = &shift[(l * q + x) * q];
            for (uint32_t r = 0; r < q; ++r) tmp[l * q + r] += row[sh[r]];
          }
        for (uint32_t l = 0; l < q; ++l)
          std::copy(&tmp[l * q], &tmp[l * q] + q, &A[(base + l * stride) * q]);
      }
  }
  LinearDecode out;
  uint64_t best = 0, best_i = 0;
  bool any = false;
  for (uint64_t i = 0; i < N * q; ++i)
    if (!any || A[i] > best) {
      best = A[i];
      best_i = i;
      any = true;
    }
  out.g = S.point(best_i / q);
  out.constant = static_cast<Elem>(best_i % q);
  out.agree = best;
  out.domain = dom;
  out.agreement = dom ? static_cast<double>(best) / static_cast<double>(dom) : 1.0;
  return out;
}

CandidateSearch affine_candidate_search(const FunctionTable& f, const Variety& X) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  require_total(f, X);
  auto P = point_vectors(X);
  std::vector<Elem> fv;
  for (auto idx : X.points()) fv.push_back(f.at(idx));
  CandidateSearch out;
  double cands = std::pow(static_cast<double>(F.q()), n + 1);
  if (cands <= static_cast<double>(loop_budget())) {
    Space G(F, n);
    const bool keep = cands <= 4096;
    Vec g(n);
    for (uint64_t gi = 0; gi < G.size(); ++gi) {
      G.point(gi, g.data());
      for (Elem c = 0; c < F.q(); ++c) {
        size_t bad = P.size();
        for (size_t k = 0; k < P.size(); ++k)
          if (F.add(dot(F, g, P[k]), c) != fv[k]) {
            bad = k;
            break;
          }
        if (bad == P.size()) {
          out.found = true;
          out.g = g;
          out.constant = c;
          return out;
        }
        ++out.eliminated;
        if (keep) out.refutations.push_back(P[bad]);
      }
    }
    return out;
  }
  // Row-reduce the system g.x + c = f(x) one point at a time.
  out.exhaustive = false;
  const int m = n + 1;
  std::vector<Vec> basis;  // echelon rows of length m + 1
  std::vector<int> piv;
  for (size_t k = 0; k < P.size(); ++k) {
    Vec row(P[k]);
    row.push_back(1);
    row.push_back(fv[k]);
    for (size_t b = 0; b < basis.size(); ++b) {
      Elem c = row[piv[b]];
      if (!c) continue;
      for (int j = 0; j <= m; ++j) row[j] = F.sub(row[j], F.mul(c, basis[b][j]));
    }
    int p = -1;
    for (int j = 0; j < m; ++j)
      if (row[j]) {
        p = j;
        break;
      }
    if (p < 0) {
      if (row[m]) return out;  // inconsistent: no affine candidate
      continue;
    }
    Elem inv = F.inv(row[p]);
    for (auto& e : row) e = F.mul(e, inv);
    for (auto& br : basis) {
      Elem c = br[p];
      if (!c) continue;
      for (int j = 0; j <= m; ++j) br[j] = F.sub(br[j], F.mul(c, row[j]));
    }
    basis.push_back(row);
    piv.push_back(p);
  }
  Vec sol(m, 0);
  for (size_t b = 0; b < basis.size(); ++b) sol[piv[b]] = basis[b][m];
  out.found = true;
  out.g.assign(sol.begin(), sol.begin() + n);
  out.constant = sol[n];
  return out;
}

namespace {

void add_stat(Stats& s, const std::string& k, uint64_t v) { s.emplace_back(k, v); }

ExtensionCertificate run_linear(const FunctionTable& f, const Variety& X, const LinearOptions& opt);

// Basis of span(X) in reduced echelon form, with pivot columns.
std::pair<std::vector<Vec>, std::vector<int>> span_basis(const Variety& X) {
  const Field& F = X.field();
  const int n = X.n();
  std::vector<Vec> basis;
  std::vector<int> piv;
  for (auto idx : X.points()) {
    Vec row = X.space().point(idx);
    for (size_t b = 0; b < basis.size(); ++b) {
      Elem c = row[piv[b]];
      if (!c) continue;
      row = vsub(F, row, vscale(F, c, basis[b]));
    }
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (row[j]) {
        p = j;
        break;
      }
    if (p < 0) continue;
    row = vscale(F, F.inv(row[p]), row);
    for (auto& br : basis)
      if (br[p]) br = vsub(F, br, vscale(F, br[p], row));
    basis.push_back(row);
    piv.push_back(p);
    if (static_cast<int>(basis.size()) == n) break;
  }
  return {basis, piv};
}

}  // namespace

ExtensionCertificate extend_weakly_linear(const FunctionTable& f, const Variety& X, const LinearOptions& opt) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  require_total(f, X);
  if (X.count() == 0) {
    ExtensionCertificate c;
    c.status = ExtStatus::Extended;
    c.g.assign(n, 0);
    c.weakly_linear = true;
    c.corrected_fraction = c.final_agreement = 1;
    return c;
  }
  auto [basis, piv] = span_basis(X);
  const int k = static_cast<int>(basis.size());
  if (k == n) return run_linear(f, X, opt);

  // Work inside span(X) with pivot coordinates, then pull g back to V.
  Space T(F, k);
  std::vector<uint64_t> sub;
  FunctionTable fs(T);
  Vec a(k);
  for (auto idx : X.points()) {
    Vec x = S.point(idx);
    for (int i = 0; i < k; ++i) a[i] = x[piv[i]];
    uint64_t ti = T.index(a);
    sub.push_back(ti);
    fs.set(ti, f.at(idx));
  }
  Variety Y = Variety::from_points(T, sub);
  ExtensionCertificate c = run_linear(fs, Y, opt);
  Vec g(n, 0);
  if (!c.g.empty())
    for (int i = 0; i < k; ++i) g[piv[i]] = c.g[i];
  c.g = g;
  for (auto& w : c.witness) {
    Vec x(n, 0);
    for (int i = 0; i < k; ++i) x = vadd(F, x, vscale(F, w[i], basis[i]));
    w = x;
  }
  c.diagnostics.insert(c.diagnostics.begin(),
                       "X spans a subspace of dimension " + std::to_string(k) + "; g is zero on the complementary coordinates");
  add_stat(c.stats, "span_dimension", static_cast<uint64_t>(k));
  return c;
}

namespace {

ExtensionCertificate run_linear(const FunctionTable& f, const Variety& X, const LinearOptions& opt) {
  const Space& S = X.space();
  const Field& F = S.field();
  const int n = S.n();
  const auto& pts = X.points();
  ExtensionCertificate cert;
  cert.g.assign(n, 0);

  // Normalize so that f(0) = 0; the shift comes back as the constant term.
  Elem f0 = 0;
  uint64_t zero_idx = 0;
  if (X.contains_idx(zero_idx)) f0 = f.at(zero_idx);
  FunctionTable fn(S);
  for (auto idx : pts) fn.set(idx, F.sub(f.at(idx), f0));
  if (f0) cert.diagnostics.push_back("subtracted f(0) = " + std::to_string(f0));

  auto finish_with_search = [&](const FunctionTable& target) {
    CandidateSearch cs = affine_candidate_search(target, X);
    add_stat(cert.stats, "candidates_eliminated", cs.eliminated);
    if (cs.found) {
      cert.status = ExtStatus::Extended;
      cert.g = cs.g;
      cert.constant = F.add(cs.constant, f0);
      cert.diagnostics.push_back("g found by direct candidate search");
    } else {
      cert.status = ExtStatus::NotExtendable;
      cert.witness_kind = cs.exhaustive ? "candidate_refutations" : "inconsistent_linear_system";
      cert.witness = cs.refutations;
      cert.detail = cs.exhaustive ? "all " + std::to_string(cs.eliminated) + " affine-linear candidates disagree with f on X"
                                  : "g.x + c = f(x) over X has no solution";
    }
  };

  WitnessReport gate = is_weakly_linear(fn, X, opt.mode);
  cert.weakly_linear = gate.verdict;
  add_stat(cert.stats, "planes_checked", gate.checked);
  if (!gate.verdict && !opt.force) {
    cert.status = ExtStatus::NotExtendable;
    cert.witness_kind = "plane";
    cert.witness = gate.witness;
    cert.detail = "f is not linear on a plane inside X: " + gate.detail;
    return cert;
  }
  WitnessReport tri = check_additive_triples(fn, X, opt.mode);
  add_stat(cert.stats, "triples_checked", tri.checked);
  if (!tri.verdict && !opt.force) {
    cert.status = ExtStatus::NotExtendable;
    cert.witness_kind = "triple";
    cert.witness = tri.witness;
    cert.detail = tri.detail;
    return cert;
  }
  cert.forced = !gate.verdict || !tri.verdict;

  Correction corr = testing_correct(fn, X, opt.mode, opt.votes);
  add_stat(cert.stats, "votes", corr.votes);
  add_stat(cert.stats, "no_majority_points", corr.no_majority.size());
  uint64_t agree_fh = 0;
  for (auto idx : pts) agree_fh += fn.at(idx) == corr.h.at(idx);
  cert.corrected_fraction = static_cast<double>(agree_fh) / static_cast<double>(pts.size());

  bool ok = corr.no_majority.empty();
  if (!ok) cert.diagnostics.push_back("majority correction failed at " + std::to_string(corr.no_majority.size()) + " points");
  if (ok) {
    EstimateWithCI par = parallelogram_vanish_fraction(corr.h, X, opt.mode);
    add_stat(cert.stats, "squares_checked", par.samples);
    ok = par.value == 1.0;
    if (!ok) cert.diagnostics.push_back("corrected function fails on some squares of X");
  }
  LinearDecode dec;
  if (ok) {
    try {
      DifferenceExtension dx = extend_difference_set(corr.h, X, opt.mode, opt.reps);
      add_stat(cert.stats, "representations_checked", dx.representations_checked);
      dec = decode_linear(dx.fV, &dx.covered);
      add_stat(cert.stats, "difference_set_size", dec.domain);
      add_stat(cert.stats, "decode_agree", dec.agree);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InconsistentRepresentations) throw;
      ok = false;
      cert.diagnostics.push_back(e.what());
    }
  }

  const FunctionTable& target = cert.forced ? corr.h : fn;
  if (ok) {
    uint64_t agree_t = 0, agree_f = 0, repaired = 0;
    for (size_t k = 0; k < pts.size(); ++k) {
      Vec x = S.point(pts[k]);
      Elem gx = F.add(dot(F, dec.g, x), dec.constant);
      agree_t += gx == target.at(pts[k]);
      agree_f += gx == fn.at(pts[k]);
    }
    // Subtraction step: a disagreement at x next to y, x - y where g and f agree
    // certifies that f itself is not additive there.
    if (agree_f < pts.size()) {
      uint64_t budget = 1000;
      for (size_t k = 0; k < pts.size() && budget; ++k) {
        Vec x = S.point(pts[k]);
        if (F.add(dot(F, dec.g, x), dec.constant) == fn.at(pts[k])) continue;
        --budget;
        for (auto yi : pts) {
          Vec y = S.point(yi);
          uint64_t di = S.index(vsub(F, x, y));
          if (!X.contains_idx(di)) continue;
          if (F.add(dot(F, dec.g, y), dec.constant) != fn.at(yi)) continue;
          if (F.add(dot(F, dec.g, S.point(di)), dec.constant) != fn.at(di)) continue;
          ++repaired;
          break;
        }
      }
    }
    add_stat(cert.stats, "disagreements", pts.size() - agree_f);
    add_stat(cert.stats, "subtraction_witnesses", repaired);
    cert.final_agreement = static_cast<double>(agree_f) / static_cast<double>(pts.size());
    if (agree_t == pts.size()) {
      cert.status = ExtStatus::Extended;
      cert.g = dec.g;
      cert.constant = F.add(dec.constant, f0);
      return cert;
    }
    cert.diagnostics.push_back("decoded g disagrees with the target on " + std::to_string(pts.size() - agree_t) +
                               " points");
  }
  try {
    finish_with_search(fn);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    cert.status = ExtStatus::Inconclusive;
    cert.diagnostics.push_back(e.what());
  }
  if (cert.status == ExtStatus::Extended) cert.final_agreement = 1;
  return cert;
}

}  // namespace

}  // namespace hirank
