#include "hirank/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hirank/errors.hpp"

namespace hirank {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> hist_value(const std::vector<uint64_t>& h) {
  int p = static_cast<int>(h.size());
  std::complex<double> z = 0;
  for (int r = 0; r < p; ++r)
    if (h[r]) z += static_cast<double>(h[r]) * std::polar(1.0, kTwoPi * r / p);
  return z;
}

CycloInt from_hist(const std::vector<uint64_t>& h) {
  CycloInt c(static_cast<int>(h.size()));
  for (size_t r = 0; r < h.size(); ++r) c.c[r] = static_cast<int64_t>(h[r]);
  return c;
}

CycloInt conj(const CycloInt& a) {
  CycloInt r(a.p());
  for (int i = 0; i < a.p(); ++i) r.c[(a.p() - i) % a.p()] = a.c[i];
  return r;
}

// Variable-connected pieces of P with their residue histograms.
struct Factorization {
  std::vector<std::vector<uint64_t>> hists;
  std::vector<int> sizes;  // variables per piece
  int free_vars = 0;
  int const_residue = 0;
};

Factorization factorize(const Poly& P, uint64_t budget) {
  const Field& F = P.field();
  int n = P.n(), p = F.p();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<bool> used(n, false);
  Factorization fz;
  for (auto& [e, c] : P.terms()) {
    int first = -1;
    for (int i = 0; i < n; ++i)
      if (e[i]) {
        used[i] = true;
        if (first < 0)
          first = i;
        else
          parent[find(i)] = find(first);
      }
    if (first < 0) fz.const_residue = F.trace(c);
  }
  std::vector<int> root_slot(n, -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (!used[i]) {
      ++fz.free_vars;
      continue;
    }
    int r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[root_slot[r]].push_back(i);
  }
  for (auto& g : groups) {
    int k = static_cast<int>(g.size());
    uint64_t N = 1;
    for (int i = 0; i < k; ++i) {
      N *= F.q();
      if (N > budget) fail(ErrorCode::BudgetExceeded, "character sum component of " + std::to_string(k) + " variables over budget");
    }
    std::vector<int> local(n, -1);
    for (int i = 0; i < k; ++i) local[g[i]] = i;
    Poly sub(F, k);
    for (auto& [e, c] : P.terms()) {
      int first = -1;
      for (int i = 0; i < n && first < 0; ++i)
        if (e[i]) first = i;
      if (first < 0 || local[first] < 0) continue;
      Exps le(k, 0);
      for (int i = 0; i < n; ++i)
        if (e[i]) le[local[i]] = e[i];
      sub.add_term(le, c);
    }
    CompiledPoly cp(sub);
    std::vector<uint64_t> h(p, 0);
    Vec x(k, 0);
    for (uint64_t t = 0; t < N; ++t) {
      ++h[F.trace(cp.eval(x))];
      for (int i = k - 1; i >= 0; --i) {
        if (++x[i] < F.q()) break;
        x[i] = 0;
      }
    }
    fz.hists.push_back(std::move(h));
    fz.sizes.push_back(k);
  }
  return fz;
}

uint64_t default_budget(uint64_t b) { return b ? b : enumeration_budget(); }

uint64_t checked_pow(uint64_t b, int e, const char* what) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (1ULL << 62) / b) fail(ErrorCode::BudgetExceeded, what);
    r *= b;
  }
  return r;
}

// Index of point + shift in a digit-table setting.
struct Adder {
  const Space& S;
  std::vector<Vec> pts;
  explicit Adder(const Space& s) : S(s), pts(s.size()) {
    for (uint64_t i = 0; i < s.size(); ++i) pts[i] = s.point(i);
  }
  uint64_t add(uint64_t a, uint64_t b) const {
    const Field& F = S.field();
    uint64_t idx = 0;
    for (int i = 0; i < S.n(); ++i) idx = idx * F.q() + F.add(pts[a][i], pts[b][i]);
    return idx;
  }
};

std::vector<uint8_t> trace_table(const FunctionTable& f) {
  const Space& S = f.space();
  std::vector<uint8_t> t(S.size());
  for (uint64_t i = 0; i < S.size(); ++i) t[i] = static_cast<uint8_t>(f.field().trace(f.at(i)));
  return t;
}

// Addition table over V when it fits, digits otherwise.
std::vector<uint32_t> add_table(const Space& S) {
  uint64_t N = S.size();
  if (N * N > (1ULL << 28)) fail(ErrorCode::BudgetExceeded, "q^{2n} addition table over budget");
  Adder A(S);
  std::vector<uint32_t> t(N * N);
  for (uint64_t a = 0; a < N; ++a)
    for (uint64_t b = 0; b < N; ++b) t[a * N + b] = static_cast<uint32_t>(A.add(a, b));
  return t;
}

void require_total(const FunctionTable& f) {
  for (uint64_t i = 0; i < f.space().size(); ++i)
    if (!f.defined(i)) f.at(i);  // throws with the point
}

}  // namespace

CycloInt CycloInt::scalar(int p, int64_t v) {
  CycloInt c(p);
  c.c[0] = v;
  return c;
}

CycloInt& CycloInt::operator+=(const CycloInt& o) {
  if (c.empty()) c.assign(o.p(), 0);
  for (int i = 0; i < p(); ++i) c[i] += o.c[i];
  return *this;
}

CycloInt CycloInt::operator*(const CycloInt& o) const {
  int P = p();
  CycloInt r(P);
  for (int i = 0; i < P; ++i)
    if (c[i])
      for (int j = 0; j < P; ++j) r.c[(i + j) % P] += c[i] * o.c[j];
  return r;
}

CycloInt CycloInt::canonical() const {
  CycloInt r = *this;
  int64_t top = r.c[p() - 1];
  for (auto& x : r.c) x -= top;
  return r;
}

bool CycloInt::is_integer() const {
  CycloInt r = canonical();
  for (int i = 1; i < p(); ++i)
    if (r.c[i]) return false;
  return true;
}

int64_t CycloInt::integer() const {
  if (!is_integer()) fail(ErrorCode::PreconditionViolated, "cyclotomic value is not an integer");
  return canonical().c[0];
}

std::complex<double> CycloInt::value() const {
  std::complex<double> z = 0;
  for (int r = 0; r < p(); ++r)
    if (c[r]) z += static_cast<double>(c[r]) * std::polar(1.0, kTwoPi * r / p());
  return z;
}

void CharacterSumAccumulator::merge(const CharacterSumAccumulator& o) {
  for (size_t r = 0; r < hist_.size(); ++r) hist_[r] += o.hist_[r];
  total_ += o.total_;
}

CycloInt CharacterSumAccumulator::sum() const { return from_hist(hist_); }

double CharacterSumAccumulator::magnitude() const {
  return total_ ? std::abs(hist_value(hist_)) / static_cast<double>(total_) : 0.0;
}

CycloInt exp_sum(const Poly& P, uint64_t budget) {
  const Field& F = P.field();
  checked_pow(F.q(), P.n(), "q^n does not fit an exact character sum");
  Factorization fz = factorize(P, default_budget(budget));
  int p = F.p();
  CycloInt r = CycloInt::scalar(p, static_cast<int64_t>(checked_pow(F.q(), fz.free_vars, "overflow")));
  for (auto& h : fz.hists) r = r * from_hist(h);
  CycloInt shift(p);
  shift.c[fz.const_residue] = 1;
  return r * shift;
}

double bias(const Poly& P) {
  Factorization fz = factorize(P, enumeration_budget());
  double b = 1.0;
  for (size_t i = 0; i < fz.hists.size(); ++i)
    b *= std::abs(hist_value(fz.hists[i])) / std::pow(static_cast<double>(P.field().q()), fz.sizes[i]);
  return std::min(1.0, b);
}

EstimateWithCI bias_sampled(const Poly& P, uint64_t samples, uint64_t seed, double confidence) {
  const Field& F = P.field();
  Rng rng(seed);
  CompiledPoly cp(P);
  CharacterSumAccumulator acc(F.p());
  Vec x(P.n());
  for (uint64_t s = 0; s < samples; ++s) {
    for (auto& xi : x) xi = static_cast<Elem>(rng.below(F.q()));
    acc.add(F.trace(cp.eval(x)));
  }
  EstimateWithCI e;
  e.value = acc.magnitude();
  // Real and imaginary means each have range 2; union bound over the two.
  e.half_width = samples ? std::min(1.0, 2.0 * std::sqrt(2.0) * hoeffding_half_width(samples, (1.0 + confidence) / 2.0)) : 1.0;
  e.confidence = confidence;
  e.samples = samples;
  e.seed = seed;
  e.exact = false;
  return e;
}

CycloInt u2_sum_folded(const FunctionTable& f) {
  require_total(f);
  const Space& S = f.space();
  uint64_t N = S.size();
  int p = f.field().p();
  if (static_cast<double>(N) * N > static_cast<double>(loop_budget()) * 16)
    fail(ErrorCode::BudgetExceeded, "folded U2 needs q^{2n} work");
  auto tr = trace_table(f);
  Adder A(S);
  CycloInt total(p);
  std::vector<uint64_t> h(p);
  for (uint64_t sh = 0; sh < N; ++sh) {
    std::fill(h.begin(), h.end(), 0);
    for (uint64_t v = 0; v < N; ++v) ++h[(tr[A.add(v, sh)] + p - tr[v]) % p];
    CycloInt a = from_hist(h);
    total += a * conj(a);
  }
  return total;
}

CycloInt u2_sum_naive(const FunctionTable& f) {
  require_total(f);
  const Space& S = f.space();
  uint64_t N = S.size();
  int p = f.field().p();
  if (static_cast<double>(N) * N * N > static_cast<double>(loop_budget()) * 4)
    fail(ErrorCode::BudgetExceeded, "naive U2 needs q^{3n} work");
  auto tr = trace_table(f);
  auto add = add_table(S);
  std::vector<uint64_t> h(p, 0);
  for (uint64_t v = 0; v < N; ++v)
    for (uint64_t a = 0; a < N; ++a) {
      uint64_t va = add[v * N + a];
      for (uint64_t b = 0; b < N; ++b) {
        uint64_t vb = add[v * N + b], vab = add[va * N + b];
        ++h[(2 * p + tr[v] + tr[vab] - tr[va] - tr[vb]) % p];
      }
    }
  return from_hist(h);
}

double u2_norm(const FunctionTable& f) {
  double N = static_cast<double>(f.space().size());
  double m = u2_sum_folded(f).magnitude() / (N * N * N);
  return std::pow(std::max(0.0, m), 0.25);
}

double u2_norm_naive(const FunctionTable& f) {
  double N = static_cast<double>(f.space().size());
  double m = u2_sum_naive(f).magnitude() / (N * N * N);
  return std::pow(std::max(0.0, m), 0.25);
}

GowersCS gowers_cs_verify(const FunctionTable& f1, const FunctionTable& f2, const FunctionTable& f3,
                          const FunctionTable& f4) {
  for (auto* g : {&f2, &f3, &f4})
    if (g->space().size() != f1.space().size() || g->field() != f1.field())
      fail(ErrorCode::DimensionMismatch, "Gowers inner product needs a common domain");
  require_total(f1);
  require_total(f2);
  require_total(f3);
  require_total(f4);
  const Space& S = f1.space();
  uint64_t N = S.size();
  int p = f1.field().p();
  if (static_cast<double>(N) * N > static_cast<double>(loop_budget()) * 16)
    fail(ErrorCode::BudgetExceeded, "Gowers inner product needs q^{2n} work");
  auto t1 = trace_table(f1), t2 = trace_table(f2), t3 = trace_table(f3), t4 = trace_table(f4);
  Adder A(S);
  CycloInt total(p);
  std::vector<uint64_t> ha(p), hb(p);
  for (uint64_t a = 0; a < N; ++a) {
    std::fill(ha.begin(), ha.end(), 0);
    std::fill(hb.begin(), hb.end(), 0);
    for (uint64_t v = 0; v < N; ++v) {
      uint64_t va = A.add(v, a);
      ++ha[(t1[v] + t2[va]) % p];
      ++hb[(t3[v] + t4[va]) % p];
    }
    total += from_hist(ha) * from_hist(hb);
  }
  GowersCS r;
  double Nd = static_cast<double>(N);
  r.lhs = total.magnitude() / (Nd * Nd * Nd);
  r.rhs = std::min({u2_norm(f1), u2_norm(f2), u2_norm(f3), u2_norm(f4)});
  r.holds = r.lhs <= r.rhs + 1e-9;
  return r;
}

double gowers_inner_naive(const FunctionTable& f1, const FunctionTable& f2, const FunctionTable& f3,
                          const FunctionTable& f4) {
  const Space& S = f1.space();
  uint64_t N = S.size();
  int p = f1.field().p();
  if (static_cast<double>(N) * N * N > static_cast<double>(loop_budget()) * 4)
    fail(ErrorCode::BudgetExceeded, "naive Gowers inner product needs q^{3n} work");
  auto t1 = trace_table(f1), t2 = trace_table(f2), t3 = trace_table(f3), t4 = trace_table(f4);
  auto add = add_table(S);
  std::vector<uint64_t> h(p, 0);
  for (uint64_t v = 0; v < N; ++v)
    for (uint64_t a = 0; a < N; ++a) {
      uint64_t va = add[v * N + a];
      for (uint64_t b = 0; b < N; ++b)
        ++h[(t1[v] + t2[va] + t3[add[v * N + b]] + t4[add[va * N + b]]) % p];
    }
  double Nd = static_cast<double>(N);
  return std::abs(hist_value(h)) / (Nd * Nd * Nd);
}

uint64_t count_via_characters(const Field& F, int n, const std::vector<Poly>& polys, const std::vector<Vec>& shifts,
                              const std::vector<Elem>& targets, uint64_t budget) {
  if (polys.size() != targets.size() || (!shifts.empty() && shifts.size() != polys.size()))
    fail(ErrorCode::DimensionMismatch, "constraints, shifts and targets differ in length");
  if (polys.empty()) return checked_pow(F.q(), n, "q^n too large");
  int M = static_cast<int>(polys.size());
  uint64_t q = F.q();
  uint64_t qM = checked_pow(q, M, "q^M too large");
  budget = default_budget(budget);
  std::vector<Poly> R;
  for (int i = 0; i < M; ++i) {
    if (polys[i].n() != n || polys[i].field() != F) fail(ErrorCode::DimensionMismatch, "constraint ring mismatch");
    Poly P = shifts.empty() ? polys[i] : polys[i].shifted(shifts[i]);
    R.push_back(P - Poly::constant(F, n, targets[i]));
  }
  // Cost estimate from the widest piece of the full combination.
  Poly all(F, n);
  for (auto& P : R) all = all + P;
  {
    Factorization fz = factorize(all, budget);
    uint64_t piece = 0;
    for (size_t i = 0; i < fz.sizes.size(); ++i) piece += checked_pow(q, fz.sizes[i], "piece too large");
    if (static_cast<double>(qM) * static_cast<double>(piece) > static_cast<double>(budget) * 4)
      fail(ErrorCode::BudgetExceeded, "character-sum count over budget");
  }
  CycloInt total(F.p());
  Vec a(M, 0);
  for (uint64_t t = 0; t < qM; ++t) {
    Poly comb(F, n);
    for (int i = 0; i < M; ++i)
      if (a[i]) comb = comb + R[i].scaled(a[i]);
    total += exp_sum(comb, budget);
    for (int i = M - 1; i >= 0; --i) {
      if (++a[i] < q) break;
      a[i] = 0;
    }
  }
  int64_t s = total.integer();
  if (s < 0 || static_cast<uint64_t>(s) % qM != 0)
    fail(ErrorCode::PreconditionViolated, "character sum is not a multiple of q^M");
  return static_cast<uint64_t>(s) / qM;
}

uint64_t count_by_enumeration(const Field& F, int n, const std::vector<Poly>& polys, const std::vector<Vec>& shifts,
                              const std::vector<Elem>& targets) {
  if (polys.size() != targets.size() || (!shifts.empty() && shifts.size() != polys.size()))
    fail(ErrorCode::DimensionMismatch, "constraints, shifts and targets differ in length");
  Space S(F, n);
  if (S.size() > enumeration_budget()) fail(ErrorCode::BudgetExceeded, "q^n over enumeration budget");
  std::vector<CompiledPoly> cp;
  for (size_t i = 0; i < polys.size(); ++i)
    cp.emplace_back(shifts.empty() ? polys[i] : polys[i].shifted(shifts[i]));
  uint64_t count = 0;
  Vec x(n, 0);
  for (uint64_t t = 0; t < S.size(); ++t) {
    bool ok = true;
    for (size_t i = 0; i < cp.size() && ok; ++i) ok = cp[i].eval(x) == targets[i];
    count += ok;
    for (int i = n - 1; i >= 0; --i) {
      if (++x[i] < F.q()) break;
      x[i] = 0;
    }
  }
  return count;
}

LinearCorrelation best_linear_correlation(const Poly& P) {
  const Field& F = P.field();
  int n = P.n(), p = F.p();
  Space S(F, n);
  uint64_t N = S.size();
  if (static_cast<double>(N) * N > static_cast<double>(loop_budget()) * 16)
    fail(ErrorCode::BudgetExceeded, "q^{2n} linear-form search over budget");
  CompiledPoly cp(P);
  std::vector<Vec> pts(N);
  std::vector<Elem> val(N);
  for (uint64_t i = 0; i < N; ++i) {
    pts[i] = S.point(i);
    val[i] = cp.eval(pts[i]);
  }
  LinearCorrelation best;
  best.bias = -1;
  std::vector<uint64_t> h(p);
  for (uint64_t li = 0; li < N; ++li) {
    const Vec& ell = pts[li];
    std::fill(h.begin(), h.end(), 0);
    for (uint64_t x = 0; x < N; ++x) ++h[F.trace(F.add(val[x], dot(F, ell, pts[x])))];
    double b = std::abs(hist_value(h)) / static_cast<double>(N);
    if (b > best.bias + 1e-12) {
      best.bias = b;
      best.ell = ell;
    }
  }
  return best;
}

namespace {

Poly random_homogeneous(const Field& F, int n, int d, Rng& rng) {
  Poly P(F, n);
  if (d == 0) return Poly::constant(F, n, static_cast<Elem>(rng.below(F.q())));
  Exps e(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      e[i] = static_cast<uint16_t>(left);
      P.add_term(e, static_cast<Elem>(rng.below(F.q())));
      e[i] = 0;
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = static_cast<uint16_t>(k);
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, d);
  return P;
}

Elem random_nonzero(const Field& F, Rng& rng) { return static_cast<Elem>(1 + rng.below(F.q() - 1)); }

}  // namespace

std::vector<ScanRow> bias_rank_scan(int d, const Field& F, const std::vector<int>& n_list, int samples_per_cell,
                                    uint64_t seed, int max_bucket) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "scan needs d >= 2");
  std::vector<ScanRow> rows;
  Rng rng(seed);
  bool quadratic = d == 2 && F.odd();
  for (int n : n_list) {
    for (int b = 0; b <= max_bucket; ++b) {
      if (quadratic && 2 * b - 1 > n) break;
      if (!quadratic && b > n) break;
      double mx = 0, sum = 0;
      int drawn = 0;
      for (int s = 0; s < samples_per_cell; ++s) {
        Poly P(F, n);
        if (quadratic) {
          int r = b == 0 ? 0 : (2 * b <= n && rng.below(2) ? 2 * b : 2 * b - 1);
          for (int i = 0; i < r; ++i) {
            Exps e(n, 0);
            e[i] = 2;
            P.add_term(e, random_nonzero(F, rng));
          }
          Mat A = random_invertible(F, n, rng);
          P = P.compose_affine(A, Vec(n, 0));
          if ((classical_quadratic_rank(P) + 1) / 2 != b) fail(ErrorCode::PreconditionViolated, "scan bucket mismatch");
        } else {
          for (int i = 0; i < b; ++i) {
            Vec l(n);
            for (auto& c : l) c = static_cast<Elem>(rng.below(F.q()));
            P = P + Poly::linear(F, l) * random_homogeneous(F, n, d - 1, rng);
          }
        }
        double v = bias(P);
        mx = std::max(mx, v);
        sum += v;
        ++drawn;
      }
      for (int k = 0; k < 2; ++k) {
        ScanRow row;
        row.field = F.spec();
        row.n = n;
        row.d = d;
        row.rank_bucket = b;
        row.statistic = k == 0 ? "max_bias" : "mean_bias";
        row.value = k == 0 ? mx : (drawn ? sum / drawn : 0.0);
        row.samples = static_cast<uint64_t>(drawn);
        row.seed = seed;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace hirank
