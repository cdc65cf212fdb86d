#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hirank/estimate.hpp"
#include "hirank/field.hpp"
#include "hirank/geometry.hpp"
#include "hirank/poly.hpp"

namespace hirank {

// Element of Z[zeta_p], coefficients of 1, zeta, ..., zeta^{p-1}.
class CycloInt {
 public:
  CycloInt() = default;
  explicit CycloInt(int p) : c(p, 0) {}
  static CycloInt scalar(int p, int64_t v);

  int p() const { return static_cast<int>(c.size()); }
  CycloInt& operator+=(const CycloInt& o);
  CycloInt operator*(const CycloInt& o) const;
  // Canonical form: coefficient of zeta^{p-1} reduced to zero.
  CycloInt canonical() const;
  bool is_integer() const;
  int64_t integer() const;  // requires is_integer()
  std::complex<double> value() const;
  double magnitude() const { return std::abs(value()); }
  bool operator==(const CycloInt& o) const { return canonical().c == o.canonical().c; }

  std::vector<int64_t> c;
};

class CharacterSumAccumulator {
 public:
  explicit CharacterSumAccumulator(int p) : hist_(p, 0) {}
  void add(int residue, uint64_t times = 1) {
    hist_[residue] += times;
    total_ += times;
  }
  void merge(const CharacterSumAccumulator& o);
  uint64_t total() const { return total_; }
  const std::vector<uint64_t>& histogram() const { return hist_; }
  CycloInt sum() const;
  // |sum| / total
  double magnitude() const;

 private:
  std::vector<uint64_t> hist_;
  uint64_t total_ = 0;
};

// Sum over F_q^n of zeta^{tr P(x)}, factorized over variable-connected components.
CycloInt exp_sum(const Poly& P, uint64_t budget = 0);

double bias(const Poly& P);
EstimateWithCI bias_sampled(const Poly& P, uint64_t samples, uint64_t seed, double confidence = 0.95);

// Histograms of tr f_2 over all (v, v1, v2), as elements of Z[zeta_p].
CycloInt u2_sum_folded(const FunctionTable& f);
CycloInt u2_sum_naive(const FunctionTable& f);
double u2_norm(const FunctionTable& f);
double u2_norm_naive(const FunctionTable& f);

struct GowersCS {
  double lhs = 0, rhs = 0;
  bool holds = true;
};
GowersCS gowers_cs_verify(const FunctionTable& f1, const FunctionTable& f2, const FunctionTable& f3,
                          const FunctionTable& f4);
double gowers_inner_naive(const FunctionTable& f1, const FunctionTable& f2, const FunctionTable& f3,
                          const FunctionTable& f4);

// Number of v with polys[i](v + shifts[i]) = targets[i] for all i.
uint64_t count_via_characters(const Field& F, int n, const std::vector<Poly>& polys, const std::vector<Vec>& shifts,
                              const std::vector<Elem>& targets, uint64_t budget = 0);
uint64_t count_by_enumeration(const Field& F, int n, const std::vector<Poly>& polys, const std::vector<Vec>& shifts,
                              const std::vector<Elem>& targets);

struct LinearCorrelation {
  Vec ell;
  double bias = 0;
};
LinearCorrelation best_linear_correlation(const Poly& P);

struct ScanRow {
  std::string field;
  int n = 0, d = 0;
  int rank_bucket = 0;
  std::string statistic;
  double value = 0;
  uint64_t samples = 0;
  uint64_t seed = 0;
};
// Random homogeneous degree-d polynomials bucketed by rank. For d = 2 in odd
// characteristic the bucket is ceil(r/2) from the classical
// rank r; otherwise the polynomial is drawn as a sum of `bucket` products and
// the bucket is that construction's upper bound.
std::vector<ScanRow> bias_rank_scan(int d, const Field& F, const std::vector<int>& n_list, int samples_per_cell,
                                    uint64_t seed, int max_bucket = 4);

}  // namespace hirank
