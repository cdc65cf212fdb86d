#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hirank/extend_linear.hpp"
#include "hirank/geometry.hpp"
#include "hirank/poly.hpp"

namespace hirank {

struct EvenOdd {
  FunctionTable odd, even;  // of f - f(0)
  Elem f0 = 0;
};
EvenOdd even_odd_split(const FunctionTable& f, const Variety& X);

// f_3(0|y,z,w) = 0 over 3-cubes based at 0 with every other vertex in X. Witness is (y, z, w).
WitnessReport check_3cubes_origin(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact());

// h(x) = majority over cubes (x|y,z,w) with the seven other vertices in X of
// sum_{omega != 0} (-1)^{|omega|+1} f(x + omega.(y,z,w)).
Correction testing_correct_3(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact(),
                             const VotePolicy& policy = {});

struct QuadraticSetting {
  QuadraticFunction Q;  // homogeneous, rescaled so that Q(v0) = 1
  Elem scale = 1;       // Q = scale * input form
  Vec v0;
  Vec v0_row;  // u -> B(u, v0)

  static QuadraticSetting make(const QuadraticFunction& Q);
  bool in_V0(const Vec& v) const;
  // For v in V0 with Q(v) = a^2, the smallest such a.
  std::optional<Elem> root(const Vec& v) const;
  bool in_Xsq(const Vec& v) const { return in_V0(v) && root(v).has_value(); }
  Vec project_V0(const Vec& v) const;
};

struct Valued {
  Elem value = 0;
  bool ok = false;  // strict majority reached
  double margin = 0;
  uint64_t votes = 0;
};

struct QuadStats {
  uint64_t h_evals = 0, h_votes = 0, h_failed = 0;
  uint64_t xsq_evals = 0, xsq_votes = 0, xsq_failed = 0, empty_z = 0;
  uint64_t v0_evals = 0, v0_votes = 0, v0_failed = 0, cube_failures = 0;
};

// Lazy evaluation of the corrected function h on X, its extension g to X_sq,
// and the extension to V0. Values are memoized.
class QuadraticExtender {
 public:
  // `corrected` skips the majority step and reads h straight from the table.
  QuadraticExtender(const Variety& X, const FunctionTable& f_even, QuadraticSetting setting, VotePolicy policy,
                    uint64_t seed, bool corrected = false);
  ~QuadraticExtender();
  QuadraticExtender(QuadraticExtender&&) noexcept;

  Valued h(const Vec& x);
  Valued g_sq(const Vec& v);  // v in X_sq
  Valued g_v0(const Vec& v);  // v in V0
  // Use a table for g on X_sq instead of voting.
  void set_xsq_table(const FunctionTable* g);

  const QuadraticSetting& setting() const;
  const QuadStats& stats() const;
  Rng& rng();

 private:
  struct Impl;
  std::unique_ptr<Impl> p_;
};

// Tables over X_sq and V0 for desk-scale inputs; h must vanish on 3-cubes of X.
struct StageTable {
  FunctionTable g;
  std::vector<uint64_t> failed;  // points without a strict majority (or without cubes)
  uint64_t votes = 0;
};
StageTable extend_to_Xsq(const FunctionTable& h, const Variety& X, const QuadraticSetting& s, const VotePolicy& policy = {},
                         uint64_t seed = 0);
StageTable extend_to_V0(const FunctionTable& g_sq, const Variety& X, const QuadraticSetting& s,
                        const VotePolicy& policy = {}, uint64_t seed = 0);

// Homogeneous quadratic form through the sample points, any solution if several.
struct FormFit {
  QuadraticFunction form;
  int rank = 0, unknowns = 0;
};
std::optional<FormFit> fit_quadratic_form(const Field& F, int n, const std::vector<Vec>& pts, const std::vector<Elem>& vals);

struct LiftReport {
  Vec x0;
  uint64_t affine_points = 0, lift_points = 0;
  int lift_rank = 0;
  uint64_t residual_checks = 0, residual_failures = 0;
};
// Common quadratic extension of gV0 (a form on V0) and of f on X, following the
// x0 / M / N / W' construction. f returns nullopt where its value is unreliable.
QuadraticFunction lift_V0_to_V(const QuadraticFunction& gV0, const std::function<std::optional<Elem>(const Vec&)>& f,
                               const Variety& X, const QuadraticSetting& s, Rng& rng, LiftReport* report = nullptr);

struct QuadOptions {
  uint64_t seed = 0;
  VotePolicy votes{};
  uint64_t gate_samples = 200;    // frames when the exhaustive gate is over budget
  uint64_t verify_samples = 200;  // 3-cubes used to re-check the corrected function
  int fit_oversample = 2;         // samples per unknown in each fit
};

struct QuadCertificate {
  ExtStatus status = ExtStatus::Inconclusive;
  QuadraticFunction g;
  bool weakly_quadratic = false;
  Vec v0;
  Elem scale = 1;
  ExtStatus odd_status = ExtStatus::Inconclusive;
  double final_agreement = 0;
  std::string witness_kind;
  std::vector<Vec> witness;
  std::string detail;
  Stats stats;
  std::vector<std::string> diagnostics;
};
QuadCertificate extend_weakly_quadratic(const FunctionTable& f, const Variety& X, const QuadOptions& opt = {});

}  // namespace hirank
