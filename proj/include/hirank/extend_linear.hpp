#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hirank/estimate.hpp"
#include "hirank/geometry.hpp"

namespace hirank {

enum class ExtStatus { Extended, NotExtendable, Inconclusive };
const char* status_name(ExtStatus s);
int status_exit_code(ExtStatus s);

struct VotePolicy {
  uint32_t min_votes = 9;
  uint32_t max_votes = 1000;
  double margin = 0.9;  // early stop; the decision itself is strict majority
};

using Stats = std::vector<std::pair<std::string, uint64_t>>;

struct ExtensionCertificate {
  ExtStatus status = ExtStatus::Inconclusive;
  Vec g;           // linear part
  Elem constant = 0;
  bool forced = false;
  bool weakly_linear = false;
  double corrected_fraction = 0;  // agreement of f with h on X
  double final_agreement = 0;     // agreement of g with f on X
  std::string witness_kind;
  std::vector<Vec> witness;
  std::string detail;
  Stats stats;
  std::vector<std::string> diagnostics;

  Elem eval(const Field& F, const Vec& x) const;
};

// f(x) = f(z) + f(x - z) whenever x, z, x - z lie in X. Witness is (x, z).
WitnessReport check_additive_triples(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact());

// Fraction of 2-cubes of X on which f_2 vanishes.
EstimateWithCI parallelogram_vanish_fraction(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact());

struct Correction {
  FunctionTable h;
  std::vector<double> margin;         // aligned with X.points()
  std::vector<uint64_t> no_majority;  // point indices without a strict majority
  uint64_t votes = 0;
};
// h(x) = majority of f(x+y) + f(x+z) - f(x+y+z) over (y, z) with all three points in X.
// Exhaustive in exact mode; sampled mode draws adaptive votes per point.
Correction testing_correct(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact(),
                           const VotePolicy& policy = {});

struct DifferenceExtension {
  FunctionTable fV;  // total on V, zero off X - X
  Bitset covered;    // X - X
  uint64_t representations_checked = 0;
};
// fV(x - y) = h(x) - h(y). Exact mode checks every representation; sampled mode up to `reps`.
DifferenceExtension extend_difference_set(const FunctionTable& h, const Variety& X, const Mode& mode = Mode::exact(),
                                          int reps = 100);

struct LinearDecode {
  Vec g;
  Elem constant = 0;
  uint64_t agree = 0, domain = 0;
  double agreement = 0;
};
// Affine-linear g maximizing agreement with fV on `domain` (all defined points when null).
// Every candidate is scored exactly; ties go to the lexicographically first (g, constant).
LinearDecode decode_linear(const FunctionTable& fV, const Bitset* domain = nullptr);

struct CandidateSearch {
  bool found = false;
  Vec g;
  Elem constant = 0;
  uint64_t eliminated = 0;
  bool exhaustive = true;  // false when decided by a linear system instead
  std::vector<Vec> refutations;  // one disagreeing point per candidate, when enumerated and small
};
// Decides whether some affine-linear function equals f on all of X.
CandidateSearch affine_candidate_search(const FunctionTable& f, const Variety& X);

struct LinearOptions {
  bool force = false;
  Mode mode = Mode::exact();
  VotePolicy votes{};
  int reps = 100;
};
ExtensionCertificate extend_weakly_linear(const FunctionTable& f, const Variety& X, const LinearOptions& opt = {});

}  // namespace hirank
