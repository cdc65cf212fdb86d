#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hirank/field.hpp"
#include "hirank/geometry.hpp"
#include "hirank/linalg.hpp"
#include "hirank/poly.hpp"
#include "hirank/rng.hpp"

namespace hirank {

// <coeffs, u> = value
struct LinearConstraint {
  Vec coeffs;
  Elem value = 0;
};

struct SolveOptions {
  uint64_t seed = 0;
  Rng* rng = nullptr;  // overrides seed when set
  // Scan U in lexicographic order first when |U| <= exhaustive_limit.
  bool prefer_exhaustive = true;
  uint64_t exhaustive_limit = 1ULL << 20;
  int random_trials = 64;
  // Exhaustive scan after random search fails; 0 means the loop budget.
  uint64_t fallback_limit = 0;
};

// u in U = {constraints} with Q(u0 + u) = a.
Vec affine_quadric_solve(const QuadraticFunction& Q, const std::vector<LinearConstraint>& constraints, const Vec& u0,
                         Elem a, const SolveOptions& opt = {});
std::optional<Vec> try_affine_quadric_solve(const QuadraticFunction& Q, const std::vector<LinearConstraint>& constraints,
                                            const Vec& u0, Elem a, const SolveOptions& opt = {});

// Extra pairing conditions B(v_a, w) = values[a] shared by all realized vectors.
struct FixedPairing {
  Vec w;
  Vec values;
};

// Vectors with Q(v_a) = D_aa and B(v_a, v_b) = D_ab; greedy with restarts.
std::vector<Vec> gram_realize(const QuadraticFunction& Q, const Mat& D, const SolveOptions& opt = {},
                              const std::vector<FixedPairing>& extra = {}, int restarts = 20);
std::optional<std::vector<Vec>> try_gram_realize(const QuadraticFunction& Q, const Mat& D, Rng& rng,
                                                 const std::vector<FixedPairing>& extra = {}, int restarts = 20);

struct ShiftedCount {
  uint64_t count = 0;
  double density = 0;
};
ShiftedCount shifted_zero_count(const PolyFamily& fam, const std::vector<Vec>& basepoints);

struct AxResult {
  Vec point;
  bool precondition_met = true;
};
AxResult ax_nonzero_solution(const PolyFamily& fam, uint64_t seed = 0, uint64_t random_tries = 20000);

struct DLargeReport {
  uint64_t projective_count = 0;
  uint64_t projective_space = 0;  // |P(V)|
  uint64_t bound = 0;             // ceil(|P(V)| / 2q^{D+1})
  bool holds = true;
};
DLargeReport d_large_verify(const PolyFamily& fam);

// Values indexed by omega in 2^3 as bit mask (bit i = omega_i).
using CubeValues = std::array<Elem, 8>;
struct ArraySolution {
  std::array<Vec, 3> z1, z2;
};
ArraySolution sol_array(const QuadraticFunction& Q, const CubeValues& alpha, const CubeValues& beta,
                        const CubeValues& gamma, const SolveOptions& opt = {});

struct OppositeMode {
  bool second = false;  // false: Q(y+u) = b with the other three zero; true: Q(y+u) = t, Q(y+u+u1) = s
  Elem t = 0, s = 0;
};
Vec opposite_face(const QuadraticFunction& Q, const Vec& u, const Vec& u1, const Vec& u2, const OppositeMode& mode,
                  const SolveOptions& opt = {});

std::pair<Elem, Elem> sum_two_squares(const Field& F, Elem c);

// v in V0 = v0-perp, Q(v) = a + b. Returns v1, v2, v3 in V0 with Q(v+v1) = a,
// Q(v+v2) = b and the other five non-base vertices isotropic.
std::array<Vec, 3> complete_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a, Elem b,
                                    const SolveOptions& opt = {});
std::optional<std::array<Vec, 3>> try_complete_cube_v0(const QuadraticFunction& Q, const Vec& v0, const Vec& v, Elem a,
                                                       Elem b, Rng& rng);

// Exact count of (u, u1, u2, u3) in V^4 with Q(u + omega . u) = a_omega for all omega.
ShiftedCount equi_count(const QuadraticFunction& Q, const CubeValues& a);

}  // namespace hirank
