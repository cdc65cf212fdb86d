#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hirank/estimate.hpp"
#include "hirank/field.hpp"
#include "hirank/linalg.hpp"
#include "hirank/poly.hpp"
#include "hirank/rng.hpp"

namespace hirank {

// Enumeration budget (q^n); HIRANK_BUDGET overrides the 2^26 default.
uint64_t enumeration_budget();
// Budget for triple-loop style work; 2^24 default, scaled with HIRANK_BUDGET.
uint64_t loop_budget();

// F_q^n with points indexed lexicographically (x0 most significant).
class Space {
 public:
  Space() = default;
  Space(Field F, int n);

  const Field& field() const { return F_; }
  int n() const { return n_; }
  uint64_t size() const { return size_; }

  uint64_t index(const Vec& x) const;
  Vec point(uint64_t idx) const;
  void point(uint64_t idx, Elem* out) const;

  Vec add(const Vec& a, const Vec& b) const { return vadd(F_, a, b); }
  Vec sub(const Vec& a, const Vec& b) const { return vsub(F_, a, b); }
  Vec scale(Elem c, const Vec& a) const { return vscale(F_, c, a); }
  Vec zero() const { return Vec(n_, 0); }
  Vec random(Rng& rng) const { return random_vec(F_, n_, rng); }

 private:
  Field F_;
  int n_ = 0;
  uint64_t size_ = 1;
};

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(uint64_t n) : n_(n), w_((n + 63) / 64, 0) {}
  bool test(uint64_t i) const { return (w_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(uint64_t i) { w_[i >> 6] |= 1ULL << (i & 63); }
  uint64_t size() const { return n_; }
  const std::vector<uint64_t>& words() const { return w_; }
  std::vector<uint64_t>& words() { return w_; }

 private:
  uint64_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Zero set of a family, or an explicit point set. Enumeration is cached.
class Variety {
 public:
  Variety() = default;
  explicit Variety(PolyFamily fam);
  static Variety from_points(const Space& S, const std::vector<uint64_t>& points);

  const PolyFamily& family() const { return fam_; }
  const Space& space() const { return S_; }
  const Field& field() const { return S_.field(); }
  int n() const { return S_.n(); }
  bool explicit_points() const { return explicit_; }

  bool contains(const Vec& x) const;
  // Requires enumeration.
  bool contains_idx(uint64_t idx) const { return cache()->member.test(idx); }
  const std::vector<uint64_t>& points() const { return cache()->points; }
  const Bitset& membership() const { return cache()->member; }
  bool enumerated() const { return static_cast<bool>(cache_); }
  void enumerate() const { cache(); }
  uint64_t count() const { return points().size(); }

  // Single homogeneous quadric in odd characteristic.
  std::optional<QuadraticFunction> quadric() const;
  bool homogeneous() const { return explicit_ || fam_.homogeneous(); }

 private:
  struct Cache {
    std::vector<uint64_t> points;
    Bitset member;
  };
  const Cache* cache() const;
  PolyFamily fam_;
  Space S_;
  bool explicit_ = false;
  mutable std::shared_ptr<Cache> cache_;
};

// Function on a subset of a space; lookups outside the domain throw.
class FunctionTable {
 public:
  static constexpr Elem kUndef = 0xFFFFFFFFu;

  FunctionTable() = default;
  explicit FunctionTable(const Space& S) : S_(S), v_(S.size(), kUndef) {}
  static FunctionTable restrict(const Variety& X, const std::function<Elem(const Vec&)>& f);
  static FunctionTable restrict(const Variety& X, const Poly& P);
  static FunctionTable on_space(const Space& S, const std::function<Elem(const Vec&)>& f);

  const Space& space() const { return S_; }
  const Field& field() const { return S_.field(); }
  bool defined(uint64_t idx) const { return v_[idx] != kUndef; }
  bool defined(const Vec& x) const { return defined(S_.index(x)); }
  Elem at(uint64_t idx) const;
  Elem at(const Vec& x) const { return at(S_.index(x)); }
  void set(uint64_t idx, Elem v) { v_[idx] = v; }
  void set(const Vec& x, Elem v) { v_[S_.index(x)] = v; }
  uint64_t domain_size() const;
  const std::vector<Elem>& raw() const { return v_; }

 private:
  Space S_;
  std::vector<Elem> v_;
};

struct Cube {
  Vec base;
  std::vector<Vec> gens;
  int m() const { return static_cast<int>(gens.size()); }
  // u + omega . v, omega given by the low m bits of mask.
  Vec vertex(const Field& F, uint32_t mask) const;
};

struct WitnessReport {
  bool verdict = true;
  std::vector<Vec> witness;  // subspace generators, or cube base followed by generators
  std::string detail;
  uint64_t checked = 0;
};

Elem derivative_fm(const FunctionTable& f, const Cube& c);
// Sum over omega != 0 of (-1)^|omega| f(u + omega . v).
Elem derivative_fm_prime(const FunctionTable& f, const Cube& c);

using CubeSink = std::function<bool(const Cube&)>;  // return false to stop
struct CubeStreamStats {
  uint64_t emitted = 0;
  uint64_t tried = 0;
  double acceptance() const { return tried ? static_cast<double>(emitted) / static_cast<double>(tried) : 0.0; }
};
// Exhaustive: every (u, v) in X x V^m with all vertices in X, once each.
// Sampled: uniform (u, v) in X x V^m filtered to C_m(X); `samples` draws.
CubeStreamStats cubes(const Variety& X, int m, const Mode& mode, const CubeSink& sink);

WitnessReport is_weakly_linear(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact());
WitnessReport is_weakly_quadratic(const FunctionTable& f, const Variety& X, const Mode& mode = Mode::exact());
// Whether f agrees on span(gens) with a polynomial of degree <= deg.
bool restriction_is_polynomial(const FunctionTable& f, const std::vector<Vec>& gens, int deg);

// Independent frame (v_1..v_k) with span inside X, drawn with rng; nullopt on failure.
std::optional<std::vector<Vec>> sample_isotropic_frame(const Variety& X, int k, Rng& rng, int attempts = 200);

struct CountResult {
  uint64_t count = 0;
  double density = 0;
  EstimateWithCI estimate;  // sampled mode
};
CountResult ancillary_F(const Variety& X, const Mode& mode = Mode::exact());
CountResult ancillary_E(const Variety& X, const Mode& mode = Mode::exact());
bool in_F(const Variety& X, const Vec& v, const Vec& w);
bool in_E(const Variety& X, const Vec& v, const Vec& w, const Vec& u);

uint64_t y2_count_brute(const Variety& X);
uint64_t y2_count(const Variety& X);  // character sums
uint64_t y3_count_brute(const Variety& X);
uint64_t y3_count(const Variety& X);

// Map p: S -> T given as a table of target labels in [0, |T|).
double measure_homogeneity(const std::vector<uint32_t>& p, uint32_t image_size);
struct FubiniReport {
  bool applicable = false;  // |P|/|S| >= 1 - eps and eps <= C^-2
  bool holds = true;
  double C = 1;
  double q_fraction = 1;
  double bound = 0;
};
FubiniReport fubini_check(const std::vector<uint32_t>& p, uint32_t image_size, const std::vector<bool>& in_P, double eps);

}  // namespace hirank
