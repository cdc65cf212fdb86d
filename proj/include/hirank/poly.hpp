#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hirank/field.hpp"
#include "hirank/linalg.hpp"

namespace hirank {

using Exps = std::vector<uint16_t>;

// Higher total degree first, then lexicographically larger exponent vector.
struct MonoOrder {
  bool operator()(const Exps& a, const Exps& b) const;
};

int total_degree(const Exps& e);

class Poly {
 public:
  using Terms = std::map<Exps, Elem, MonoOrder>;

  Poly() = default;
  Poly(Field F, int n) : F_(std::move(F)), n_(n) {}
  static Poly constant(const Field& F, int n, Elem c);
  static Poly variable(const Field& F, int n, int i);
  static Poly linear(const Field& F, const Vec& coeffs, Elem c = 0);

  const Field& field() const { return F_; }
  int n() const { return n_; }
  const Terms& terms() const { return terms_; }

  void add_term(const Exps& e, Elem c);
  Elem coeff(const Exps& e) const;

  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous() const;
  Poly homogeneous_part(int d) const;
  std::vector<int> variables() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(Elem c) const;
  bool operator==(const Poly& o) const { return n_ == o.n_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Elem eval(const Vec& x) const;

  // x_i -> images[i]; all images share a ring.
  Poly substitute(const std::vector<Poly>& images) const;
  // P(x + s).
  Poly shifted(const Vec& s) const;
  // P(A x + b).
  Poly compose_affine(const Mat& A, const Vec& b) const;
  // Same polynomial viewed in a ring with more variables; variable i goes to offset + i.
  Poly embedded(int n_new, int offset) const;

  std::string format() const;

 private:
  Field F_;
  int n_ = 0;
  Terms terms_;
};

Poly parse_poly(const std::string& text, int n, const Field& F);

// Flat evaluation plan for inner loops.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& P);
  Elem eval(const Elem* x) const;
  Elem eval(const Vec& x) const { return eval(x.data()); }
  int n() const { return n_; }

 private:
  Field F_;
  int n_ = 0;
  std::vector<Elem> coef_;
  std::vector<uint32_t> start_;
  std::vector<uint16_t> var_, exp_;
};

struct PolyFamily {
  Field F;
  int n = 0;
  std::vector<Poly> members;

  int L() const { return static_cast<int>(members.size()); }
  int max_degree() const;
  int D() const;  // sum of degrees
  bool homogeneous() const;
  bool contains(const Vec& x) const;
};

struct RankResult {
  int rank = 0;
  bool exact = true;  // false: rank >= value
};

struct RankOptions {
  int search_bound = 3;
  uint64_t budget = 100000000ULL;
};

RankResult schmidt_rank(const Poly& P, const RankOptions& opt = {});
RankResult family_rank(const PolyFamily& fam, const RankOptions& opt = {});
int classical_quadratic_rank(const Poly& Q);

struct DegreeEstimate {
  int value = 0;
  std::vector<int> counts;  // per trial; -1 when the subspace lies inside X
};
DegreeEstimate variety_degree_estimate(const PolyFamily& fam, int ext_degree, int trials, uint64_t seed);

bool is_function_of(const Poly& P, const std::vector<Poly>& Qs, uint64_t budget = 1ULL << 26);

// Polynomial of degree <= 2 in packed form: sum_{i<=j} a_ij x_i x_j + sum b_i x_i + c.
class QuadraticFunction {
 public:
  QuadraticFunction() = default;
  QuadraticFunction(Field F, int n);
  static QuadraticFunction from_poly(const Poly& P);
  static QuadraticFunction linear_form(const Field& F, const Vec& b, Elem c = 0);
  Poly to_poly() const;

  const Field& field() const { return F_; }
  int n() const { return n_; }
  Elem& a(int i, int j) { return a_[pos(i, j)]; }
  Elem a(int i, int j) const { return a_[pos(i, j)]; }
  Vec& lin() { return b_; }
  const Vec& lin() const { return b_; }
  Elem& c() { return c_; }
  Elem c() const { return c_; }

  Elem eval(const Elem* x) const;
  Elem eval(const Vec& x) const { return eval(x.data()); }
  // Homogeneous quadratic part H only.
  Elem quad(const Elem* x) const;
  Elem quad(const Vec& x) const { return quad(x.data()); }
  // B(u,v) = H(u+v) - H(u) - H(v).
  Elem pair(const Vec& u, const Vec& v) const;
  // Coefficients of the functional u -> B(u, v).
  Vec pair_row(const Vec& v) const;

  bool homogeneous() const;
  bool is_zero() const;
  QuadraticFunction operator+(const QuadraticFunction& o) const;
  QuadraticFunction operator-(const QuadraticFunction& o) const;
  QuadraticFunction scaled(Elem s) const;
  bool operator==(const QuadraticFunction& o) const { return n_ == o.n_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_; }
  // Substitution x = A y + t, A of size n x m.
  QuadraticFunction compose_affine(const Mat& A, const Vec& t) const;

 private:
  size_t pos(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<size_t>(i) * n_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
  }
  Field F_;
  int n_ = 0;
  std::vector<Elem> a_;
  Vec b_;
  Elem c_ = 0;
};

}  // namespace hirank
