#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hirank {

// Field element, stored as the base-p integer of its coefficient vector
// (a0 + a1 p + ... + a_{l-1} p^{l-1}). Prime-field elements are residues.
using Elem = uint32_t;

struct CharacterValue {
  int residue = 0;
  std::complex<double> z{1.0, 0.0};
};

class Field {
 public:
  Field() = default;

  // Lexicographically smallest monic irreducible modulus. p <= 101, l <= 3.
  static Field make(int p, int l = 1);
  // "p" or "p^l".
  static Field parse_spec(const std::string& spec);

  int p() const { return t_->p; }
  int l() const { return t_->l; }
  uint32_t q() const { return t_->q; }
  bool prime() const { return t_->l == 1; }
  bool odd() const { return t_->p != 2; }
  // Coefficients c_0..c_l of the modulus, c_l = 1. Empty for prime fields.
  const std::vector<int>& modulus() const { return t_->modulus; }
  std::string spec() const;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }

  Elem add(Elem a, Elem b) const {
    if (t_->l == 1) {
      uint32_t s = a + b;
      return s >= static_cast<uint32_t>(t_->p) ? s - t_->p : s;
    }
    if (!t_->add_table.empty()) return t_->add_table[a * t_->q + b];
    return add_digits(a, b);
  }
  Elem neg(Elem a) const {
    if (t_->l == 1) return a == 0 ? 0 : t_->p - a;
    return t_->neg_table[a];
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (t_->l == 1) return static_cast<Elem>((static_cast<uint64_t>(a) * b) % t_->p);
    if (a == 0 || b == 0) return 0;
    uint32_t s = t_->log[a] + t_->log[b];
    if (s >= t_->q - 1) s -= t_->q - 1;
    return t_->exp[s];
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, uint64_t e) const;

  // Embedding of an integer into the prime subfield.
  Elem from_int(int64_t v) const {
    int64_t r = v % t_->p;
    return static_cast<Elem>(r < 0 ? r + t_->p : r);
  }
  Elem half() const;

  std::vector<int> coeffs(Elem a) const;
  Elem from_coeffs(const std::vector<int>& c) const;

  // Absolute trace into F_p, as a residue in [0, p).
  int trace(Elem a) const { return t_->trace[a]; }
  CharacterValue char_eq(Elem a) const;

  bool is_square(Elem a) const { return a == 0 || t_->sqrt[a] != kNoRoot; }
  // Smallest square root in index order, or -1.
  int64_t sqrt(Elem a) const { return t_->sqrt[a] == kNoRoot ? -1 : static_cast<int64_t>(t_->sqrt[a]); }

  std::string format(Elem a) const;
  Elem parse(const std::string& text) const;

  bool operator==(const Field& o) const { return t_ == o.t_ || (t_ && o.t_ && t_->p == o.t_->p && t_->l == o.t_->l); }
  bool operator!=(const Field& o) const { return !(*this == o); }
  bool valid() const { return static_cast<bool>(t_); }

 private:
  static constexpr uint32_t kNoRoot = 0xFFFFFFFFu;
  struct Tables {
    int p = 0, l = 0;
    uint32_t q = 0;
    std::vector<int> modulus;
    std::vector<uint32_t> log, exp;
    std::vector<Elem> add_table, neg_table, inv;
    std::vector<uint8_t> trace;
    std::vector<uint32_t> sqrt;
  };
  Elem add_digits(Elem a, Elem b) const;
  static std::shared_ptr<const Tables> build(int p, int l);
  std::shared_ptr<const Tables> t_;
};

bool is_prime(int64_t n);

}  // namespace hirank
