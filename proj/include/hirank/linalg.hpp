#pragma once

#include <optional>
#include <vector>

#include "hirank/field.hpp"
#include "hirank/rng.hpp"

namespace hirank {

using Vec = std::vector<Elem>;

struct Mat {
  int rows = 0, cols = 0;
  std::vector<Elem> a;
  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
  Elem& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  Elem at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  static Mat from_rows(const std::vector<Vec>& rows, int cols);
};

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(const Field& F, Mat& m);
int rank(const Field& F, Mat m);
int rank(const Field& F, const std::vector<Vec>& rows, int cols);

struct AffineSolution {
  Vec particular;
  std::vector<Vec> kernel;
};

// Solutions of A x = b, or nullopt if inconsistent.
std::optional<AffineSolution> solve_affine(const Field& F, const Mat& A, const Vec& b);

std::optional<Mat> inverse(const Field& F, const Mat& m);
Vec mat_vec(const Field& F, const Mat& m, const Vec& x);
Elem dot(const Field& F, const Vec& a, const Vec& b);
Vec vadd(const Field& F, const Vec& a, const Vec& b);
Vec vsub(const Field& F, const Vec& a, const Vec& b);
Vec vscale(const Field& F, Elem c, const Vec& a);
bool is_zero(const Vec& v);

Mat random_invertible(const Field& F, int n, Rng& rng);
Vec random_vec(const Field& F, int n, Rng& rng);

}  // namespace hirank
