#include "hirank/linalg.hpp"

#include "hirank/errors.hpp"

namespace hirank {

Mat Mat::from_rows(const std::vector<Vec>& rows, int cols) {
  Mat m(static_cast<int>(rows.size()), cols);
  for (int r = 0; r < m.rows; ++r) {
    if (static_cast<int>(rows[r].size()) != cols) fail(ErrorCode::DimensionMismatch, "row length");
    for (int c = 0; c < cols; ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

std::vector<int> rref(const Field& F, Mat& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int sel = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != r)
      for (int k = 0; k < m.cols; ++k) std::swap(m.at(sel, k), m.at(r, k));
    Elem iv = F.inv(m.at(r, c));
    for (int k = c; k < m.cols; ++k) m.at(r, k) = F.mul(m.at(r, k), iv);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Elem f = m.at(i, c);
      for (int k = c; k < m.cols; ++k) m.at(i, k) = F.sub(m.at(i, k), F.mul(f, m.at(r, k)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int rank(const Field& F, Mat m) { return static_cast<int>(rref(F, m).size()); }

int rank(const Field& F, const std::vector<Vec>& rows, int cols) {
  if (rows.empty()) return 0;
  return rank(F, Mat::from_rows(rows, cols));
}

std::optional<AffineSolution> solve_affine(const Field& F, const Mat& A, const Vec& b) {
  int n = A.cols;
  Mat aug(A.rows, n + 1);
  for (int r = 0; r < A.rows; ++r) {
    for (int c = 0; c < n; ++c) aug.at(r, c) = A.at(r, c);
    aug.at(r, n) = b[r];
  }
  auto piv = rref(F, aug);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  AffineSolution sol;
  sol.particular.assign(n, 0);
  std::vector<int> is_pivot(n, -1);
  for (size_t i = 0; i < piv.size(); ++i) {
    is_pivot[piv[i]] = static_cast<int>(i);
    sol.particular[piv[i]] = aug.at(static_cast<int>(i), n);
  }
  for (int c = 0; c < n; ++c) {
    if (is_pivot[c] >= 0) continue;
    Vec k(n, 0);
    k[c] = 1;
    for (size_t i = 0; i < piv.size(); ++i) k[piv[i]] = F.neg(aug.at(static_cast<int>(i), c));
    sol.kernel.push_back(std::move(k));
  }
  return sol;
}

std::optional<Mat> inverse(const Field& F, const Mat& m) {
  int n = m.rows;
  Mat aug(n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) aug.at(r, c) = m.at(r, c);
    aug.at(r, n + r) = 1;
  }
  auto piv = rref(F, aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  Mat out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.at(r, c) = aug.at(r, n + c);
  return out;
}

Vec mat_vec(const Field& F, const Mat& m, const Vec& x) {
  Vec y(m.rows, 0);
  for (int r = 0; r < m.rows; ++r) {
    Elem s = 0;
    for (int c = 0; c < m.cols; ++c) s = F.add(s, F.mul(m.at(r, c), x[c]));
    y[r] = s;
  }
  return y;
}

Elem dot(const Field& F, const Vec& a, const Vec& b) {
  Elem s = 0;
  for (size_t i = 0; i < a.size(); ++i) s = F.add(s, F.mul(a[i], b[i]));
  return s;
}

Vec vadd(const Field& F, const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.add(a[i], b[i]);
  return r;
}

Vec vsub(const Field& F, const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.sub(a[i], b[i]);
  return r;
}

Vec vscale(const Field& F, Elem c, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.mul(c, a[i]);
  return r;
}

bool is_zero(const Vec& v) {
  for (Elem e : v)
    if (e) return false;
  return true;
}

Mat random_invertible(const Field& F, int n, Rng& rng) {
  for (;;) {
    Mat m(n, n);
    for (auto& e : m.a) e = static_cast<Elem>(rng.below(F.q()));
    if (rank(F, m) == n) return m;
  }
}

Vec random_vec(const Field& F, int n, Rng& rng) {
  Vec v(n);
  for (auto& e : v) e = static_cast<Elem>(rng.below(F.q()));
  return v;
}

}  // namespace hirank
