#pragma once
// dense.hpp: small row-major dense matrices, pivoted LU solves, and the
// scaling-and-squaring Pade matrix exponential.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace weinorman {

struct DenseMatrix {
  static constexpr int kDefaultExpmCap = 512;

  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) throw std::invalid_argument("DenseMatrix: negative shape");
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  DenseMatrix& operator*=(double s) {
    for (double& v : a) v *= s;
    return *this;
  }
};

inline DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = &x.a[static_cast<std::size_t>(i) * x.cols];
    double* zi = &z.a[static_cast<std::size_t>(i) * z.cols];
    for (int k = 0; k < x.cols; ++k) {
      double v = xi[k];
      if (v == 0.0) continue;
      const double* yk = &y.a[static_cast<std::size_t>(k) * y.cols];
      for (int j = 0; j < y.cols; ++j) zi[j] += v * yk[j];
    }
  }
  return z;
}

inline std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x) {
  if (m.cols != static_cast<int>(x.size())) throw std::invalid_argument("matvec: shape mismatch");
  std::vector<double> y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0;
    for (int j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

inline double inf_norm(const DenseMatrix& m) {
  double best = 0;
  for (int i = 0; i < m.rows; ++i) {
    double s = 0;
    for (int j = 0; j < m.cols; ++j) s += std::fabs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

inline double max_abs(const DenseMatrix& m) {
  double best = 0;
  for (double v : m.a) best = std::max(best, std::fabs(v));
  return best;
}

// B := A^{-1} B via LU with partial pivoting; A is consumed.
inline void lu_solve(DenseMatrix A, DenseMatrix& B) {
  if (A.rows != A.cols || A.rows != B.rows) throw std::invalid_argument("lu_solve: shape mismatch");
  const int n = A.rows;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
    if (A(piv, k) == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(A(k, j), A(piv, j));
      for (int j = 0; j < B.cols; ++j) std::swap(B(k, j), B(piv, j));
    }
    for (int i = k + 1; i < n; ++i) {
      double f = A(i, k) / A(k, k);
      if (f == 0.0) continue;
      A(i, k) = f;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      for (int j = 0; j < B.cols; ++j) B(i, j) -= f * B(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k)
    for (int j = 0; j < B.cols; ++j) {
      double s = B(k, j);
      for (int i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
      B(k, j) = s / A(k, k);
    }
}

// Matrix exponential by diagonal Pade of degree 6 on the 2^-s scaled matrix,
// then s repeated squarings. Scaling targets ||A|| 2^-s <= 1/2, where the
// degree-6 approximant is accurate to machine precision.
inline DenseMatrix expm_dense(const DenseMatrix& A, int dense_cap = DenseMatrix::kDefaultExpmCap) {
  if (A.rows != A.cols) throw std::invalid_argument("expm_dense: matrix must be square");
  const int n = A.rows;
  if (n > dense_cap) throw std::invalid_argument("expm_dense: dimension exceeds dense cap");
  if (n == 0) return {};
  double norm = inf_norm(A);
  if (!std::isfinite(norm)) throw std::invalid_argument("expm_dense: non-finite entries");
  if (norm == 0.0) return DenseMatrix::identity(n);

  int s = std::max(0, static_cast<int>(std::floor(std::log2(norm))) + 2);
  DenseMatrix As = A;
  As *= std::ldexp(1.0, -s);

  constexpr int q = 6;
  double c[q + 1];
  c[0] = 1.0;
  for (int k = 1; k <= q; ++k) c[k] = c[k - 1] * (q + 1 - k) / (k * (2.0 * q + 1 - k));

  DenseMatrix A2 = matmul(As, As);
  DenseMatrix A4 = matmul(A2, A2);
  DenseMatrix A6 = matmul(A2, A4);

  DenseMatrix V = DenseMatrix::identity(n);  // even part c0 + c2 A2 + c4 A4 + c6 A6
  V *= c[0];
  for (std::size_t i = 0; i < V.a.size(); ++i)
    V.a[i] += c[2] * A2.a[i] + c[4] * A4.a[i] + c[6] * A6.a[i];

  DenseMatrix W = DenseMatrix::identity(n);  // c1 + c3 A2 + c5 A4, odd part is As * W
  W *= c[1];
  for (std::size_t i = 0; i < W.a.size(); ++i) W.a[i] += c[3] * A2.a[i] + c[5] * A4.a[i];
  DenseMatrix U = matmul(As, W);

  DenseMatrix P = V;  // numerator V + U
  P += U;
  DenseMatrix Q = V;  // denominator V - U
  U *= -1.0;
  Q += U;

  lu_solve(std::move(Q), P);
  for (int k = 0; k < s; ++k) P = matmul(P, P);
  return P;
}

}  // namespace weinorman
