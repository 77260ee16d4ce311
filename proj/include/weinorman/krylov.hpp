#pragma once
// krylov.hpp: e^A v for sparse generators without forming e^A.
//
// Two regimes. Up to one_shot_cap the Arnoldi recursion is run to happy
// breakdown (or to full dimension), which captures the entire reachable
// subspace; the result is then exact up to roundoff, and the number of
// matrix-vector products depends only on that subspace, not on ||A||. Beyond
// the cap we fall back to fixed-dimension Krylov projection with adaptive
// sub-stepping and the classical corrected error estimate.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "weinorman/dense.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

struct ExpmOptions {
  double tol = 1e-10;       // total error budget, relative to ||v||_1
  int krylov_dim = 30;      // projection size in the sub-stepping regime
  int one_shot_cap = 256;   // largest dimension solved by full-length Arnoldi
  int max_substeps = 100000;
  double breakdown_tol = 1e-14;  // scaled by max(1, ||A||) before use
};

struct ExpmStats {
  long matvecs = 0;
  int substeps = 0;
  int max_krylov = 0;
};

namespace detail {

inline double norm2(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double round_two_digits(double x) {
  if (!(x > 0) || !std::isfinite(x)) return x;
  double s = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
  return std::floor(x / s + 0.55) * s;
}

// Orthogonalize p against the first j+1 columns, accumulating coefficients
// into column j of h. One reorthogonalization pass keeps the basis clean even
// when the spectrum is wide.
inline void mgs_step(const std::vector<std::vector<double>>& v, int j, std::vector<double>& p,
                     DenseMatrix& h) {
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i <= j; ++i) {
      double c = dot(v[i], p);
      if (pass == 0 || c != 0.0) {
        h(i, j) += c;
        for (std::size_t r = 0; r < p.size(); ++r) p[r] -= c * v[i][r];
      }
    }
}

// Full-length Arnoldi: exact once the recursion breaks down or spans the
// whole space. The matvec count equals the dimension of the subspace reached
// from v, independent of the magnitude of A.
inline std::vector<double> expm_action_one_shot(const SparseGenerator& a,
                                                const std::vector<double>& v, double btol,
                                                ExpmStats* stats) {
  const int n = a.dim();
  double beta = norm2(v);
  std::vector<std::vector<double>> basis;
  basis.reserve(n + 1);
  {
    std::vector<double> q = v;
    for (double& x : q) x /= beta;
    basis.push_back(std::move(q));
  }
  DenseMatrix h(n + 1, n);
  int m = n;
  for (int j = 0; j < n; ++j) {
    std::vector<double> p(n);
    a.apply(basis[j].data(), p.data());
    if (stats) ++stats->matvecs;
    mgs_step(basis, j, p, h);
    double next = norm2(p);
    h(j + 1, j) = next;
    if (next <= btol) {
      m = j + 1;
      break;
    }
    for (double& x : p) x /= next;
    basis.push_back(std::move(p));
  }
  if (stats) {
    stats->substeps += 1;
    stats->max_krylov = std::max(stats->max_krylov, m);
  }

  DenseMatrix hm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) hm(i, j) = h(i, j);
  DenseMatrix f = expm_dense(hm, std::max(DenseMatrix::kDefaultExpmCap, m));
  std::vector<double> out(n, 0.0);
  for (int j = 0; j < m; ++j) {
    double c = beta * f(j, 0);
    for (int r = 0; r < n; ++r) out[r] += c * basis[j][r];
  }
  return out;
}

}  // namespace detail

inline std::vector<double> expm_action(const SparseGenerator& a, const std::vector<double>& v,
                                       const ExpmOptions& opts = {},
                                       ExpmStats* stats = nullptr) {
  const int n = a.dim();
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument("expm_action: dimension mismatch");
  if (opts.tol <= 0) throw std::invalid_argument("expm_action: tolerance must be positive");
  if (n == 0) return {};

  double v1norm = 0;
  for (double x : v) v1norm += std::fabs(x);
  if (v1norm == 0.0) return std::vector<double>(n, 0.0);

  const double anorm = a.inf_norm();
  if (anorm == 0.0) return v;
  const double btol = opts.breakdown_tol * std::max(1.0, anorm);

  if (n <= opts.one_shot_cap) return detail::expm_action_one_shot(a, v, btol, stats);

  // Sub-stepping regime, fixed Krylov dimension m, corrected error estimate
  // from the two trailing entries of the augmented Hessenberg exponential.
  const int m = std::min(opts.krylov_dim, n - 1);
  const double t_out = 1.0;
  const double tol_t = opts.tol * v1norm;  // budget per unit time
  const double delta = 1.2, gamma = 0.9;

  std::vector<double> w = v;
  double beta = detail::norm2(w);
  double t_now = 0.0;

  double xm = 1.0 / m;
  double p1 = tol_t * std::pow((m + 1) / std::exp(1.0), m + 1) *
              std::sqrt(2.0 * 3.141592653589793 * (m + 1));
  double t_new = (1.0 / anorm) * std::pow(p1 / (4.0 * beta * anorm), xm);
  if (!(t_new > 0) || !std::isfinite(t_new)) t_new = 1e-6 / anorm;
  t_new = detail::round_two_digits(t_new);

  std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
  int steps = 0;
  while (t_now < t_out) {
    if (++steps > opts.max_substeps)
      throw std::runtime_error("expm_action: exceeded maximum number of sub-steps");
    double t_step = std::min(t_out - t_now, t_new);

    for (int r = 0; r < n; ++r) basis[0][r] = w[r] / beta;
    DenseMatrix h(m + 2, m + 2);
    int mbrkdwn = m;
    int k1 = 2;
    double avnorm = 0;
    for (int j = 0; j < m; ++j) {
      std::vector<double> p(n);
      a.apply(basis[j].data(), p.data());
      if (stats) ++stats->matvecs;
      detail::mgs_step(basis, j, p, h);
      double next = detail::norm2(p);
      h(j + 1, j) = next;
      if (next <= btol) {
        k1 = 0;
        mbrkdwn = j + 1;
        t_step = t_out - t_now;
        break;
      }
      for (double& x : p) x /= next;
      if (j + 1 <= m) basis[j + 1] = std::move(p);
    }
    if (k1 != 0) {
      h(m + 1, m) = 1.0;
      std::vector<double> p(n);
      a.apply(basis[m].data(), p.data());
      if (stats) ++stats->matvecs;
      avnorm = detail::norm2(p);
    }

    double err_loc = btol;
    DenseMatrix f;
    int rejections = 0;
    while (true) {
      int mx = mbrkdwn + k1;
      DenseMatrix hs(mx, mx);
      for (int i = 0; i < mx; ++i)
        for (int j = 0; j < mx; ++j) hs(i, j) = t_step * h(i, j);
      f = expm_dense(hs, std::max(DenseMatrix::kDefaultExpmCap, mx));
      if (k1 == 0) {
        err_loc = btol;
        break;
      }
      double phi1 = std::fabs(beta * f(m, 0));
      double phi2 = std::fabs(beta * f(m + 1, 0)) * avnorm;
      double xm_loc;
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm_loc = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = phi1 * phi2 / (phi1 - phi2);
        xm_loc = 1.0 / m;
      } else {
        err_loc = phi1;
        xm_loc = 1.0 / (m - 1);
      }
      if (err_loc <= delta * t_step * tol_t) {
        t_new = gamma * t_step * std::pow(t_step * tol_t / err_loc, xm_loc);
        t_new = detail::round_two_digits(t_new);
        break;
      }
      t_step = gamma * t_step * std::pow(t_step * tol_t / err_loc, xm_loc);
      t_step = detail::round_two_digits(t_step);
      if (++rejections > 60)
        throw std::runtime_error("expm_action: error estimate failed to converge");
    }

    int mx = mbrkdwn + std::max(0, k1 - 1);
    std::vector<double> next(n, 0.0);
    for (int j = 0; j < mx; ++j) {
      double c = beta * f(j, 0);
      for (int r = 0; r < n; ++r) next[r] += c * basis[j][r];
    }
    w = std::move(next);
    beta = detail::norm2(w);
    t_now += t_step;
    if (stats) {
      ++stats->substeps;
      stats->max_krylov = std::max(stats->max_krylov, mbrkdwn);
    }
  }
  return w;
}

inline std::vector<double> expm_action(const SparseGenerator& a, const std::vector<double>& v,
                                       double tol) {
  ExpmOptions opts;
  opts.tol = tol;
  return expm_action(a, v, opts);
}

}  // namespace weinorman
