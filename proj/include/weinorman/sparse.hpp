#pragma once
// sparse.hpp: immutable column-compressed sparse matrices used as Markov
// generators and Lie-algebra elements, plus the time-dependent combination
// Sum_i a_i(t) H_i that the ODE integrators evaluate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "weinorman/dense.hpp"

namespace weinorman {

struct Entry {
  int row, col;
  double value;
};

class SparseGenerator {
 public:
  SparseGenerator() = default;

  static SparseGenerator from_entries(int dim, std::vector<Entry> entries) {
    if (dim < 0) throw std::invalid_argument("SparseGenerator: negative dimension");
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return x.col != y.col ? x.col < y.col : x.row < y.row;
    });
    SparseGenerator m;
    m.dim_ = dim;
    m.col_ptr_.assign(dim + 1, 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
        throw std::invalid_argument("SparseGenerator: entry out of range");
      if (i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col)
        throw std::invalid_argument("SparseGenerator: duplicate entry");
      if (e.value == 0.0) continue;
      m.row_.push_back(e.row);
      m.val_.push_back(e.value);
      ++m.col_ptr_[e.col + 1];
      m.bandwidth_ = std::max(m.bandwidth_, std::abs(e.row - e.col));
    }
    for (int c = 0; c < dim; ++c) m.col_ptr_[c + 1] += m.col_ptr_[c];
    return m;
  }

  static SparseGenerator zero(int dim) { return from_entries(dim, {}); }

  static SparseGenerator identity(int dim) {
    std::vector<Entry> e;
    e.reserve(dim);
    for (int i = 0; i < dim; ++i) e.push_back({i, i, 1.0});
    return from_entries(dim, std::move(e));
  }

  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(val_.size()); }
  int bandwidth() const { return bandwidth_; }

  template <class F>
  void for_entries(F&& f) const {
    for (int c = 0; c < dim_; ++c)
      for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) f(row_[k], c, val_[k]);
  }

  template <class F>
  void for_column(int c, F&& f) const {
    for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) f(row_[k], val_[k]);
  }

  double at(int r, int c) const {
    for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k)
      if (row_[k] == r) return val_[k];
    return 0.0;
  }

  void apply(const double* x, double* y) const {
    std::fill(y, y + dim_, 0.0);
    apply_add(1.0, x, y);
  }

  // y += coef * A x
  void apply_add(double coef, const double* x, double* y) const {
    for (int c = 0; c < dim_; ++c) {
      double xc = coef * x[c];
      if (xc == 0.0) continue;
      for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) y[row_[k]] += val_[k] * xc;
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("apply: size mismatch");
    std::vector<double> y(dim_, 0.0);
    apply(x.data(), y.data());
    return y;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(dim_, dim_);
    for_entries([&m](int r, int c, double v) { m(r, c) = v; });
    return m;
  }

  double one_norm() const {
    double best = 0;
    for (int c = 0; c < dim_; ++c) {
      double s = 0;
      for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) s += std::fabs(val_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  double inf_norm() const {
    std::vector<double> rs(dim_, 0.0);
    for_entries([&rs](int r, int, double v) { rs[r] += std::fabs(v); });
    double best = 0;
    for (double v : rs) best = std::max(best, v);
    return best;
  }

  double max_abs() const {
    double best = 0;
    for (double v : val_) best = std::max(best, std::fabs(v));
    return best;
  }

  bool integer_valued() const {
    for (double v : val_)
      if (v != std::nearbyint(v) || std::fabs(v) > 9.0e15) return false;
    return true;
  }

  // Markov generator: off-diagonal entries nonnegative, column sums zero.
  bool is_markov_generator(double tol = 1e-12) const {
    for (int c = 0; c < dim_; ++c) {
      double sum = 0;
      for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) {
        if (row_[k] != c && val_[k] < -tol) return false;
        sum += val_[k];
      }
      if (std::fabs(sum) > tol) return false;
    }
    return true;
  }

  // Top-left block, reindexed as its own dim x dim matrix.
  SparseGenerator restrict_interior(int interior_dim) const {
    if (interior_dim < 0 || interior_dim > dim_)
      throw std::invalid_argument("restrict_interior: bad dimension");
    std::vector<Entry> e;
    for_entries([&](int r, int c, double v) {
      if (r < interior_dim && c < interior_dim) e.push_back({r, c, v});
    });
    return from_entries(interior_dim, std::move(e));
  }

  SparseGenerator scaled(double s) const {
    SparseGenerator m = *this;
    for (double& v : m.val_) v *= s;
    if (s == 0.0) m = zero(dim_);
    return m;
  }

 private:
  int dim_ = 0;
  int bandwidth_ = 0;
  std::vector<int> col_ptr_{0};
  std::vector<int> row_;
  std::vector<double> val_;
};

inline SparseGenerator linear_combination(
    const std::vector<std::pair<double, const SparseGenerator*>>& terms) {
  if (terms.empty()) throw std::invalid_argument("linear_combination: no terms");
  int dim = terms.front().second->dim();
  DenseMatrix acc(dim, dim);
  for (auto [coef, m] : terms) {
    if (m->dim() != dim) throw std::invalid_argument("linear_combination: dimension mismatch");
    m->for_entries([&acc, coef = coef](int r, int c, double v) { acc(r, c) += coef * v; });
  }
  std::vector<Entry> e;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (acc(r, c) != 0.0) e.push_back({r, c, acc(r, c)});
  return SparseGenerator::from_entries(dim, std::move(e));
}

inline SparseGenerator matmul(const SparseGenerator& x, const SparseGenerator& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("matmul: dimension mismatch");
  const int n = x.dim();
  std::vector<Entry> out;
  std::vector<double> work(n, 0.0);
  std::vector<int> touched;
  for (int c = 0; c < n; ++c) {
    touched.clear();
    y.for_column(c, [&](int k, double yv) {
      x.for_column(k, [&](int r, double xv) {
        if (work[r] == 0.0) touched.push_back(r);
        work[r] += xv * yv;
      });
    });
    for (int r : touched) {
      if (work[r] != 0.0) out.push_back({r, c, work[r]});
      work[r] = 0.0;
    }
  }
  return SparseGenerator::from_entries(n, std::move(out));
}

inline double max_abs_diff(const SparseGenerator& x, const SparseGenerator& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  DenseMatrix acc(x.dim(), x.dim());
  x.for_entries([&acc](int r, int c, double v) { acc(r, c) += v; });
  y.for_entries([&acc](int r, int c, double v) { acc(r, c) -= v; });
  return max_abs(acc);
}

// Sum_i a_i(t) H_i with a fixed sparsity pattern per part; the ODE right-hand
// side evaluates coefficients once per call and never reassembles matrices.
struct TimeDependentGenerator {
  int dim = 0;
  std::vector<std::pair<std::function<double(double)>, SparseGenerator>> parts;

  void apply(double t, const double* x, double* y) const {
    std::fill(y, y + dim, 0.0);
    for (const auto& [coef, h] : parts) {
      double c = coef(t);
      if (c != 0.0) h.apply_add(c, x, y);
    }
  }

  std::vector<double> apply(double t, const std::vector<double>& x) const {
    std::vector<double> y(dim, 0.0);
    apply(t, x.data(), y.data());
    return y;
  }

  SparseGenerator assemble(double t) const {
    std::vector<std::pair<double, const SparseGenerator*>> terms;
    for (const auto& [coef, h] : parts) terms.emplace_back(coef(t), &h);
    return linear_combination(terms);
  }
};

}  // namespace weinorman
