#pragma once
// lie.hpp: commutator arithmetic over sparse matrices, the adjoint series
// e^{x ad X}Y, and extraction of structure constants for a candidate basis.
//
// Truncated versions of infinite operators satisfy their bracket relations
// only away from the trailing rows and columns, so every check here restricts
// to a leading interior block of configurable size. Integer-valued bases are
// decomposed in exact rational arithmetic (tol = 0); anything else falls back
// to least squares with a floating tolerance.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weinorman/dense.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

class NotClosedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotIndependentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline SparseGenerator commutator(const SparseGenerator& x, const SparseGenerator& y) {
  SparseGenerator xy = matmul(x, y);
  SparseGenerator yx = matmul(y, x);
  return linear_combination({{1.0, &xy}, {-1.0, &yx}});
}

inline SparseGenerator ad_power(const SparseGenerator& x, SparseGenerator y, int k) {
  if (k < 0) throw std::invalid_argument("ad_power: negative order");
  for (int i = 0; i < k; ++i) y = commutator(x, y);
  return y;
}

// e^{scale * ad X} Y = sum_k (scale^k / k!) (ad X)^k Y. The series is summed
// until a term vanishes identically (nilpotent or annihilated case, exact
// stop) or two consecutive terms fall below tol in max-abs norm; alternating
// patterns can make a single small term misleading.
inline SparseGenerator exp_ad(const SparseGenerator& x, double scale, const SparseGenerator& y,
                              double tol, int max_terms = 200) {
  if (tol <= 0) throw std::invalid_argument("exp_ad: tolerance must be positive");
  if (x.dim() != y.dim()) throw std::invalid_argument("exp_ad: dimension mismatch");
  SparseGenerator acc = y;
  SparseGenerator term = y;
  int consecutive_small = 0;
  for (int k = 1; k <= max_terms; ++k) {
    term = commutator(x, term).scaled(scale / k);
    if (term.nnz() == 0) return acc;
    acc = linear_combination({{1.0, &acc}, {1.0, &term}});
    if (term.max_abs() < tol) {
      if (++consecutive_small >= 2) return acc;
    } else {
      consecutive_small = 0;
    }
  }
  throw std::runtime_error("exp_ad: series did not converge within " +
                           std::to_string(max_terms) + " terms");
}

namespace detail {

// Rational numbers on int64 with __int128 intermediates. Inputs here are
// small-integer matrix entries, so overflow signals a genuinely pathological
// basis and is reported rather than absorbed.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

inline __int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline Rat make_rat(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational division by zero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  constexpr __int128 lo = std::numeric_limits<std::int64_t>::min();
  constexpr __int128 hi = std::numeric_limits<std::int64_t>::max();
  if (n < lo || n > hi || d > hi)
    throw std::overflow_error("structure constants: rational overflow");
  return {static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

inline Rat rat_add(Rat a, Rat b) {
  return make_rat(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                  static_cast<__int128>(a.den) * b.den);
}
inline Rat rat_sub(Rat a, Rat b) {
  return make_rat(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                  static_cast<__int128>(a.den) * b.den);
}
inline Rat rat_mul(Rat a, Rat b) {
  return make_rat(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}
inline Rat rat_div(Rat a, Rat b) {
  return make_rat(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}
inline bool rat_zero(Rat a) { return a.num == 0; }
inline bool rat_eq(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
inline double rat_double(Rat a) { return static_cast<double>(a.num) / static_cast<double>(a.den); }

inline Rat rat_from_integer_double(double v) {
  if (v != std::nearbyint(v) || std::fabs(v) > 9.0e15)
    throw std::invalid_argument("exact structure constants require integer matrix entries");
  return {static_cast<std::int64_t>(v), 1};
}

}  // namespace detail

// A verified basis: labeled elements, the interior block on which all bracket
// identities are exact, and the table xi with
//   [H_i, H_j] | interior = sum_k xi(i,j,k) H_k | interior.
struct LieBasis {
  std::vector<std::string> labels;
  std::vector<SparseGenerator> elements;
  int interior_dim = 0;

  int size() const { return static_cast<int>(elements.size()); }

  const std::vector<std::pair<int, double>>& bracket(int i, int j) const {
    return xi_[static_cast<std::size_t>(i) * elements.size() + j];
  }

  SparseGenerator reconstruct_bracket(int i, int j) const {
    std::vector<std::pair<double, const SparseGenerator*>> terms;
    for (auto [k, c] : bracket(i, j)) terms.emplace_back(c, &elements[k]);
    if (terms.empty()) return SparseGenerator::zero(elements[0].dim());
    return linear_combination(terms);
  }

  friend LieBasis structure_constants(std::vector<std::string> labels,
                                      std::vector<SparseGenerator> elements, int interior_dim,
                                      double tol);

 private:
  std::vector<std::vector<std::pair<int, double>>> xi_;
};

namespace detail {

struct VectorizedBasis {
  // Each interior block flattened over the union of nonzero positions.
  std::map<std::pair<int, int>, int> position_index;
  std::vector<std::vector<std::pair<int, double>>> columns;  // per element: (position, value)
};

inline VectorizedBasis vectorize_interiors(const std::vector<SparseGenerator>& interiors) {
  VectorizedBasis v;
  for (const auto& e : interiors)
    e.for_entries([&v](int r, int c, double) {
      v.position_index.emplace(std::make_pair(r, c), 0);
    });
  int next = 0;
  for (auto& [pos, idx] : v.position_index) idx = next++;
  v.columns.resize(interiors.size());
  for (std::size_t k = 0; k < interiors.size(); ++k)
    interiors[k].for_entries([&](int r, int c, double val) {
      v.columns[k].emplace_back(v.position_index.at({r, c}), val);
    });
  return v;
}

// Exact path: select an invertible row subset of the vectorized basis by
// rational elimination, invert it, and solve each bracket against it. Any
// inconsistent position, or a bracket entry outside the basis support, means
// the span is not closed under the commutator.
class ExactDecomposer {
 public:
  ExactDecomposer(const VectorizedBasis& v, int m) : v_(v), m_(m) {
    int positions = static_cast<int>(v.position_index.size());
    std::vector<std::vector<Rat>> g(positions, std::vector<Rat>(m));
    for (int k = 0; k < m; ++k)
      for (auto [p, val] : v.columns[k]) g[p][k] = rat_from_integer_double(val);

    // Forward elimination to pick m independent rows.
    std::vector<std::vector<Rat>> work = g;
    std::vector<int> row_of(positions);
    for (int p = 0; p < positions; ++p) row_of[p] = p;
    pivot_rows_.reserve(m);
    for (int col = 0; col < m; ++col) {
      int pivot = -1;
      for (int r = col; r < positions; ++r)
        if (!rat_zero(work[r][col])) {
          pivot = r;
          break;
        }
      if (pivot < 0) throw NotIndependentError("basis is linearly dependent on the interior block");
      std::swap(work[col], work[pivot]);
      std::swap(row_of[col], row_of[pivot]);
      pivot_rows_.push_back(row_of[col]);
      for (int r = col + 1; r < positions; ++r) {
        if (rat_zero(work[r][col])) continue;
        Rat f = rat_div(work[r][col], work[col][col]);
        for (int c = col; c < m; ++c) work[r][c] = rat_sub(work[r][c], rat_mul(f, work[col][c]));
      }
    }

    // Invert the pivot-row submatrix by Gauss-Jordan.
    std::vector<std::vector<Rat>> aug(m, std::vector<Rat>(2 * m));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) aug[r][c] = g[pivot_rows_[r]][c];
      aug[r][m + r] = Rat{1, 1};
    }
    for (int col = 0; col < m; ++col) {
      int pivot = -1;
      for (int r = col; r < m; ++r)
        if (!rat_zero(aug[r][col])) {
          pivot = r;
          break;
        }
      if (pivot < 0) throw NotIndependentError("basis is linearly dependent on the interior block");
      std::swap(aug[col], aug[pivot]);
      Rat d = aug[col][col];
      for (int c = 0; c < 2 * m; ++c) aug[col][c] = rat_div(aug[col][c], d);
      for (int r = 0; r < m; ++r) {
        if (r == col || rat_zero(aug[r][col])) continue;
        Rat f = aug[r][col];
        for (int c = 0; c < 2 * m; ++c) aug[r][c] = rat_sub(aug[r][c], rat_mul(f, aug[col][c]));
      }
    }
    inv_.assign(m, std::vector<Rat>(m));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) inv_[r][c] = aug[r][m + c];
  }

  // Returns (k, coefficient) pairs, or throws NotClosedError.
  std::vector<std::pair<int, double>> decompose(const SparseGenerator& bracket_interior,
                                                const std::string& pair_name) const {
    std::map<int, Rat> rhs;
    bool outside = false;
    bracket_interior.for_entries([&](int r, int c, double val) {
      auto it = v_.position_index.find({r, c});
      if (it == v_.position_index.end()) {
        outside = true;
        return;
      }
      rhs[it->second] = rat_from_integer_double(val);
    });
    if (outside)
      throw NotClosedError("bracket " + pair_name + " has support outside the basis span");

    std::vector<Rat> coeff(m_);
    for (int k = 0; k < m_; ++k) {
      Rat s{0, 1};
      for (int r = 0; r < m_; ++r) {
        auto it = rhs.find(pivot_rows_[r]);
        if (it != rhs.end() && !rat_zero(inv_[k][r]))
          s = rat_add(s, rat_mul(inv_[k][r], it->second));
      }
      coeff[k] = s;
    }

    // Consistency on every position: sum_k coeff_k column_k must equal rhs.
    std::map<int, Rat> residual = rhs;
    for (int k = 0; k < m_; ++k) {
      if (rat_zero(coeff[k])) continue;
      for (auto [p, val] : v_.columns[k]) {
        Rat& slot = residual[p];
        slot = rat_sub(slot, rat_mul(coeff[k], rat_from_integer_double(val)));
      }
    }
    for (const auto& [p, r] : residual)
      if (!rat_zero(r))
        throw NotClosedError("bracket " + pair_name + " is not in the span of the basis");

    std::vector<std::pair<int, double>> out;
    for (int k = 0; k < m_; ++k)
      if (!rat_zero(coeff[k])) out.emplace_back(k, rat_double(coeff[k]));
    return out;
  }

 private:
  const VectorizedBasis& v_;
  int m_;
  std::vector<int> pivot_rows_;
  std::vector<std::vector<Rat>> inv_;
};

// Floating path: least squares through the normal equations, residual
// measured in max-abs over all positions plus any support outside the basis.
class LeastSquaresDecomposer {
 public:
  LeastSquaresDecomposer(const VectorizedBasis& v, int m, double tol) : v_(v), m_(m), tol_(tol) {
    gram_ = DenseMatrix(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double s = dot_columns(v.columns[i], v.columns[j]);
        gram_(i, j) = s;
        gram_(j, i) = s;
      }
    // Rank check: a dependent basis makes the Gram matrix singular.
    DenseMatrix probe = DenseMatrix::identity(m);
    try {
      lu_solve(gram_, probe);
    } catch (const std::runtime_error&) {
      throw NotIndependentError("basis is numerically dependent on the interior block");
    }
  }

  std::vector<std::pair<int, double>> decompose(const SparseGenerator& bracket_interior,
                                                const std::string& pair_name) const {
    std::vector<double> dense_rhs(v_.position_index.size(), 0.0);
    double outside_mass = 0;
    bracket_interior.for_entries([&](int r, int c, double val) {
      auto it = v_.position_index.find({r, c});
      if (it == v_.position_index.end())
        outside_mass = std::max(outside_mass, std::fabs(val));
      else
        dense_rhs[it->second] = val;
    });

    DenseMatrix rhs(m_, 1);
    for (int k = 0; k < m_; ++k) {
      double s = 0;
      for (auto [p, val] : v_.columns[k]) s += val * dense_rhs[p];
      rhs(k, 0) = s;
    }
    lu_solve(gram_, rhs);

    double residual = outside_mass;
    std::vector<double> recon(dense_rhs.size(), 0.0);
    for (int k = 0; k < m_; ++k)
      for (auto [p, val] : v_.columns[k]) recon[p] += rhs(k, 0) * val;
    for (std::size_t p = 0; p < recon.size(); ++p)
      residual = std::max(residual, std::fabs(recon[p] - dense_rhs[p]));
    if (residual > tol_)
      throw NotClosedError("bracket " + pair_name + " leaves residual " +
                           std::to_string(residual) + " outside the span");

    std::vector<std::pair<int, double>> out;
    for (int k = 0; k < m_; ++k)
      if (rhs(k, 0) != 0.0) out.emplace_back(k, rhs(k, 0));
    return out;
  }

 private:
  static double dot_columns(const std::vector<std::pair<int, double>>& a,
                            const std::vector<std::pair<int, double>>& b) {
    double s = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].first < b[j].first)
        ++i;
      else if (a[i].first > b[j].first)
        ++j;
      else
        s += a[i++].second * b[j++].second;
    }
    return s;
  }

  const VectorizedBasis& v_;
  int m_;
  double tol_;
  DenseMatrix gram_;
};

}  // namespace detail

inline LieBasis structure_constants(std::vector<std::string> labels,
                                    std::vector<SparseGenerator> elements, int interior_dim,
                                    double tol) {
  if (elements.empty()) throw std::invalid_argument("structure_constants: empty basis");
  if (labels.size() != elements.size())
    throw std::invalid_argument("structure_constants: label count mismatch");
  const int m = static_cast<int>(elements.size());
  const int dim = elements[0].dim();
  for (const auto& e : elements)
    if (e.dim() != dim) throw std::invalid_argument("structure_constants: dimension mismatch");
  if (interior_dim <= 0 || interior_dim > dim)
    throw std::invalid_argument("structure_constants: interior block out of range");
  if (tol < 0) throw std::invalid_argument("structure_constants: negative tolerance");

  std::vector<SparseGenerator> interiors;
  interiors.reserve(elements.size());
  for (const auto& e : elements) interiors.push_back(e.restrict_interior(interior_dim));
  detail::VectorizedBasis v = detail::vectorize_interiors(interiors);

  const bool exact = (tol == 0.0);
  std::optional<detail::ExactDecomposer> exact_dec;
  std::optional<detail::LeastSquaresDecomposer> ls_dec;
  if (exact)
    exact_dec.emplace(v, m);
  else
    ls_dec.emplace(v, m, tol);

  LieBasis basis;
  basis.labels = std::move(labels);
  basis.elements = std::move(elements);
  basis.interior_dim = interior_dim;
  basis.xi_.assign(static_cast<std::size_t>(m) * m, {});

  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      SparseGenerator br =
          commutator(basis.elements[i], basis.elements[j]).restrict_interior(interior_dim);
      std::string name = "[" + basis.labels[i] + "," + basis.labels[j] + "]";
      auto coeffs = exact ? exact_dec->decompose(br, name) : ls_dec->decompose(br, name);
      auto& fwd = basis.xi_[static_cast<std::size_t>(i) * m + j];
      auto& rev = basis.xi_[static_cast<std::size_t>(j) * m + i];
      fwd = coeffs;
      rev.clear();
      for (auto [k, c] : coeffs) rev.emplace_back(k, -c);
    }
  return basis;
}

// Shared shape for identity-check suites: every failed identity is reported
// by name so a verification run can say exactly what broke first.
struct VerifyReport {
  std::vector<std::string> failures;
  int checks = 0;
  bool passed() const { return failures.empty(); }
};

struct JacobiReport {
  double max_residual = 0;
  int triples_checked = 0;
  bool passed = true;
};

// [u,[v,w]] + [v,[w,u]] + [w,[u,v]] over all unordered basis triples, with the
// residual measured on the interior block.
inline JacobiReport verify_jacobi(const std::vector<SparseGenerator>& elements, int interior_dim,
                                  double tol = 0.0) {
  JacobiReport report;
  const int m = static_cast<int>(elements.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        const SparseGenerator& u = elements[i];
        const SparseGenerator& v = elements[j];
        const SparseGenerator& w = elements[k];
        SparseGenerator t1 = commutator(u, commutator(v, w));
        SparseGenerator t2 = commutator(v, commutator(w, u));
        SparseGenerator t3 = commutator(w, commutator(u, v));
        SparseGenerator sum = linear_combination({{1.0, &t1}, {1.0, &t2}, {1.0, &t3}});
        double residual = sum.restrict_interior(interior_dim).max_abs();
        report.max_residual = std::max(report.max_residual, residual);
        ++report.triples_checked;
      }
  report.passed = report.max_residual <= tol;
  return report;
}

inline JacobiReport verify_jacobi(const LieBasis& basis, double tol = 0.0) {
  return verify_jacobi(basis.elements, basis.interior_dim, tol);
}

}  // namespace weinorman
