#pragma once
// pure_birth.hpp: population growing by immigration at rate a(t) and by
// per-capita births at rate b(t), truncated at m with an absorbing overflow
// state. The generator is
//   H(t) = a(t) P_1 + b(t) Q,
// where P_i = R^i - R^{i-1} for the clamped shift R and Q = (R - 1) diag(k).
// On the truncated space the brackets close exactly:
//   [P_i, P_j] = 0,   [P_i, Q] = (i-1) P_i - i P_{i+1},   P_{m+2} = 0,
// so the propagator is an exact ordered product
//   U(t) = e^{f_1 P_1} ... e^{f_{m+1} P_{m+1}} e^{g Q}
// with g = int_0^t b and f_i = int_0^t a(u) (1 - e^{B(u)-B(t)})^{i-1} du.
// Because the P_i commute, the solve collapses the P chain into a single
// exponential action of sum_i f_i P_i.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weinorman/factorization.hpp"
#include "weinorman/krylov.hpp"
#include "weinorman/lie.hpp"
#include "weinorman/probability.hpp"
#include "weinorman/quadrature.hpp"
#include "weinorman/rates.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

class PureBirthModel {
 public:
  static PureBirthModel build(RateFunction a, RateFunction b, int m, QuadTol tol = {}) {
    if (m < 2) throw std::invalid_argument("pure-birth: truncation m must be at least 2");
    return PureBirthModel(std::move(a), std::move(b), m, tol);
  }

  int dim() const { return m_ + 2; }
  int truncation() const { return m_; }
  int overflow_index() const { return m_ + 1; }
  const RateFunction& immigration_rate() const { return a_; }
  const RateFunction& birth_rate() const { return b_; }

  const SparseGenerator& op_q() const { return q_; }
  // P_i for i = 1 .. m+1; P_{m+1} reaches only the overflow corner.
  const SparseGenerator& op_p(int i) const {
    if (i < 1 || i > m_ + 1) throw std::out_of_range("op_p: index outside 1..m+1");
    return p_[i - 1];
  }

  TimeDependentGenerator generator() const {
    TimeDependentGenerator g;
    g.dim = dim();
    RateFunction a = a_, b = b_;
    g.parts.emplace_back([a](double t) { return a(t); }, p_[0]);
    g.parts.emplace_back([b](double t) { return b(t); }, q_);
    return g;
  }

  double coefficient_g(double t) const { return (*B_)(t); }

  // f_1 = int_0^t a; for i >= 2 the weight (1 - e^{B(u)-B(t)})^{i-1} vanishes
  // at u = t, so the integrand is bounded by a(u) everywhere.
  double coefficient_f(int i, double t) const {
    if (i < 1 || i > m_ + 1) throw std::out_of_range("coefficient_f: index outside 1..m+1");
    if (i == 1) return (*A_)(t);
    double bt = (*B_)(t);
    auto bcum = B_;
    return weighted_integral(
        a_,
        [bcum, bt, i](double u, double) {
          double w = -std::expm1((*bcum)(u)-bt);
          return std::pow(w, i - 1);
        },
        t, tol_);
  }

  // All of f_1 .. f_{m+1} in one pass; the quadrature nodes and the cumulative
  // rate B(u) are shared across the family, so rapidly switching rates with
  // thousands of breakpoints stay cheap.
  std::vector<double> coefficients_f(double t) const {
    double bt = (*B_)(t);
    auto bcum = B_;
    int count = m_ + 1;
    return weighted_integral_family(
        a_, count,
        [bcum, bt, count](double u, double* out) {
          double w = -std::expm1((*bcum)(u)-bt);
          out[0] = 1.0;
          for (int k = 1; k < count; ++k) out[k] = out[k - 1] * w;
        },
        t, tol_);
  }

  // sum_i f_i P_i assembled as one sparse operator.
  SparseGenerator p_combination(const std::vector<double>& f) const {
    if (static_cast<int>(f.size()) != m_ + 1)
      throw std::invalid_argument("p_combination: expected m+1 coefficients");
    std::vector<std::pair<double, const SparseGenerator*>> terms;
    for (int i = 0; i <= m_; ++i)
      if (f[i] != 0.0) terms.emplace_back(f[i], &p_[i]);
    if (terms.empty()) return SparseGenerator::zero(dim());
    return linear_combination(terms);
  }

  ProbabilityVector initial_delta0() const {
    return ProbabilityVector::point_mass(dim(), 0, overflow_index());
  }

  // From the empty state Q annihilates the start vector, so the whole product
  // is a single exponential action.
  ProbabilityVector solve_delta0(double t, const ExpmOptions& opts = {},
                                 ExpmStats* stats = nullptr) const {
    if (t < 0) throw std::invalid_argument("solve_delta0: negative time");
    ProbabilityVector p = initial_delta0();
    if (t == 0) return p;
    p.values = expm_action(p_combination(coefficients_f(t)), p.values, opts, stats);
    return p;
  }

  ProbabilityVector solve(double t, const ProbabilityVector& p0, const ExpmOptions& opts = {},
                          ExpmStats* stats = nullptr) const {
    if (t < 0) throw std::invalid_argument("solve: negative time");
    if (p0.dim() != dim()) throw std::invalid_argument("solve: dimension mismatch");
    ProbabilityVector p = p0;
    p.overflow_index = overflow_index();
    if (t == 0) return p;
    double g = coefficient_g(t);
    if (g != 0.0) p.values = expm_action(q_.scaled(g), p.values, opts, stats);
    p.values = expm_action(p_combination(coefficients_f(t)), p.values, opts, stats);
    return p;
  }

  WeiNormanFactorization factorization() const {
    WeiNormanFactorization u;
    u.dim = dim();
    for (int i = 1; i <= m_ + 1; ++i) {
      auto self_a = a_;
      auto acum = A_;
      auto bcum = B_;
      QuadTol tol = tol_;
      std::function<double(double)> fi;
      if (i == 1) {
        fi = [acum](double t) { return (*acum)(t); };
      } else {
        fi = [self_a, bcum, i, tol](double t) {
          double bt = (*bcum)(t);
          return weighted_integral(
              self_a,
              [bcum, bt, i](double u, double) {
                return std::pow(-std::expm1((*bcum)(u)-bt), i - 1);
              },
              t, tol);
        };
      }
      u.factors.push_back(WeiNormanFactor{"f" + std::to_string(i) + "*P" + std::to_string(i),
                                          std::move(fi), p_[i - 1], false});
    }
    auto bcum = B_;
    u.factors.push_back(
        WeiNormanFactor{"g*Q", [bcum](double t) { return (*bcum)(t); }, q_, false});
    return u;
  }

  // Exact structure constants over the full truncated space, then the ladder
  // identities restricted to the margin-2 interior block, where they hold in
  // untruncated form.
  VerifyReport verify_commutation() const {
    VerifyReport report;
    std::vector<std::string> labels{"Q"};
    std::vector<SparseGenerator> elems{q_};
    for (int i = 1; i <= m_ + 1; ++i) {
      labels.push_back("P" + std::to_string(i));
      elems.push_back(p_[i - 1]);
    }
    LieBasis basis;
    try {
      basis = structure_constants(labels, elems, dim(), 0.0);
    } catch (const std::exception& e) {
      ++report.checks;
      report.failures.push_back(std::string("structure constants: ") + e.what());
      return report;
    }

    for (int i = 1; i <= m_ + 1; ++i)
      for (int j = i + 1; j <= m_ + 1; ++j) {
        ++report.checks;
        if (!basis.bracket(i, j).empty())
          report.failures.push_back("[P" + std::to_string(i) + ",P" + std::to_string(j) +
                                    "] != 0");
      }

    for (int i = 1; i <= m_ + 1; ++i) {
      ++report.checks;
      std::vector<std::pair<int, double>> want;
      if (i > 1) want.emplace_back(i, double(i - 1));
      if (i <= m_) want.emplace_back(i + 1, double(-i));
      if (basis.bracket(i, 0) != want)
        report.failures.push_back("[P" + std::to_string(i) + ",Q] != (i-1)P_i - iP_{i+1}");
    }

    for (int i = 1; i <= m_; ++i) {
      ++report.checks;
      SparseGenerator lhs = commutator(p_[i - 1], q_).restrict_interior(m_);
      SparseGenerator rhs =
          linear_combination({{double(i - 1), &p_[i - 1]}, {double(-i), &p_[i]}})
              .restrict_interior(m_);
      if (max_abs_diff(lhs, rhs) != 0.0)
        report.failures.push_back("interior [P" + std::to_string(i) + ",Q] residual nonzero");
    }
    return report;
  }

 private:
  PureBirthModel(RateFunction a, RateFunction b, int m, QuadTol tol)
      : a_(std::move(a)),
        b_(std::move(b)),
        m_(m),
        tol_(tol),
        A_(std::make_shared<CumulativeIntegral>(a_, tol)),
        B_(std::make_shared<CumulativeIntegral>(b_, tol)) {
    const int n = m + 2;
    auto clamp = [n](int k) { return std::min(k, n - 1); };
    std::vector<Entry> q;
    for (int k = 1; k <= m; ++k) {
      q.push_back({k, k, double(-k)});
      q.push_back({k + 1, k, double(k)});
    }
    q_ = SparseGenerator::from_entries(n, std::move(q));
    p_.reserve(m + 1);
    for (int i = 1; i <= m + 1; ++i) {
      std::vector<Entry> p;
      for (int k = 0; k < n; ++k) {
        int hi = clamp(k + i), lo = clamp(k + i - 1);
        if (hi == lo) continue;
        p.push_back({hi, k, 1.0});
        p.push_back({lo, k, -1.0});
      }
      p_.push_back(SparseGenerator::from_entries(n, std::move(p)));
    }
  }

  RateFunction a_, b_;
  int m_;
  QuadTol tol_;
  std::shared_ptr<CumulativeIntegral> A_;
  std::shared_ptr<CumulativeIntegral> B_;
  SparseGenerator q_;
  std::vector<SparseGenerator> p_;
};

}  // namespace weinorman
