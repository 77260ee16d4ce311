#pragma once
// factorization.hpp: an ordered product of exponentials
//   U(t) = e^{g_1(t) H_1} e^{g_2(t) H_2} ... e^{g_m(t) H_m}
// applied to a vector. The first listed factor is leftmost, so application
// runs right to left. Factors whose generator is the identity are applied as
// scalar multiplication instead of a Krylov solve.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weinorman/krylov.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

struct WeiNormanFactor {
  std::string label;
  std::function<double(double)> coefficient;  // g_i(t)
  SparseGenerator op;
  bool scalar_identity = false;
};

struct WeiNormanFactorization {
  int dim = 0;
  std::vector<WeiNormanFactor> factors;

  // U(0) must be the identity: every coefficient vanishes at t = 0.
  void validate() const {
    for (const auto& f : factors) {
      if (!f.scalar_identity && f.op.dim() != dim)
        throw std::invalid_argument("factorization: dimension mismatch in " + f.label);
      double g0 = f.coefficient(0.0);
      if (std::fabs(g0) > 1e-12)
        throw std::invalid_argument("factorization: coefficient " + f.label +
                                    " is nonzero at t = 0");
    }
  }
};

inline std::vector<double> apply_factorization(const WeiNormanFactorization& u, double t,
                                               std::vector<double> v,
                                               const ExpmOptions& opts = {},
                                               ExpmStats* stats = nullptr) {
  if (t < 0) throw std::invalid_argument("apply_factorization: negative time");
  if (static_cast<int>(v.size()) != u.dim)
    throw std::invalid_argument("apply_factorization: dimension mismatch");
  for (auto it = u.factors.rbegin(); it != u.factors.rend(); ++it) {
    double g = it->coefficient(t);
    if (!std::isfinite(g))
      throw std::runtime_error("apply_factorization: coefficient " + it->label +
                               " is not finite at t = " + std::to_string(t));
    if (g == 0.0) continue;
    if (it->scalar_identity) {
      double s = std::exp(g);
      for (double& x : v) x *= s;
    } else {
      v = expm_action(it->op.scaled(g), v, opts, stats);
    }
  }
  return v;
}

}  // namespace weinorman
