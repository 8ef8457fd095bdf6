#pragma once

#include <vector>

namespace spinlab {

// Finite-temperature step order parameter: x(q) = x_i on [q_i, q_{i+1}),
// 0 below q_1, 1 at and above the last breakpoint q_k = qhat < 1.
struct OrderParamFT {
  std::vector<double> breakpoints;  // q_1 < ... < q_k in [0,1)
  std::vector<double> values;       // x_1 <= ... <= x_k = 1 in (0,1]

  double qhat() const { return breakpoints.back(); }
  double x(double q) const;
  double xhat(double q) const;  // \int_q^1 x(s) ds, closed form
  void validate() const;        // throws domain_error on malformed input
};

// Zero-temperature pair (L, alpha): alpha(q) = a_i on [t_i, t_{i+1}),
// 0 below t_1 (alpha may be identically zero: empty breakpoint list).
struct OrderParamZT {
  double L = 1.0;
  std::vector<double> breakpoints;  // t_1 < ... < t_k in [0,1)
  std::vector<double> values;       // 0 <= a_1 <= ... <= a_k (levels)

  double alpha(double q) const;
  double alphahat(double q) const;  // L - \int_0^q alpha(s) ds
  void validate() const;
};

// Piecewise-exact integrals against the affine-by-pieces hat functions.
// All take the integration range [lo, hi] inside [0,1].
double integral_inv_xhat(const OrderParamFT& x, double lo, double hi);     // ds/xhat
double integral_inv_xhat_sq(const OrderParamFT& x, double lo, double hi);  // ds/xhat^2
// \int_lo^hi (c0 + c1 u)/xhat(u)^2 du  (used by f(s) and the gradients)
double integral_affine_inv_xhat_sq(const OrderParamFT& x, double lo, double hi,
                                   double c0, double c1);

double integral_inv_ahat(const OrderParamZT& a, double lo, double hi);
double integral_inv_ahat_sq(const OrderParamZT& a, double lo, double hi);
double integral_affine_inv_ahat_sq(const OrderParamZT& a, double lo, double hi,
                                   double c0, double c1);

}  // namespace spinlab
