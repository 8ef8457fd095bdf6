#include "spinlab/order_param.hpp"

#include <cmath>

#include "spinlab/errors.hpp"

namespace spinlab {
namespace {

// Stable definite integrals over a single affine piece hat(v) = D - B v,
// v in [0, l], written in terms of r = B l / D to avoid cancellation.

double series_k(double r) {  // -log(1-r)/r
  if (std::fabs(r) < 1e-3)
    return 1.0 + r * (0.5 + r * (1.0 / 3.0 + r * (0.25 + r * 0.2)));
  return -std::log1p(-r) / r;
}

double series_h(double r) {  // [r/(1-r) + log(1-r)] / r^2
  if (std::fabs(r) < 1e-3)
    return 0.5 + r * (2.0 / 3.0 + r * (0.75 + r * (0.8 + r * 5.0 / 6.0)));
  return (r / (1.0 - r) + std::log1p(-r)) / (r * r);
}

double defint_inv(double D, double B, double l) {  // int_0^l dv/(D-Bv)
  double r = B * l / D;
  return (l / D) * series_k(r);
}

double defint_inv_sq(double D, double B, double l) {  // int_0^l dv/(D-Bv)^2
  return l / (D * (D - B * l));
}

double defint_v_inv_sq(double D, double B, double l) {  // int_0^l v dv/(D-Bv)^2
  double r = B * l / D;
  return (l * l / (D * D)) * series_h(r);
}

struct Piece {
  double a, b;      // interval
  double hat_a;     // hat value at a
  double slope;     // hat(u) = hat_a - slope*(u-a)
};

// Builds the affine pieces of xhat on [0,1].
std::vector<Piece> ft_pieces(const OrderParamFT& x) {
  std::vector<Piece> ps;
  const auto& q = x.breakpoints;
  const auto& v = x.values;
  int k = static_cast<int>(q.size());
  // accumulate xhat from the right: xhat(1)=0
  std::vector<double> nodes;
  nodes.push_back(1.0);
  for (int i = k - 1; i >= 0; --i)
    if (q[i] < 1.0) nodes.push_back(q[i]);
  if (nodes.back() > 0.0) nodes.push_back(0.0);
  double hat = 0.0, right = 1.0;
  std::vector<Piece> rev;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    double left = nodes[j];
    // x value on [left, right)
    double mid = 0.5 * (left + right);
    double xv = 0.0;
    for (int i = k - 1; i >= 0; --i)
      if (mid >= q[i]) { xv = v[i]; break; }
    double hat_left = hat + xv * (right - left);
    rev.push_back({left, right, hat_left, xv});
    hat = hat_left;
    right = left;
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) ps.push_back(*it);
  return ps;
}

std::vector<Piece> zt_pieces(const OrderParamZT& p) {
  std::vector<Piece> ps;
  const auto& t = p.breakpoints;
  const auto& v = p.values;
  int k = static_cast<int>(t.size());
  std::vector<double> nodes;
  nodes.push_back(0.0);
  for (int i = 0; i < k; ++i)
    if (t[i] > 0.0 && t[i] < 1.0) nodes.push_back(t[i]);
  nodes.push_back(1.0);
  double hat = p.L;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    double a = nodes[j], b = nodes[j + 1];
    double mid = 0.5 * (a + b);
    double av = 0.0;
    for (int i = k - 1; i >= 0; --i)
      if (mid >= t[i]) { av = v[i]; break; }
    ps.push_back({a, b, hat, av});
    hat -= av * (b - a);
  }
  return ps;
}

template <class Pieces>
double integrate_pieces(const Pieces& ps, double lo, double hi, int power,
                        double c0, double c1) {
  double s = 0.0;
  for (const auto& pc : ps) {
    double a = std::max(pc.a, lo), b = std::min(pc.b, hi);
    if (b <= a) continue;
    double D = pc.hat_a - pc.slope * (a - pc.a);
    double B = pc.slope, l = b - a;
    if (power == 1) {
      s += c0 * defint_inv(D, B, l);  // affine numerator unused for power 1
    } else {
      // numerator c0 + c1*u with u = a + v
      double e0 = c0 + c1 * a, e1 = c1;
      s += e0 * defint_inv_sq(D, B, l) + e1 * defint_v_inv_sq(D, B, l);
    }
  }
  return s;
}

}  // namespace

void OrderParamFT::validate() const {
  if (breakpoints.empty() || breakpoints.size() != values.size())
    throw domain_error("order parameter: breakpoints/values mismatch");
  double prev_q = -1.0, prev_x = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] >= 0.0 && breakpoints[i] < 1.0 &&
          breakpoints[i] > prev_q))
      throw domain_error("order parameter: breakpoints must increase in [0,1)");
    if (!(values[i] > 0.0 && values[i] <= 1.0 && values[i] >= prev_x))
      throw domain_error("order parameter: values must be nondecreasing in (0,1]");
    prev_q = breakpoints[i];
    prev_x = values[i];
  }
  if (std::fabs(values.back() - 1.0) > 1e-12)
    throw domain_error("order parameter: x(qhat) must equal 1");
}

double OrderParamFT::x(double q) const {
  double xv = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i)
    if (q >= breakpoints[i]) xv = values[i];
  return xv;
}

double OrderParamFT::xhat(double q) const {
  if (q >= 1.0) return 0.0;
  for (const auto& pc : ft_pieces(*this))
    if (q >= pc.a && q <= pc.b) return pc.hat_a - pc.slope * (q - pc.a);
  return 1.0 - q;  // unreachable for q in [0,1]
}

void OrderParamZT::validate() const {
  if (breakpoints.size() != values.size())
    throw domain_error("ZT order parameter: breakpoints/values mismatch");
  if (!(L > 0.0)) throw domain_error("ZT order parameter: L must be positive");
  double prev_t = -1.0, prev_a = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] >= 0.0 && breakpoints[i] < 1.0 &&
          breakpoints[i] > prev_t))
      throw domain_error("ZT order parameter: breakpoints must increase in [0,1)");
    if (!(values[i] >= prev_a))
      throw domain_error("ZT order parameter: alpha must be nondecreasing, >= 0");
    prev_t = breakpoints[i];
    prev_a = values[i];
  }
  if (!(alphahat(1.0) > 0.0))
    throw domain_error("ZT order parameter: alphahat must stay positive on [0,1]");
}

double OrderParamZT::alpha(double q) const {
  double av = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i)
    if (q >= breakpoints[i]) av = values[i];
  return av;
}

double OrderParamZT::alphahat(double q) const {
  double hat = L, prev = 0.0, level = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (q <= breakpoints[i]) break;
    hat -= level * (std::min(q, breakpoints[i]) - prev);
    prev = breakpoints[i];
    level = values[i];
  }
  if (q > prev) hat -= level * (q - prev);
  return hat;
}

double integral_inv_xhat(const OrderParamFT& x, double lo, double hi) {
  return integrate_pieces(ft_pieces(x), lo, hi, 1, 1.0, 0.0);
}
double integral_inv_xhat_sq(const OrderParamFT& x, double lo, double hi) {
  return integrate_pieces(ft_pieces(x), lo, hi, 2, 1.0, 0.0);
}
double integral_affine_inv_xhat_sq(const OrderParamFT& x, double lo, double hi,
                                   double c0, double c1) {
  return integrate_pieces(ft_pieces(x), lo, hi, 2, c0, c1);
}
double integral_inv_ahat(const OrderParamZT& a, double lo, double hi) {
  return integrate_pieces(zt_pieces(a), lo, hi, 1, 1.0, 0.0);
}
double integral_inv_ahat_sq(const OrderParamZT& a, double lo, double hi) {
  return integrate_pieces(zt_pieces(a), lo, hi, 2, 1.0, 0.0);
}
double integral_affine_inv_ahat_sq(const OrderParamZT& a, double lo, double hi,
                                   double c0, double c1) {
  return integrate_pieces(zt_pieces(a), lo, hi, 2, c0, c1);
}

}  // namespace spinlab
