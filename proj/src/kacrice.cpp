#include "spinlab/kacrice.hpp"

#include <array>
#include <cmath>

#include "spinlab/errors.hpp"
#include "spinlab/variational.hpp"

namespace spinlab {

namespace {

// 2x2 symmetric solve with a condition guard (Sigma is singular iff the
// mixture is pure, by Cauchy-Schwarz).
struct Sym2 {
  double a, b, c;  // [[a, b], [b, c]]
  void guard() const {
    double tr = a + c, det = a * c - b * b;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double lmax = tr / 2.0 + disc, lmin = tr / 2.0 - disc;
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
      throw domain_error("pure or near-pure mixture: covariance matrix is singular");
  }
  std::pair<double, double> solve(double r1, double r2) const {
    double det = a * c - b * b;
    return {(c * r1 - b * r2) / det, (a * r2 - b * r1) / det};
  }
  std::array<double, 3> inverse() const {  // (a', b', c')
    double det = a * c - b * b;
    return {c / det, -b / det, a / det};
  }
};

Sym2 sigma_of(const Mixture& m) {
  double x1 = m.xi(1.0), d1 = m.xi(1.0, 1), d2 = m.xi(1.0, 2);
  return {x1, d1, d1 + d2};
}

Mixture maybe_perturbed(const Mixture& m, bool perturb, double iota) {
  if (!perturb) return m;
  return m.perturbed(iota);
}

// Gaussian elimination for the 4x4 two-point covariance; returns x with
// A x = rhs and a crude condition estimate via the pivot ratio.
std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> A,
                             std::array<double, 4> rhs) {
  double maxp = 0.0, minp = 1e300;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(rhs[c], rhs[piv]);
    double p = std::fabs(A[c][c]);
    maxp = std::max(maxp, p);
    minp = std::min(minp, p);
    if (!(p > 0.0) || maxp / minp > 1e12)
      throw domain_error("pure or near-pure mixture: two-point covariance singular");
    for (int r = c + 1; r < 4; ++r) {
      double f = A[r][c] / A[c][c];
      for (int cc = c; cc < 4; ++cc) A[r][cc] -= f * A[c][cc];
      rhs[r] -= f * rhs[c];
    }
  }
  std::array<double, 4> x{};
  for (int r = 3; r >= 0; --r) {
    double s = rhs[r];
    for (int cc = r + 1; cc < 4; ++cc) s -= A[r][cc] * x[cc];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace

double kappa(double x) {
  double v = 0.25 * x * x - 0.5;
  double ax = std::fabs(x);
  if (ax > 2.0) {
    double s = std::sqrt(ax * ax - 4.0);
    v -= 0.25 * ax * s - std::log(0.5 * (s + ax));
  }
  return v;
}

double kappa_prime(double x) {
  if (x >= 2.0) return 0.5 * (x - std::sqrt(x * x - 4.0));
  if (x <= -2.0) return 0.5 * (x + std::sqrt(x * x - 4.0));
  return 0.5 * x;  // principal value inside the bulk
}

double theta(const Mixture& m0, double E, double R, bool perturb, double iota) {
  Mixture m = maybe_perturbed(m0, perturb, iota);
  Sym2 S = sigma_of(m);
  S.guard();
  auto [wE, wR] = S.solve(E, R);
  double d1 = m.xi(1.0, 1), d2 = m.xi(1.0, 2);
  return 0.5 + 0.5 * std::log(d2 / d1) - 0.5 * (E * wE + R * wR) +
         kappa(R / std::sqrt(d2));
}

double xi_two(const Mixture& m0, double q, double E1, double E2, double R1,
              double R2, bool perturb, double iota) {
  Mixture m = maybe_perturbed(m0, perturb, iota);
  if (!(std::fabs(q) < 1.0)) throw domain_error("xi_two: |q| must be < 1");
  double x1 = m.xi(1.0), xq = m.xi(q);
  double d1 = m.xi(1.0, 1), d2 = m.xi(1.0, 2);
  // derivatives at q by direct monomial sums so negative q works too
  double dq = 0.0, dq2 = 0.0;
  for (int p = 1; p <= m.max_degree(); ++p) {
    double g2 = m.gamma(p) * m.gamma(p);
    dq += p * g2 * std::pow(q, p - 1);
    if (p >= 2) dq2 += p * (p - 1) * g2 * std::pow(q, p - 2);
  }
  if (!(std::fabs(dq) < d1)) throw domain_error("xi_two: need |xi'(q)| < xi'(1)");

  std::array<std::array<double, 4>, 4> A{{
      {x1, xq, d1, q * dq},
      {xq, x1, q * dq, d1},
      {d1, q * dq, d1 + d2, q * dq + q * q * dq2},
      {q * dq, d1, q * dq + q * q * dq2, d1 + d2},
  }};
  std::array<double, 4> v{E1, E2, R1, R2};
  auto w = solve4(A, v);
  double quad = 0.0;
  for (int i = 0; i < 4; ++i) quad += v[i] * w[i];
  return 1.0 + 0.5 * std::log((1.0 - q * q) * d2 * d2 / (d1 * d1 - dq * dq)) -
         0.5 * quad + kappa(R1 / std::sqrt(d2)) + kappa(R2 / std::sqrt(d2));
}

std::pair<double, double> v_q(const Mixture& m0, double q, bool perturb,
                              double iota) {
  Mixture m = maybe_perturbed(m0, perturb, iota);
  if (!(q >= 0.0 && q <= 1.0)) throw domain_error("v_q: q in [0,1]");
  Sym2 S = sigma_of(m);
  S.guard();
  return S.solve(m.xi(q), q * m.xi(q, 1));
}

ThetaSplit theta_split(const Mixture& m0, bool perturb) {
  Mixture m = maybe_perturbed(m0, perturb, 1e-3);
  Sym2 S = sigma_of(m);
  S.guard();
  auto inv = S.inverse();
  ThetaSplit out{};
  out.K1 = 0.5 * inv[0];
  out.K2 = -inv[1] / inv[0];
  out.c0 = 0.5 + 0.5 * std::log(m.xi(1.0, 2) / m.xi(1.0, 1));
  out.c2 = 0.5 * (inv[2] - inv[1] * inv[1] / inv[0]);
  out.s = std::sqrt(m.xi(1.0, 2));
  return out;
}

double ThetaSplit::M(double R) const { return c0 + kappa(R / s) - c2 * R * R; }

namespace {

double theta_at(const Mixture& m, double E, double R, bool perturb) {
  return theta(m, E, R, perturb);
}

double argmax_theta(const Mixture& m, double E, bool perturb) {
  OneRSBParams pr = onersb_params(maybe_perturbed(m, perturb, 1e-3));
  if (E < pr.E0 - 1e-12)
    throw domain_error("r_star: rate function is defined on [E0, infinity)");
  double d2 = maybe_perturbed(m, perturb, 1e-3).xi(1.0, 2);
  double lo = 2.0 * std::sqrt(d2);
  double hi = pr.R0 + 4.0;
  auto dtheta = [&](double R) {
    double h = 1e-6;
    return (theta_at(m, E, R + h, perturb) - theta_at(m, E, R - h, perturb)) /
           (2.0 * h);
  };
  while (dtheta(hi) > 0.0) hi *= 2.0;
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = theta_at(m, E, c, perturb), fd = theta_at(m, E, d, perturb);
  while (b - a > 1e-10) {
    if (fc > fd) { b = d; d = c; fd = fc; c = b - gr * (b - a); fc = theta_at(m, E, c, perturb); }
    else { a = c; c = d; fc = fd; d = a + gr * (b - a); fd = theta_at(m, E, d, perturb); }
  }
  return 0.5 * (a + b);
}

}  // namespace

double r_star(const Mixture& m, double E, bool perturb) {
  return argmax_theta(m, E, perturb);
}

double theta_star(const Mixture& m, double E, bool perturb) {
  return theta(m, E, argmax_theta(m, E, perturb), perturb);
}

std::vector<RatePoint> rate_curve(const Mixture& m, double emin, double emax,
                                  int steps, bool perturb) {
  if (steps < 1) throw domain_error("rate_curve: steps >= 1");
  if (emax < emin) throw domain_error("rate_curve: emax >= emin required");
  std::vector<RatePoint> out;
  for (int i = 0; i < steps; ++i) {
    double E = steps == 1 ? emin : emin + (emax - emin) * i / (steps - 1);
    double R = r_star(m, E, perturb);
    out.push_back({E, R, theta(m, E, R, perturb)});
  }
  return out;
}

double tilted_gs(const Mixture& m, int p, double x) {
  if (!(m.gamma(p) > 0.0)) throw domain_error("tilted_gs: gamma_p must be > 0");
  if (m.has_field()) throw domain_error("tilted_gs: requires gamma_1 = 0");
  MinimizeOptions inner;
  inner.max_levels = 2;
  inner.restarts = 3;
  auto h = [&](double q) -> double {
    if (q >= 1.0 - 1e-12) return x;  // the band degenerates to a point
    double Q = minimize_zt(band_mixture(m, q), inner).value;
    return Q + std::pow(q, p) * x;
  };
  const int grid = 201;
  double best_q = 0.0, best = -1e300;
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) {
    double q = static_cast<double>(i) / (grid - 1);
    vals[i] = h(q);
    if (vals[i] > best) { best = vals[i]; best_q = q; }
  }
  double step = 1.0 / (grid - 1);
  for (int round = 0; round < 3; ++round) {
    double lo = std::max(0.0, best_q - step), hi = std::min(1.0, best_q + step);
    step = (hi - lo) / 20.0;
    for (int i = 0; i <= 20; ++i) {
      double q = lo + i * step;
      double v = h(q);
      if (v > best) { best = v; best_q = q; }
    }
  }
  return best;
}

}  // namespace spinlab
