#pragma once

#include <cmath>
#include <functional>

namespace spinlab::quad {

// 16-point Gauss-Legendre on [a,b]; exact for polynomials of degree <= 31,
// which covers xi'' times an affine factor for every mixture we allow.
template <class F>
double gl16(const F& f, double a, double b) {
  static const double xs[8] = {
      0.0950125098376374401853193, 0.2816035507792589132304605,
      0.4580167776572273863424194, 0.6178762444026437484466718,
      0.7554044083550030338951012, 0.8656312023878317438804679,
      0.9445750230732325760779884, 0.9894009349916499325961542};
  static const double ws[8] = {
      0.1894506104550684962853967, 0.1826034150449235888667637,
      0.1691565193950025381893121, 0.1495959888165767320815017,
      0.1246289712555338720524763, 0.0951585116824927848099251,
      0.0622535239386478928628438, 0.0271524594117540948517806};
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += ws[i] * (f(c - h * xs[i]) + f(c + h * xs[i]));
  return s * h;
}

template <class F>
double gl16_panels(const F& f, double a, double b, int panels) {
  double s = 0.0, h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) s += gl16(f, a + i * h, a + (i + 1) * h);
  return s;
}

// Adaptive Simpson; used for oracle-style checks where no structure is known.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 60) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double m, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } impl{f};
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.run(a, m, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace spinlab::quad
