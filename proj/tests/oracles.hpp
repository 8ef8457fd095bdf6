// Independent slow-but-sure reference computations for the test suites.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/quadrature.hpp"

namespace oracles {

// log-potential of the semicircle law by direct quadrature, in the
// theta-parametrization lambda = 2 cos(theta) so the density endpoints are
// smooth; the interior log singularity is flattened with a square-root
// substitution.
inline double kappa_quad(double x) {
  x = std::fabs(x);
  const double pi = 3.14159265358979323846;
  auto smooth = [&](double theta) {
    double s = std::sin(theta);
    double t = std::fabs(x - 2.0 * std::cos(theta));
    if (t < 1e-300) return 0.0;  // sin^2 wins the 0 * log(0) race
    return s * s * std::log(t);
  };
  if (x >= 2.0) {
    // theta = v^2 keeps the x = 2 endpoint singularity integrable-smooth
    auto sub = [&](double v) { return smooth(v * v) * 2.0 * v; };
    double v = spinlab::quad::adaptive_simpson(sub, 0.0, std::sqrt(pi), 1e-10, 48);
    return (2.0 / pi) * v;
  }
  double theta0 = std::acos(x / 2.0);
  auto right = [&](double v) { return smooth(theta0 + v * v) * 2.0 * v; };
  auto left = [&](double v) { return smooth(theta0 - v * v) * 2.0 * v; };
  double i1 = spinlab::quad::adaptive_simpson(right, 0.0, std::sqrt(pi - theta0), 1e-10, 48);
  double i2 = spinlab::quad::adaptive_simpson(left, 0.0, std::sqrt(theta0), 1e-10, 48);
  return (2.0 / pi) * (i1 + i2);
}

inline Eigen::VectorXd fd_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd e = x;
  for (int i = 0; i < x.size(); ++i) {
    e[i] = x[i] + h;
    double up = f(e);
    e[i] = x[i] - h;
    double dn = f(e);
    e[i] = x[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

struct MeanVar {
  double mean = 0.0, m2 = 0.0;
  long n = 0;
  void add(double v) {
    ++n;
    double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double var() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double se() const { return std::sqrt(var() / n); }
};

}  // namespace oracles
