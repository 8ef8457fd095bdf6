#pragma once

#include <utility>
#include <vector>

#include "spinlab/mixture.hpp"

namespace spinlab {

// Log-potential of the semicircle law and its derivative.
double kappa(double x);
double kappa_prime(double x);  // closed form for |x| >= 2, x/2 inside the bulk

// Complexity exponent Theta(E,R) and the two-point version Xi.
// Pure mixtures make the covariance matrices singular; set perturb=true to
// add the iota^2 q^(P+1) correction instead of failing.
double theta(const Mixture& m, double E, double R, bool perturb = false,
             double iota = 1e-3);
double xi_two(const Mixture& m, double q, double E1, double E2, double R1,
              double R2, bool perturb = false, double iota = 1e-3);

// Regression coefficients of the band conditioning: Sigma^{-1} [xi(q); q xi'(q)].
std::pair<double, double> v_q(const Mixture& m, double q, bool perturb = false,
                              double iota = 1e-3);

// Rate function pieces: R+(E) = argmax Theta(E, .), Theta+(E) = Theta(E, R+(E)).
double r_star(const Mixture& m, double E, bool perturb = false);
double theta_star(const Mixture& m, double E, bool perturb = false);

struct RatePoint {
  double E, r_star, theta_star;
};
std::vector<RatePoint> rate_curve(const Mixture& m, double emin, double emax,
                                  int steps, bool perturb = false);

// Decomposition Theta(E,R) = M(R) - K1 (E - K2 R)^2.
struct ThetaSplit {
  double K1, K2;
  double c0, c2, s;  // M(R) = c0 + kappa(R/s) - c2 R^2
  double M(double R) const;
};
ThetaSplit theta_split(const Mixture& m, bool perturb = false);

// Tilted conditional ground state GS(x) = sup_q { Q(txi_q) + q^p x }.
double tilted_gs(const Mixture& m, int p, double x);

}  // namespace spinlab
