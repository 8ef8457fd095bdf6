#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spinlab/mixture.hpp"
#include "spinlab/order_param.hpp"

namespace spinlab {

// Disjoint sorted closed intervals in [0,1]; atoms have a == b.
struct IntervalSet {
  std::vector<std::pair<double, double>> intervals;

  bool contains(double q, double tol = 1e-9) const;
  bool is_single_atom(double q, double tol = 1e-6) const;
  // endpoints of every interval, sorted, deduplicated
  std::vector<double> endpoints(double merge_tol = 1e-6) const;
  std::string str() const;
};

enum class ModelType {
  TopologicallyTrivial,
  StrictlyRS,
  Strictly1RSB,
  StrictlyFRSB,
  Composite,
};
std::string to_string(ModelType t);

struct OneRSBParams {
  double z, y, L, u, Q;
  double E0, R0;  // E0 == Q; R0 = y + xi''(1)/y
};

// Crisanti-Sommers functional at finite / zero temperature.
double cs_value(const XiFun& xi, const OrderParamFT& x);
double zt_value(const XiFun& xi, const OrderParamZT& p);
inline double cs_value(const Mixture& m, const OrderParamFT& x) {
  return cs_value(fn(m), x);
}
inline double zt_value(const Mixture& m, const OrderParamZT& p) {
  return zt_value(fn(m), p);
}

struct MinimizeOptions {
  int max_levels = 3;
  double tol = 1e-10;
  int restarts = 20;
  std::uint64_t seed = 0x5eedf00d;
};

struct CsResult {
  OrderParamFT x;
  double value;
  bool converged;
};
struct ZtResult {
  OrderParamZT p;
  double value;
  bool converged;
};

CsResult minimize_cs(const XiFun& xi, const MinimizeOptions& opt = {});
ZtResult minimize_zt(const XiFun& xi, const MinimizeOptions& opt = {});
inline CsResult minimize_cs(const Mixture& m, const MinimizeOptions& opt = {}) {
  return minimize_cs(fn(m), opt);
}
inline ZtResult minimize_zt(const Mixture& m, const MinimizeOptions& opt = {}) {
  return minimize_zt(fn(m), opt);
}

// Extremality diagnostics.
//   F(q) = xi'(q) - \int_0^q ds/xhat(s)^2,  f(s) = \int_0^s F
//   G(q) = xi'(q) - \int_0^q ds/ahat(s)^2,  g(s) = \int_s^1 G
double F_of(const XiFun& xi, const OrderParamFT& x, double q);
double f_of(const XiFun& xi, const OrderParamFT& x, double s);
double G_of(const XiFun& xi, const OrderParamZT& p, double q);
double g_of(const XiFun& xi, const OrderParamZT& p, double s);

struct SetOptions {
  int grid = 4001;
  double tol = -1.0;  // <0 -> 1e-7 * (1 + |scale|)
};

IntervalSet compute_S(const XiFun& xi, const OrderParamFT& x,
                      const SetOptions& opt = {});

struct TReport {
  IntervalSet T;
  double G1;             // should be 0 at the minimizer
  double min_g;          // should be 0
  double mass_outside;   // nu_inf(T^c), should be 0
};
TReport compute_T(const XiFun& xi, const OrderParamZT& p,
                  const SetOptions& opt = {});

ModelType classify(const Mixture& m, const MinimizeOptions& opt = {});

// Closed-form parameters for (not necessarily strictly) 1RSB mixtures.
double upsilon(double z);                 // ((1+z)log(1+z))/z^2 - 1/z
double solve_upsilon(double ratio);       // bisection, tolerance 1e-12
OneRSBParams onersb_params(const XiFun& xi);
inline OneRSBParams onersb_params(const Mixture& m) {
  return onersb_params(fn(m));
}

// E(q) = (1/2){xi'(0)xhat(0) + \int_0^q xi'' xhat + \int_0^q ds/xhat}
double energy_profile(const XiFun& xi, const OrderParamFT& x, double q);
inline double energy_profile(const Mixture& m, const OrderParamFT& x, double q) {
  return energy_profile(fn(m), x, q);
}

std::vector<double> s_refinement(const Mixture& m,
                                 const MinimizeOptions& opt = {});

struct PhaseChecks {
  // worst (largest) margin and its location for each inequality
  double rs2_margin, rs2_at;     // xi(q) + 0.5 log(1-q^2) <= 0
  double rs_margin, rs_at;       // xi(q) + q + log(1-q)   <= 0
  double onersb_margin, onersb_at;  // 1RSB inequality, as a deficit (>= -tol)
  bool onersb_applicable;
};
PhaseChecks phase_checks(const Mixture& m);

}  // namespace spinlab
