#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spinlab {

// xi(t) = sum_p gamma_p^2 t^p. Gammas are stored unsquared, 1-indexed by
// degree (gammas[0] is the external-field weight gamma_1).
class Mixture {
 public:
  static constexpr int kMaxDegree = 16;

  Mixture() = default;
  explicit Mixture(std::vector<double> gammas);
  static Mixture from_json_file(const std::string& path);
  static Mixture from_json_text(const std::string& text);

  // order 0/1/2 -> xi, xi', xi''
  double xi(double t, int order = 0) const;

  const std::vector<double>& gammas() const { return gammas_; }
  int max_degree() const { return static_cast<int>(gammas_.size()); }
  double gamma(int p) const;  // 1-indexed; 0 beyond the stored degree
  bool is_pure() const;       // exactly one nonzero gamma_p
  bool has_field() const { return gamma(1) > 0.0; }

  // gamma_1 replaced by h, everything else kept
  Mixture replace_field(double h) const;
  // appends iota at degree P+1 so pure models get nonsingular covariances
  Mixture perturbed(double iota = 1e-3) const;

 private:
  std::vector<double> gammas_;
};

// Smooth scalar function with derivatives up to order 2; every derived
// mixture (band restriction, submodel, ...) is one of these. Plain mixtures
// convert via fn().
using XiFun = std::function<double(double t, int order)>;

XiFun fn(const Mixture& m);

// Band covariance conditioned on the value of H at the center:
//   txi_q(t) = xi(q^2 + (1-q^2) t) - xi(q)^2/xi(1)
XiFun band_mixture(const Mixture& m, double q);
// Variant additionally conditioned on the gradient; the additive constant is
// dropped (only derivatives feed the functionals downstream):
//   txi_q(t) = xi(q^2 + (1-q^2) t) - (1-q^2) xi'(q)^2 t / xi'(1)
XiFun band_mixture_grad(const Mixture& m, double q);

// xi_d(x) = xi(q_lo + (q_hi-q_lo) x) - xi(q_lo) - xi'(q_lo)(q_hi-q_lo) x
XiFun submodel(const Mixture& m, double q_lo, double q_hi);
// xi_{-1}(x) = xi(q0 x)
XiFun submodel_root(const Mixture& m, double q0);

}  // namespace spinlab
