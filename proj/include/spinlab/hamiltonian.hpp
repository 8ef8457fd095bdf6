#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/mixture.hpp"

namespace spinlab {

// A sampled mixed polynomial Gaussian field on R^N with
// E H(x) H(y) = N xi(<x,y>/N).  Coefficients are stored once per sorted
// multi-index, scaled by sqrt(multiplicity), in float32; accumulation is
// done in double.  Everything is keyed by (seed, degree, rank), so the same
// seed always yields bit-identical fields.
class Hamiltonian {
 public:
  Hamiltonian(const Mixture& m, int N, std::uint64_t seed,
              std::size_t memory_cap_bytes = std::size_t{2} << 30);

  int size() const { return N_; }
  const Mixture& mixture() const { return mix_; }
  std::uint64_t seed() const { return seed_; }

  double value(const Eigen::VectorXd& x) const;
  void value_grad(const Eigen::VectorXd& x, double& H,
                  Eigen::VectorXd& grad) const;
  // One fused pass over the coefficient arrays: value, gradient, Hessian.
  void derivatives(const Eigen::VectorXd& x, double& H, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const;

  // Number of stored coefficients for degree p: C(N+p-1, p).
  static std::size_t tensor_count(int N, int p);

 private:
  Mixture mix_;
  int N_;
  std::uint64_t seed_;
  std::vector<std::vector<float>> coef_;  // coef_[p-1], empty when gamma_p = 0
  std::vector<double> scale_;             // gamma_p N^{-(p-1)/2}
};

}  // namespace spinlab
