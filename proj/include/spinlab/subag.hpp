#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/hamiltonian.hpp"

namespace spinlab {

struct AscentConfig {
  double eta = 0.02;  // step fraction, 1/eta must be an integer, 0 < eta <= 1/2
  std::uint64_t seed = 1;
  bool record_trajectory = false;
};

struct SubagResult {
  Eigen::VectorXd x;
  double energy_density = 0.0;
  std::vector<Eigen::VectorXd> trajectory;  // x_0 .. x_{1/eta} when recorded
};

// Randomized ascent: 1/eta steps, each moving sqrt(eta N) along a uniform
// direction in the span of the top ceil(N eta) eigenvectors of the Hessian
// restricted to the orthogonal complement of the current position; the sign
// is chosen to align with the gradient.  |x_j|^2 = j eta N exactly.
SubagResult hessian_ascent(const Hamiltonian& H, const AscentConfig& cfg);

struct ManyRuns {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> energies;
  Eigen::MatrixXd overlaps;  // k x k, <x_r, x_s>/N
};

ManyRuns many_runs(const Hamiltonian& H, int k, const AscentConfig& cfg);

}  // namespace spinlab
