#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "spinlab/hamiltonian.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

inline Hamiltonian sample(const Mixture& m, int N, std::uint64_t seed,
                          std::size_t memory_cap_bytes = std::size_t{2} << 30) {
  return Hamiltonian(m, N, seed, memory_cap_bytes);
}

// Orthonormal basis of sigma-perp, one Householder reflection; column j is
// frame vector e_{j+2} of the frame whose first vector is sigma/|sigma|.
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& sigma);

// Spherical derivatives at |sigma| = sqrt(N): radial derivative, gradient in
// frame coordinates, and the spherical Hessian Q^T (hess) Q - radial/sqrt(N).
struct Riemannian {
  double radial;
  Eigen::VectorXd tangential;  // length N-1
  Eigen::MatrixXd hess_sp;     // (N-1) x (N-1)
};
Riemannian riemannian(const Hamiltonian& H, const Eigen::VectorXd& sigma);

struct AscentResult {
  Eigen::VectorXd point;
  double energy_density = 0.0;
  double grad_norm = 0.0;  // tangential gradient norm at the final point
  int steps = 0;
  bool converged = false;
};

// Projected gradient ascent on the sphere of given radius, backtracking line
// search starting from 0.1/sqrt(xi''(1)).
AscentResult ascend(const Hamiltonian& H, const Eigen::VectorXd& x0,
                    double radius, int max_steps = 10000, double gtol = 1e-8);

AscentResult gs_estimate(const Hamiltonian& H, int restarts, std::uint64_t seed,
                         int max_steps = 10000);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
  int samples = 0;
};

// Uniform point on the band { rho : R(rho,sigma)=q, |rho|=sqrt(N) }.
Eigen::VectorXd band_point(const Eigen::VectorXd& sigma, double q,
                           rng::Stream& rs);

McEstimate band_free_energy(const Hamiltonian& H, const Eigen::VectorXd& sigma,
                            double q, int samples, std::uint64_t seed);

AscentResult band_gs(const Hamiltonian& H, const Eigen::VectorXd& sigma,
                     double q, int restarts, std::uint64_t seed,
                     int max_steps = 10000);

McEstimate free_energy_estimate(const Hamiltonian& H, int samples,
                                std::uint64_t seed);

}  // namespace spinlab
