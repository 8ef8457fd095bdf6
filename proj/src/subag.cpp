#include "spinlab/subag.hpp"

#include <cmath>

#include "spinlab/errors.hpp"
#include "spinlab/landscape.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

SubagResult hessian_ascent(const Hamiltonian& H, const AscentConfig& cfg) {
  const int N = H.size();
  if (!(cfg.eta > 0.0 && cfg.eta <= 0.5))
    throw domain_error("hessian_ascent: eta must lie in (0, 1/2]");
  double inv = 1.0 / cfg.eta;
  long steps = std::lround(inv);
  if (std::fabs(inv - steps) > 1e-9)
    throw domain_error("hessian_ascent: 1/eta must be an integer");
  if (N * cfg.eta < 1.0 - 1e-12)
    throw domain_error("hessian_ascent: N*eta must be >= 1");
  const int m = static_cast<int>(std::ceil(N * cfg.eta));

  SubagResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  if (cfg.record_trajectory) out.trajectory.push_back(x);

  double val;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  const double incr = std::sqrt(cfg.eta * N);

  for (long j = 0; j < steps; ++j) {
    H.derivatives(x, val, grad, hess);
    Eigen::VectorXd v;
    rng::Stream rs(rng::derive_key(cfg.seed, 0x5ba6, static_cast<std::uint64_t>(j)));
    if (j == 0) {
      // no position to deflate yet
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
      if (es.info() != Eigen::Success)
        throw budget_error("hessian_ascent: eigendecomposition failed");
      Eigen::VectorXd c(m);
      for (int i = 0; i < m; ++i) c[i] = rs.normal();
      v = es.eigenvectors().rightCols(m) * c;
    } else {
      Eigen::MatrixXd Q = tangent_frame(x);
      Eigen::MatrixXd hd = Q.transpose() * hess * Q;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
      if (es.info() != Eigen::Success)
        throw budget_error("hessian_ascent: eigendecomposition failed");
      Eigen::VectorXd c(m);
      for (int i = 0; i < m; ++i) c[i] = rs.normal();
      v = Q * (es.eigenvectors().rightCols(m) * c);
    }
    v /= v.norm();
    if (grad.dot(v) < 0.0) v = -v;
    x += incr * v;
    if (cfg.record_trajectory) out.trajectory.push_back(x);
  }

  out.x = x;
  out.energy_density = H.value(x) / N;
  return out;
}

ManyRuns many_runs(const Hamiltonian& H, int k, const AscentConfig& cfg) {
  if (k < 1) throw domain_error("many_runs: k >= 1");
  const int N = H.size();
  ManyRuns out;
  out.overlaps.resize(k, k);
  for (int r = 0; r < k; ++r) {
    AscentConfig c = cfg;
    c.seed = rng::derive_key(cfg.seed, 0x4b5, r);
    SubagResult s = hessian_ascent(H, c);
    out.points.push_back(std::move(s.x));
    out.energies.push_back(s.energy_density);
  }
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      out.overlaps(r, s) =
          r == s ? 1.0 : out.points[r].dot(out.points[s]) / N;
  return out;
}

}  // namespace spinlab
