#include "spinlab/landscape.hpp"

#include <cmath>

#include "spinlab/errors.hpp"

namespace spinlab {

namespace {

Eigen::VectorXd gaussian_vec(int N, rng::Stream& rs) {
  Eigen::VectorXd v(N);
  for (int i = 0; i < N; ++i) v[i] = rs.normal();
  return v;
}

Eigen::VectorXd sphere_point(int N, double radius, rng::Stream& rs) {
  Eigen::VectorXd v = gaussian_vec(N, rs);
  return v * (radius / v.norm());
}

double initial_step(const Mixture& m) {
  return 0.1 / std::sqrt(std::max(m.xi(1.0, 2), 1e-8));
}

// tangential part of grad at x on the sphere through x
Eigen::VectorXd project_out(const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
  double n2 = x.squaredNorm();
  if (n2 <= 0.0) return g;
  return g - (g.dot(x) / n2) * x;
}

}  // namespace

Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& sigma) {
  const int N = static_cast<int>(sigma.size());
  double nrm = sigma.norm();
  if (!(nrm > 0.0)) throw domain_error("tangent_frame: zero vector");
  Eigen::VectorXd u = sigma / nrm;
  // Householder vector mapping e1 -> s*u, columns 2..N of the reflector span
  // the complement of u
  double s = u[0] >= 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd v = u;
  v[0] += s;
  double beta = 2.0 / v.squaredNorm();
  Eigen::MatrixXd Q(N, N - 1);
  for (int j = 1; j < N; ++j) {
    Eigen::VectorXd col = -beta * v[j] * v;
    col[j] += 1.0;
    Q.col(j - 1) = -s * col;
  }
  return Q;
}

Riemannian riemannian(const Hamiltonian& H, const Eigen::VectorXd& sigma) {
  const int N = H.size();
  double n2 = sigma.squaredNorm();
  if (std::fabs(n2 - N) > 1e-6 * N)
    throw domain_error("riemannian: point must lie on the sphere of radius sqrt(N)");
  double val;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  H.derivatives(sigma, val, grad, hess);
  Eigen::MatrixXd Q = tangent_frame(sigma);
  Riemannian out;
  out.radial = grad.dot(sigma) / std::sqrt(static_cast<double>(N));
  out.tangential = Q.transpose() * grad;
  out.hess_sp = Q.transpose() * hess * Q;
  out.hess_sp.diagonal().array() -= out.radial / std::sqrt(static_cast<double>(N));
  return out;
}

AscentResult ascend(const Hamiltonian& H, const Eigen::VectorXd& x0,
                    double radius, int max_steps, double gtol) {
  if (!(radius > 0.0)) throw domain_error("ascend: radius must be positive");
  const int N = H.size();
  AscentResult res;
  Eigen::VectorXd x = x0 * (radius / x0.norm());
  double val;
  Eigen::VectorXd grad;
  H.value_grad(x, val, grad);
  double step0 = initial_step(H.mixture());
  double step = step0;
  const double gstop = gtol * std::sqrt(static_cast<double>(N));

  for (int it = 0; it < max_steps; ++it) {
    Eigen::VectorXd gt = project_out(grad, x);
    res.grad_norm = gt.norm();
    if (res.grad_norm <= gstop) {
      res.converged = true;
      break;
    }
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      Eigen::VectorXd xn = x + step * gt;
      xn *= radius / xn.norm();
      double vn;
      Eigen::VectorXd gn;
      H.value_grad(xn, vn, gn);
      if (vn > val) {
        x = xn;
        val = vn;
        grad = gn;
        moved = true;
        step = std::min(step * 1.5, step0);
        break;
      }
      step *= 0.5;
    }
    ++res.steps;
    if (!moved) {
      // line search exhausted: numerically critical
      res.converged = res.grad_norm <= 1e-6 * std::sqrt(static_cast<double>(N));
      break;
    }
  }
  res.point = x;
  res.energy_density = val / N;
  return res;
}

AscentResult gs_estimate(const Hamiltonian& H, int restarts, std::uint64_t seed,
                         int max_steps) {
  if (restarts < 1) throw domain_error("gs_estimate: restarts >= 1");
  const int N = H.size();
  AscentResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    rng::Stream rs(rng::derive_key(seed, 0x675337, r));
    Eigen::VectorXd x0 = sphere_point(N, std::sqrt(static_cast<double>(N)), rs);
    AscentResult a = ascend(H, x0, std::sqrt(static_cast<double>(N)), max_steps);
    if (!have || a.energy_density > best.energy_density) {
      best = a;
      have = true;
    }
  }
  return best;
}

Eigen::VectorXd band_point(const Eigen::VectorXd& sigma, double q,
                           rng::Stream& rs) {
  const int N = static_cast<int>(sigma.size());
  Eigen::VectorXd u = project_out(gaussian_vec(N, rs), sigma);
  u *= std::sqrt((1.0 - q * q) * N) / u.norm();
  return q * sigma + u;
}

McEstimate band_free_energy(const Hamiltonian& H, const Eigen::VectorXd& sigma,
                            double q, int samples, std::uint64_t seed) {
  if (samples < 1) throw budget_error("band_free_energy: sample budget must be positive");
  if (!(std::fabs(q) < 1.0)) throw domain_error("band_free_energy: |q| < 1 required");
  const int N = H.size();
  rng::Stream rs(rng::derive_key(seed, 0xba4d));
  std::vector<double> vals(samples);
  double vmax = -1e300;
  for (int i = 0; i < samples; ++i) {
    vals[i] = H.value(band_point(sigma, q, rs));
    vmax = std::max(vmax, vals[i]);
  }
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    double e = std::exp(vals[i] - vmax);
    double d = e - mean;
    mean += d / (i + 1);
    m2 += d * (e - mean);
  }
  double var = samples > 1 ? m2 / (samples - 1) : 0.0;
  McEstimate out;
  out.samples = samples;
  out.value = (vmax + std::log(mean)) / N + 0.5 * std::log1p(-q * q);
  out.se = std::sqrt(var / samples) / (mean * N);  // delta method on log-mean
  return out;
}

AscentResult band_gs(const Hamiltonian& H, const Eigen::VectorXd& sigma,
                     double q, int restarts, std::uint64_t seed, int max_steps) {
  if (restarts < 1) throw domain_error("band_gs: restarts >= 1");
  const int N = H.size();
  if (std::fabs(q) >= 1.0 - 1e-12) {
    // the band degenerates to the single point q*sigma
    AscentResult r;
    r.point = q * sigma;
    r.energy_density = H.value(r.point) / N;
    r.converged = true;
    return r;
  }
  const double wr = std::sqrt((1.0 - q * q) * N);
  const double step0 = initial_step(H.mixture());
  const double gstop = 1e-8 * std::sqrt(static_cast<double>(N));
  AscentResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    rng::Stream rs(rng::derive_key(seed, 0xba4d95, r));
    Eigen::VectorXd w = project_out(gaussian_vec(N, rs), sigma);
    w *= wr / w.norm();
    Eigen::VectorXd x = q * sigma + w;
    double val;
    Eigen::VectorXd grad;
    H.value_grad(x, val, grad);
    double step = step0;
    AscentResult res;
    for (int it = 0; it < max_steps; ++it) {
      Eigen::VectorXd gt = project_out(project_out(grad, sigma), w);
      res.grad_norm = gt.norm();
      if (res.grad_norm <= gstop) {
        res.converged = true;
        break;
      }
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        Eigen::VectorXd wn = project_out(w + step * gt, sigma);
        wn *= wr / wn.norm();
        Eigen::VectorXd xn = q * sigma + wn;
        double vn;
        Eigen::VectorXd gn;
        H.value_grad(xn, vn, gn);
        if (vn > val) {
          w = wn;
          x = xn;
          val = vn;
          grad = gn;
          moved = true;
          step = std::min(step * 1.5, step0);
          break;
        }
        step *= 0.5;
      }
      ++res.steps;
      if (!moved) {
        res.converged = res.grad_norm <= 1e-6 * std::sqrt(static_cast<double>(N));
        break;
      }
    }
    res.point = x;
    res.energy_density = val / N;
    if (!have || res.energy_density > best.energy_density) {
      best = res;
      have = true;
    }
  }
  return best;
}

McEstimate free_energy_estimate(const Hamiltonian& H, int samples,
                                std::uint64_t seed) {
  if (samples < 1) throw budget_error("free_energy_estimate: sample budget must be positive");
  const int N = H.size();
  rng::Stream rs(rng::derive_key(seed, 0xf4ee));
  std::vector<double> vals(samples);
  double vmax = -1e300;
  for (int i = 0; i < samples; ++i) {
    vals[i] = H.value(sphere_point(N, std::sqrt(static_cast<double>(N)), rs));
    vmax = std::max(vmax, vals[i]);
  }
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    double e = std::exp(vals[i] - vmax);
    double d = e - mean;
    mean += d / (i + 1);
    m2 += d * (e - mean);
  }
  double var = samples > 1 ? m2 / (samples - 1) : 0.0;
  McEstimate out;
  out.samples = samples;
  out.value = (vmax + std::log(mean)) / N;
  out.se = std::sqrt(var / samples) / (mean * N);
  return out;
}

}  // namespace spinlab
