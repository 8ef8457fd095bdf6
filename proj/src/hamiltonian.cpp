#include "spinlab/hamiltonian.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "spinlab/errors.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

namespace {

const double kFact[17] = {1.,      1.,       2.,        6.,         24.,
                          120.,    720.,     5040.,     40320.,     362880.,
                          3628800., 39916800., 479001600., 6227020800.,
                          87178291200., 1307674368000., 20922789888000.};

// sqrt of the multinomial p! / prod(run!) for a sorted tuple
double sqrt_mult(const int* idx, int p) {
  double denom = 1.0;
  int run = 1;
  for (int j = 1; j < p; ++j) {
    if (idx[j] == idx[j - 1]) ++run; else run = 1;
    denom *= run;
  }
  return std::sqrt(kFact[p] / denom);
}

// advance a sorted (nondecreasing) tuple in lexicographic order
bool next_tuple(int* idx, int p, int N) {
  for (int j = p - 1; j >= 0; --j) {
    if (idx[j] < N - 1) {
      int v = idx[j] + 1;
      for (int t = j; t < p; ++t) idx[t] = v;
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t Hamiltonian::tensor_count(int N, int p) {
  // C(N+p-1, p), exact in 64 bits for every size the cap admits
  std::size_t c = 1;
  for (int j = 1; j <= p; ++j) c = c * (N - 1 + j) / j;
  return c;
}

Hamiltonian::Hamiltonian(const Mixture& m, int N, std::uint64_t seed,
                         std::size_t memory_cap_bytes)
    : mix_(m), N_(N), seed_(seed) {
  if (N < 1) throw domain_error("hamiltonian: N must be positive");
  int P = m.max_degree();
  coef_.resize(P);
  scale_.assign(P, 0.0);

  // pre-flight the memory bill in floating point so huge degrees can't
  // overflow the exact count
  double total = 0.0;
  for (int p = 1; p <= P; ++p) {
    if (m.gamma(p) == 0.0) continue;
    double c = 1.0;
    for (int j = 1; j <= p; ++j) c *= static_cast<double>(N - 1 + j) / j;
    total += 4.0 * c;
    if (total > static_cast<double>(memory_cap_bytes))
      throw budget_error("hamiltonian: coefficient storage for degree " +
                         std::to_string(p) + " exceeds the memory cap (" +
                         std::to_string(memory_cap_bytes) + " bytes)");
  }

  for (int p = 1; p <= P; ++p) {
    if (m.gamma(p) == 0.0) continue;
    scale_[p - 1] = m.gamma(p) * std::pow(static_cast<double>(N), -(p - 1) / 2.0);
    std::size_t count = tensor_count(N, p);
    std::vector<float>& w = coef_[p - 1];
    w.resize(count);
    std::uint64_t key = rng::derive_key(seed, static_cast<std::uint64_t>(p));
    int idx[16];
    for (int j = 0; j < p; ++j) idx[j] = 0;
    std::size_t r = 0;
    do {
      w[r] = static_cast<float>(sqrt_mult(idx, p) * rng::gaussian(key, r));
      ++r;
    } while (next_tuple(idx, p, N));
  }
}

double Hamiltonian::value(const Eigen::VectorXd& x) const {
  double H;
  Eigen::VectorXd g;
  value_grad(x, H, g);  // the prefix structure makes grad nearly free
  return H;
}

void Hamiltonian::value_grad(const Eigen::VectorXd& x, double& H,
                             Eigen::VectorXd& grad) const {
  if (x.size() != N_) throw domain_error("hamiltonian: dimension mismatch");
  const int N = N_;
  H = 0.0;
  grad.setZero(N);
  double* g = grad.data();
  const double* xv = x.data();

  for (int p = 1; p <= mix_.max_degree(); ++p) {
    const std::vector<float>& w = coef_[p - 1];
    if (w.empty()) continue;
    const double sc = scale_[p - 1];
    const float* wp = w.data();

    if (p == 1) {
      double s0 = 0.0;
      for (int a = 0; a < N; ++a) {
        s0 += wp[a] * xv[a];
        g[a] += sc * wp[a];
      }
      H += sc * s0;
    } else if (p == 2) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a], ga = sc * xa;
        double s0 = 0.0;
        for (int b = a; b < N; ++b) {
          const double wd = wp[b - a];
          s0 += wd * xv[b];
          g[b] += ga * wd;
        }
        H += ga * s0;
        g[a] += sc * s0;
        wp += N - a;
      }
    } else if (p == 3) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a];
        for (int b = a; b < N; ++b) {
          const double xb = xv[b], gc = sc * xa * xb;
          double s0 = 0.0;
          for (int c = b; c < N; ++c) {
            const double wd = wp[c - b];
            s0 += wd * xv[c];
            g[c] += gc * wd;
          }
          H += gc * s0;
          g[a] += sc * xb * s0;
          g[b] += sc * xa * s0;
          wp += N - b;
        }
      }
    } else if (p == 4) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a];
        for (int b = a; b < N; ++b) {
          const double xab = xa * xv[b];
          for (int c = b; c < N; ++c) {
            const double xc = xv[c], gd = sc * xab * xc;
            double s0 = 0.0;
            for (int d = c; d < N; ++d) {
              const double wd = wp[d - c];
              s0 += wd * xv[d];
              g[d] += gd * wd;
            }
            H += gd * s0;
            g[a] += sc * xv[b] * xc * s0;
            g[b] += sc * xa * xc * s0;
            g[c] += sc * xab * s0;
            wp += N - c;
          }
        }
      }
    } else {
      int idx[16];
      for (int j = 0; j < p; ++j) idx[j] = 0;
      std::size_t r = 0;
      do {
        const double wd = sc * wp[r++];
        for (int s = 0; s < p; ++s) {
          double prod = wd;
          for (int t = 0; t < p; ++t)
            if (t != s) prod *= xv[idx[t]];
          g[idx[s]] += prod;
          if (s == 0) H += prod * xv[idx[0]];
        }
      } while (next_tuple(idx, p, N));
    }
  }
}

void Hamiltonian::derivatives(const Eigen::VectorXd& x, double& H,
                              Eigen::VectorXd& grad,
                              Eigen::MatrixXd& hess) const {
  if (x.size() != N_) throw domain_error("hamiltonian: dimension mismatch");
  const int N = N_;
  H = 0.0;
  grad.setZero(N);
  // row-major upper-triangular accumulator over unordered slot pairs;
  // diagonal doubles at the end
  std::vector<double> U(static_cast<std::size_t>(N) * N, 0.0);
  double* g = grad.data();
  const double* xv = x.data();

  for (int p = 1; p <= mix_.max_degree(); ++p) {
    const std::vector<float>& w = coef_[p - 1];
    if (w.empty()) continue;
    const double sc = scale_[p - 1];
    const float* wp = w.data();

    if (p == 1) {
      double s0 = 0.0;
      for (int a = 0; a < N; ++a) {
        s0 += wp[a] * xv[a];
        g[a] += sc * wp[a];
      }
      H += sc * s0;
    } else if (p == 2) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a], ga = sc * xa;
        double* Ua = U.data() + static_cast<std::size_t>(a) * N;
        double s0 = 0.0;
        for (int b = a; b < N; ++b) {
          const double wd = wp[b - a];
          s0 += wd * xv[b];
          g[b] += ga * wd;
          Ua[b] += sc * wd;
        }
        H += ga * s0;
        g[a] += sc * s0;
        wp += N - a;
      }
    } else if (p == 3) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a];
        double* Ua = U.data() + static_cast<std::size_t>(a) * N;
        for (int b = a; b < N; ++b) {
          const double xb = xv[b], gc = sc * xa * xb;
          const double fa = sc * xb, fb = sc * xa;
          double* Ub = U.data() + static_cast<std::size_t>(b) * N;
          double s0 = 0.0;
          for (int c = b; c < N; ++c) {
            const double wd = wp[c - b];
            s0 += wd * xv[c];
            g[c] += gc * wd;
            Ua[c] += fa * wd;
            Ub[c] += fb * wd;
          }
          H += gc * s0;
          g[a] += fa * s0;
          g[b] += fb * s0;
          Ua[b] += sc * s0;
          wp += N - b;
        }
      }
    } else if (p == 4) {
      for (int a = 0; a < N; ++a) {
        const double xa = xv[a];
        double* Ua = U.data() + static_cast<std::size_t>(a) * N;
        for (int b = a; b < N; ++b) {
          const double xb = xv[b], xab = xa * xb;
          double* Ub = U.data() + static_cast<std::size_t>(b) * N;
          for (int c = b; c < N; ++c) {
            const double xc = xv[c];
            const double gd = sc * xab * xc;
            const double fa = sc * xb * xc, fb = sc * xa * xc, fc = sc * xab;
            double* Uc = U.data() + static_cast<std::size_t>(c) * N;
            double s0 = 0.0;
            for (int d = c; d < N; ++d) {
              const double wd = wp[d - c];
              const double xd = xv[d];
              s0 += wd * xd;
              g[d] += gd * wd;
              Ua[d] += fa * wd;
              Ub[d] += fb * wd;
              Uc[d] += fc * wd;
            }
            H += gd * s0;
            g[a] += fa * s0;
            g[b] += fb * s0;
            g[c] += fc * s0;
            Ua[b] += sc * xc * s0;
            Ua[c] += sc * xb * s0;
            Ub[c] += sc * xa * s0;
            wp += N - c;
          }
        }
      }
    } else {
      int idx[16];
      for (int j = 0; j < p; ++j) idx[j] = 0;
      std::size_t r = 0;
      do {
        const double wd = sc * wp[r++];
        double full = wd;
        for (int t = 0; t < p; ++t) full *= xv[idx[t]];
        H += full;
        for (int s = 0; s < p; ++s) {
          double prod = wd;
          for (int t = 0; t < p; ++t)
            if (t != s) prod *= xv[idx[t]];
          g[idx[s]] += prod;
          for (int t = s + 1; t < p; ++t) {
            double pr2 = wd;
            for (int u = 0; u < p; ++u)
              if (u != s && u != t) pr2 *= xv[idx[u]];
            U[static_cast<std::size_t>(idx[s]) * N + idx[t]] += pr2;
          }
        }
      } while (next_tuple(idx, p, N));
    }
  }

  hess.resize(N, N);
  for (int i = 0; i < N; ++i) {
    const double* Ui = U.data() + static_cast<std::size_t>(i) * N;
    hess(i, i) = 2.0 * Ui[i];
    for (int j = i + 1; j < N; ++j) {
      hess(i, j) = Ui[j];
      hess(j, i) = Ui[j];
    }
  }
}

}  // namespace spinlab
