#include "spinlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinlab/errors.hpp"
#include "spinlab/quadrature.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> piece_nodes(const std::vector<double>& breakpoints) {
  std::vector<double> nodes;
  nodes.push_back(0.0);
  for (double q : breakpoints)
    if (q > nodes.back() + 1e-15 && q < 1.0) nodes.push_back(q);
  if (nodes.back() < 1.0) nodes.push_back(1.0);
  return nodes;
}

// ---------------------------------------------------------------- Nelder-Mead

using Vec = std::vector<double>;

struct NMOut {
  Vec x;
  double value = kInf;
};

template <class F>
NMOut nelder_mead(const F& f, const Vec& x0, double scale, int maxiter,
                  double ftol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Vec> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i)
    pts[i + 1][i] += scale * (std::fabs(x0[i]) > 0.1 ? std::fabs(x0[i]) : 0.1);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    std::vector<Vec> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (int i = 0; i <= n; ++i) { p2[i] = pts[idx[i]]; v2[i] = vals[idx[i]]; }
    pts.swap(p2);
    vals.swap(v2);
  };
  order();

  for (int it = 0; it < maxiter; ++it) {
    if (std::fabs(vals[n] - vals[0]) <= ftol * (1.0 + std::fabs(vals[0])))
      break;
    Vec centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;
    auto blend = [&](double t) {
      Vec y(n);
      for (int j = 0; j < n; ++j)
        y[j] = centroid[j] + t * (pts[n][j] - centroid[j]);
      return y;
    };
    Vec xr = blend(-1.0);
    double fr = f(xr);
    if (fr < vals[0]) {
      Vec xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) { pts[n] = xe; vals[n] = fe; }
      else { pts[n] = xr; vals[n] = fr; }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      Vec xc = blend(fr < vals[n] ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, vals[n])) { pts[n] = xc; vals[n] = fc; }
      else {
        for (int i = 1; i <= n; ++i) {
          for (int j = 0; j < n; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  return {pts[0], vals[0]};
}

// Damped-Newton root-finding on an analytic gradient with simple lower
// bounds; frees/freezes bound-pinned coordinates by the sign of the gradient.
template <class GradF, class FeasF>
bool polish_newton(Vec& theta, const GradF& grad, const FeasF& feasible,
                   const Vec& lower, int iters = 80, double gtol = 1e-12) {
  const int n = static_cast<int>(theta.size());
  Vec g = grad(theta);
  auto active = [&](const Vec& th, const Vec& gr, int i) {
    return th[i] <= lower[i] + 1e-12 && gr[i] > 0.0;
  };
  double gn0 = 0.0;
  for (int i = 0; i < n; ++i)
    if (!active(theta, g, i)) gn0 = std::max(gn0, std::fabs(g[i]));
  for (int it = 0; it < iters; ++it) {
    double gn = 0.0;
    for (int i = 0; i < n; ++i)
      if (!active(theta, g, i)) gn = std::max(gn, std::fabs(g[i]));
    if (gn < gtol) return true;
    // finite-difference Jacobian of the gradient (symmetric in exact math)
    std::vector<Vec> J(n, Vec(n, 0.0));
    for (int j = 0; j < n; ++j) {
      double h = 1e-7 * (1.0 + std::fabs(theta[j]));
      Vec tp = theta, tm = theta;
      tp[j] += h;
      tm[j] -= h;
      bool okp = feasible(tp), okm = feasible(tm);
      if (!okp && !okm) continue;
      Vec gp = okp ? grad(tp) : g;
      Vec gm = okm ? grad(tm) : g;
      double den = (okp ? h : 0.0) + (okm ? h : 0.0);
      for (int i = 0; i < n; ++i) J[i][j] = (gp[i] - gm[i]) / den;
    }
    // solve (J + lambda I) d = -g on the free coordinates, Levenberg damping
    double lambda = 1e-10;
    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt, lambda *= 10) {
      std::vector<Vec> A(n, Vec(n + 1, 0.0));
      for (int i = 0; i < n; ++i) {
        bool ai = active(theta, g, i);
        for (int j = 0; j < n; ++j)
          A[i][j] = (ai || active(theta, g, j)) ? (i == j ? 1.0 : 0.0) : J[i][j];
        if (i < n) A[i][i] += lambda;
        A[i][n] = ai ? 0.0 : -g[i];
      }
      // Gaussian elimination with partial pivoting
      bool singular = false;
      for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
          if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        if (std::fabs(A[piv][c]) < 1e-300) { singular = true; break; }
        std::swap(A[c], A[piv]);
        for (int r = 0; r < n; ++r) {
          if (r == c) continue;
          double fct = A[r][c] / A[c][c];
          for (int cc = c; cc <= n; ++cc) A[r][cc] -= fct * A[c][cc];
        }
      }
      if (singular) continue;
      Vec d(n);
      for (int i = 0; i < n; ++i) d[i] = A[i][n] / A[i][i];
      // backtrack on the step until feasible and gradient shrinks
      double t = 1.0;
      for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
        Vec cand = theta;
        for (int i = 0; i < n; ++i)
          cand[i] = std::max(lower[i], theta[i] + t * d[i]);
        if (!feasible(cand)) continue;
        Vec gc = grad(cand);
        double gnc = 0.0;
        for (int i = 0; i < n; ++i)
          if (!active(cand, gc, i)) gnc = std::max(gnc, std::fabs(gc[i]));
        if (gnc < gn * (1.0 - 1e-4 * t) || gnc < gtol) {
          theta = cand;
          g = gc;
          stepped = true;
          break;
        }
      }
    }
    if (!stepped) return false;
  }
  double gn = 0.0;
  for (int i = 0; i < n; ++i)
    if (!active(theta, g, i)) gn = std::max(gn, std::fabs(g[i]));
  return gn < 1e-9;
}

// ------------------------------------------------ CS parameter vector helpers

// theta = (q_1..q_k, m_1..m_{k-1}); the last mass is 1 - sum of the others.
OrderParamFT make_ft(const Vec& theta, int k) {
  std::vector<double> q(theta.begin(), theta.begin() + k);
  std::vector<double> m(k);
  double rest = 1.0;
  for (int i = 0; i + 1 < k; ++i) { m[i] = theta[k + i]; rest -= m[i]; }
  m[k - 1] = rest;
  OrderParamFT x;
  double cum = 0.0;
  for (int i = 0; i < k; ++i) {
    cum += m[i];
    if (cum <= 1e-14) continue;  // no mass yet -> x still 0 below
    if (!x.breakpoints.empty() && q[i] <= x.breakpoints.back() + 1e-13) {
      x.values.back() = std::min(1.0, cum);
      continue;
    }
    x.breakpoints.push_back(q[i]);
    x.values.push_back(std::min(1.0, cum));
  }
  if (!x.values.empty()) x.values.back() = 1.0;
  return x;
}

bool ft_feasible(const Vec& theta, int k) {
  double prev = -1e-300;
  for (int i = 0; i < k; ++i) {
    if (!(theta[i] >= 0.0 && theta[i] <= 0.99995 && theta[i] >= prev)) return false;
    prev = theta[i];
  }
  double sum = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    if (theta[k + i] < 0.0) return false;
    sum += theta[k + i];
  }
  return sum <= 1.0 + 1e-12;
}

// theta = (L, t_1..t_k, c_1..c_k) with c_i the increments of alpha.
OrderParamZT make_zt(const Vec& theta, int k) {
  OrderParamZT p;
  p.L = theta[0];
  double cum = 0.0;
  for (int i = 0; i < k; ++i) {
    double t = theta[1 + i], c = theta[1 + k + i];
    cum += std::max(0.0, c);
    if (!p.breakpoints.empty() && t <= p.breakpoints.back() + 1e-13) {
      p.values.back() = cum;
      continue;
    }
    p.breakpoints.push_back(t);
    p.values.push_back(cum);
  }
  return p;
}

bool zt_feasible(const Vec& theta, int k) {
  if (!(theta[0] > 1e-8)) return false;
  double prev = -1e-300, hat1 = theta[0];
  for (int i = 0; i < k; ++i) {
    double t = theta[1 + i], c = theta[1 + k + i];
    if (!(t >= 0.0 && t <= 0.99995 && t >= prev) || c < 0.0) return false;
    prev = t;
    hat1 -= c * (1.0 - t);
  }
  return hat1 > 1e-10;
}

}  // namespace

// ------------------------------------------------------------- IntervalSet

bool IntervalSet::contains(double q, double tol) const {
  for (const auto& [a, b] : intervals)
    if (q >= a - tol && q <= b + tol) return true;
  return false;
}

bool IntervalSet::is_single_atom(double q, double tol) const {
  return intervals.size() == 1 && std::fabs(intervals[0].first - q) <= tol &&
         std::fabs(intervals[0].second - q) <= tol;
}

std::vector<double> IntervalSet::endpoints(double merge_tol) const {
  std::vector<double> out;
  for (const auto& [a, b] : intervals) {
    if (out.empty() || a > out.back() + merge_tol) out.push_back(a);
    if (b > out.back() + merge_tol) out.push_back(b);
  }
  return out;
}

std::string IntervalSet::str() const {
  std::ostringstream ss;
  for (const auto& [a, b] : intervals) {
    if (ss.tellp() > 0) ss << " ";
    if (b - a < 1e-12) ss << "{" << a << "}";
    else ss << "[" << a << "," << b << "]";
  }
  return ss.str();
}

std::string to_string(ModelType t) {
  switch (t) {
    case ModelType::TopologicallyTrivial: return "TopologicallyTrivial";
    case ModelType::StrictlyRS: return "StrictlyRS";
    case ModelType::Strictly1RSB: return "Strictly1RSB";
    case ModelType::StrictlyFRSB: return "StrictlyFRSB";
    default: return "Composite";
  }
}

// ------------------------------------------------------------- functionals

double cs_value(const XiFun& xi, const OrderParamFT& x) {
  x.validate();
  double qh = x.qhat();
  double t1 = xi(0.0, 1) * x.xhat(0.0);
  double t2 = 0.0;
  auto nodes = piece_nodes(x.breakpoints);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
    t2 += quad::gl16([&](double q) { return xi(q, 2) * x.xhat(q); }, nodes[j],
                     nodes[j + 1]);
  double t3 = integral_inv_xhat(x, 0.0, qh);
  double t4 = std::log1p(-qh);
  return 0.5 * (t1 + t2 + t3 + t4);
}

double zt_value(const XiFun& xi, const OrderParamZT& p) {
  p.validate();
  double t1 = xi(0.0, 1) * p.L;
  double t2 = 0.0;
  auto nodes = piece_nodes(p.breakpoints);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
    t2 += quad::gl16([&](double q) { return xi(q, 2) * p.alphahat(q); },
                     nodes[j], nodes[j + 1]);
  double t3 = integral_inv_ahat(p, 0.0, 1.0);
  return 0.5 * (t1 + t2 + t3);
}

double F_of(const XiFun& xi, const OrderParamFT& x, double q) {
  return xi(q, 1) - integral_inv_xhat_sq(x, 0.0, q);
}

double f_of(const XiFun& xi, const OrderParamFT& x, double s) {
  return xi(s, 0) - xi(0.0, 0) -
         integral_affine_inv_xhat_sq(x, 0.0, s, s, -1.0);
}

double G_of(const XiFun& xi, const OrderParamZT& p, double q) {
  return xi(q, 1) - integral_inv_ahat_sq(p, 0.0, q);
}

double g_of(const XiFun& xi, const OrderParamZT& p, double s) {
  double tail = (1.0 - s) * integral_inv_ahat_sq(p, 0.0, s) +
                integral_affine_inv_ahat_sq(p, s, 1.0, 1.0, -1.0);
  return xi(1.0, 0) - xi(s, 0) - tail;
}

// ------------------------------------------------------------- minimizers

CsResult minimize_cs(const XiFun& xi, const MinimizeOptions& opt) {
  if (opt.max_levels < 1) throw domain_error("minimize_cs: max_levels >= 1");
  rng::Stream stream(rng::derive_key(opt.seed, 0xC5));

  CsResult best{OrderParamFT{{0.0}, {1.0}}, kInf, false};

  for (int k = 1; k <= opt.max_levels; ++k) {
    const int n = 2 * k - 1;
    auto objective = [&](const Vec& th) -> double {
      if (!ft_feasible(th, k)) return kInf;
      OrderParamFT x = make_ft(th, k);
      if (x.breakpoints.empty()) return kInf;
      return cs_value(xi, x);
    };

    // deterministic seed: evenly spread atoms, equal masses
    std::vector<Vec> starts;
    {
      Vec th(n);
      for (int i = 0; i < k; ++i) th[i] = i * (0.6 / k);
      for (int i = 0; i + 1 < k; ++i) th[k + i] = 1.0 / k;
      starts.push_back(th);
    }
    for (int r = 1; r < opt.restarts; ++r) {
      Vec th(n);
      std::vector<double> qs(k);
      for (int i = 0; i < k; ++i) qs[i] = 0.95 * stream.uniform();
      std::sort(qs.begin(), qs.end());
      for (int i = 0; i < k; ++i) th[i] = qs[i];
      std::vector<double> w(k);
      double tot = 0.0;
      for (int i = 0; i < k; ++i) { w[i] = 0.05 + stream.uniform(); tot += w[i]; }
      for (int i = 0; i + 1 < k; ++i) th[k + i] = w[i] / tot;
      starts.push_back(th);
    }

    NMOut bk;
    for (const auto& s0 : starts) {
      if (!ft_feasible(s0, k)) continue;
      NMOut r = nelder_mead(objective, s0, 0.08, 250 * n + 200, 1e-13);
      if (r.value < bk.value) bk = r;
    }
    if (!(bk.value < kInf)) continue;

    // polish: Newton on the analytic gradient of the functional
    auto grad = [&](const Vec& th) {
      OrderParamFT x = make_ft(th, k);
      Vec g(n, 0.0);
      double fq_last = f_of(xi, x, th[k - 1]);
      double msum = 0.0;
      for (int i = 0; i + 1 < k; ++i) msum += th[k + i];
      for (int i = 0; i < k; ++i) {
        double mi = (i + 1 < k) ? th[k + i] : 1.0 - msum;
        g[i] = -0.5 * mi * F_of(xi, x, th[i]);
      }
      for (int i = 0; i + 1 < k; ++i)
        g[k + i] = 0.5 * (fq_last - f_of(xi, x, th[i]));
      return g;
    };
    Vec lower(n, 0.0);
    Vec th = bk.x;
    bool ok = polish_newton(
        th, grad, [&](const Vec& t) { return ft_feasible(t, k); }, lower);
    double val = objective(th);
    if (val > bk.value) { th = bk.x; val = bk.value; }

    if (val < best.value - opt.tol) {
      best.x = make_ft(th, k);
      best.value = val;
      best.converged = ok;
    }
  }
  if (!(best.value < kInf))
    throw budget_error("minimize_cs: no feasible order parameter found");
  return best;
}

ZtResult minimize_zt(const XiFun& xi, const MinimizeOptions& opt) {
  rng::Stream stream(rng::derive_key(opt.seed, 0x27));
  double xi1p = xi(1.0, 1);
  if (!(xi1p > 0.0)) throw domain_error("minimize_zt: xi'(1) must be > 0");

  ZtResult best{OrderParamZT{}, kInf, false};

  for (int k = 0; k <= opt.max_levels; ++k) {
    const int n = 1 + 2 * k;
    auto objective = [&](const Vec& th) -> double {
      if (!zt_feasible(th, k)) return kInf;
      return zt_value(xi, make_zt(th, k));
    };

    std::vector<Vec> starts;
    {
      Vec th(n, 0.0);
      th[0] = 1.0 / std::sqrt(xi1p);
      for (int i = 0; i < k; ++i) th[1 + i] = i * (0.5 / std::max(1, k));
      for (int i = 0; i < k; ++i) th[1 + k + i] = 0.2 * th[0] / std::max(1, k);
      starts.push_back(th);
    }
    // closed-form 1RSB candidate as a warm start when it applies
    if (k >= 1 && std::fabs(xi(0.0, 1)) < 1e-14) {
      double ratio = xi(1.0, 0) / xi1p;
      if (ratio > 0.0 && ratio <= 0.5 + 1e-9) {
        double z = (std::fabs(ratio - 0.5) < 1e-9) ? 0.0 : solve_upsilon(ratio);
        double y = std::sqrt((1.0 + z) * xi1p);
        Vec th(n, 0.0);
        th[0] = (1.0 + z) / y;
        th[1] = 0.0;
        th[1 + k] = z / y;
        for (int i = 1; i < k; ++i) { th[1 + i] = 0.5 + 0.4 * i / k; }
        starts.push_back(th);
      }
    }
    for (int r = 1; r < opt.restarts; ++r) {
      Vec th(n);
      th[0] = (0.3 + 1.7 * stream.uniform()) / std::sqrt(xi1p);
      std::vector<double> ts(k);
      for (int i = 0; i < k; ++i) ts[i] = 0.95 * stream.uniform();
      std::sort(ts.begin(), ts.end());
      for (int i = 0; i < k; ++i) th[1 + i] = ts[i];
      for (int i = 0; i < k; ++i)
        th[1 + k + i] = stream.uniform() * th[0] / (2.0 * k);
      starts.push_back(th);
    }

    NMOut bk;
    for (const auto& s0 : starts) {
      if (!zt_feasible(s0, k)) continue;
      NMOut r = nelder_mead(objective, s0, 0.08, 250 * n + 200, 1e-13);
      if (r.value < bk.value) bk = r;
    }
    if (!(bk.value < kInf)) continue;

    auto grad = [&](const Vec& th) {
      OrderParamZT p = make_zt(th, k);
      Vec g(n, 0.0);
      double G1 = G_of(xi, p, 1.0);
      g[0] = 0.5 * G1;
      for (int i = 0; i < k; ++i) {
        double t = th[1 + i], c = th[1 + k + i];
        g[1 + i] = 0.5 * c * (G1 - G_of(xi, p, t));
        g[1 + k + i] = 0.5 * (g_of(xi, p, t) - (1.0 - t) * G1);
      }
      return g;
    };
    Vec lower(n, 0.0);
    lower[0] = 1e-8;
    Vec th = bk.x;
    bool ok = polish_newton(
        th, grad, [&](const Vec& t) { return zt_feasible(t, k); }, lower);
    double val = objective(th);
    if (val > bk.value) { th = bk.x; val = bk.value; }

    if (val < best.value - opt.tol) {
      best.p = make_zt(th, k);
      best.value = val;
      best.converged = ok;
    }
  }
  if (!(best.value < kInf))
    throw budget_error("minimize_zt: no feasible order parameter found");
  // drop zero increments for a clean report
  OrderParamZT clean;
  clean.L = best.p.L;
  double prev = 0.0;
  for (std::size_t i = 0; i < best.p.breakpoints.size(); ++i) {
    if (best.p.values[i] > prev + 1e-12) {
      clean.breakpoints.push_back(best.p.breakpoints[i]);
      clean.values.push_back(best.p.values[i]);
      prev = best.p.values[i];
    }
  }
  best.p = clean;
  return best;
}

// ------------------------------------------------------------- S and T sets

namespace {

IntervalSet detect_intervals(const std::vector<double>& grid,
                             const std::vector<bool>& mark, int gap_cells) {
  IntervalSet out;
  const int n = static_cast<int>(grid.size());
  int i = 0;
  while (i < n) {
    if (!mark[i]) { ++i; continue; }
    int j = i, last = i;
    while (j < n) {
      if (mark[j]) { last = j; ++j; }
      else if (j - last <= gap_cells) ++j;
      else break;
    }
    out.intervals.emplace_back(grid[i], grid[last]);
    i = last + 1;
  }
  return out;
}

// sharpen an interval endpoint by bisection on pred(q) (true inside)
template <class Pred>
double refine_edge(const Pred& inside, double in_pt, double out_pt) {
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (in_pt + out_pt);
    (inside(mid) ? in_pt : out_pt) = mid;
  }
  return in_pt;
}

}  // namespace

IntervalSet compute_S(const XiFun& xi, const OrderParamFT& x,
                      const SetOptions& opt) {
  const int n = opt.grid;
  std::vector<double> grid(n), fv(n);
  double fmax = -kInf;
  for (int i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / (n - 1);
    fv[i] = f_of(xi, x, grid[i]);
    fmax = std::max(fmax, fv[i]);
  }
  // golden-section around the grid argmax to catch an off-grid peak
  {
    int im = static_cast<int>(std::max_element(fv.begin(), fv.end()) - fv.begin());
    double a = grid[std::max(0, im - 1)], b = grid[std::min(n - 1, im + 1)];
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 60; ++it) {
      if (f_of(xi, x, c) > f_of(xi, x, d)) { b = d; d = c; c = b - gr * (b - a); }
      else { a = c; c = d; d = a + gr * (b - a); }
    }
    fmax = std::max(fmax, f_of(xi, x, 0.5 * (a + b)));
  }
  double tol = opt.tol > 0 ? opt.tol : 1e-7 * (1.0 + std::fabs(fmax));
  std::vector<bool> mark(n);
  for (int i = 0; i < n; ++i) mark[i] = (fmax - fv[i] <= tol);
  IntervalSet s = detect_intervals(grid, mark, 2);
  auto inside = [&](double q) { return fmax - f_of(xi, x, q) <= tol; };
  double h = 1.0 / (n - 1);
  for (auto& [a, b] : s.intervals) {
    if (a > 0.0) a = refine_edge(inside, a, std::max(0.0, a - h));
    if (b < 1.0) b = refine_edge(inside, b, std::min(1.0, b + h));
  }
  return s;
}

TReport compute_T(const XiFun& xi, const OrderParamZT& p,
                  const SetOptions& opt) {
  const int n = opt.grid;
  std::vector<double> grid(n), gv(n);
  double gmax = 0.0, gmin = kInf;
  for (int i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / (n - 1);
    gv[i] = g_of(xi, p, grid[i]);
    gmax = std::max(gmax, std::fabs(gv[i]));
    gmin = std::min(gmin, gv[i]);
  }
  double tol = opt.tol > 0 ? opt.tol : 1e-7 * (1.0 + gmax);
  std::vector<bool> mark(n);
  for (int i = 0; i < n; ++i) mark[i] = (std::fabs(gv[i]) <= tol);
  TReport rep;
  rep.T = detect_intervals(grid, mark, 2);
  auto inside = [&](double q) { return std::fabs(g_of(xi, p, q)) <= tol; };
  double h = 1.0 / (n - 1);
  for (auto& [a, b] : rep.T.intervals) {
    if (a > 0.0) a = refine_edge(inside, a, std::max(0.0, a - h));
    if (b < 1.0) b = refine_edge(inside, b, std::min(1.0, b + h));
  }
  rep.G1 = G_of(xi, p, 1.0);
  rep.min_g = gmin;
  rep.mass_outside = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
    double c = p.values[i] - prev;
    prev = p.values[i];
    if (!rep.T.contains(p.breakpoints[i], 2.0 * h)) rep.mass_outside += c;
  }
  return rep;
}

// ------------------------------------------------------------- classification

namespace {

// sign of d^2/dq^2 [xi''(q)^(-1/2)] is the sign of 3 xi'''^2 - 2 xi'' xi''''
double curvature_witness(const Mixture& m, double q) {
  auto d = [&](int order) {
    double acc = 0.0;
    for (int p = order; p <= m.max_degree(); ++p) {
      double fac = 1.0;
      for (int k = 0; k < order; ++k) fac *= (p - k);
      acc += fac * m.gamma(p) * m.gamma(p) * std::pow(q, p - order);
    }
    return acc;
  };
  return 3.0 * d(3) * d(3) - 2.0 * d(2) * d(4);
}

}  // namespace

ModelType classify(const Mixture& m, const MinimizeOptions& opt) {
  const XiFun xi = fn(m);
  if (m.has_field()) {
    if (m.xi(1.0, 1) >= m.xi(1.0, 2)) {
      ZtResult zr = minimize_zt(xi, opt);
      TReport tr = compute_T(xi, zr.p);
      if (tr.T.is_single_atom(1.0, 1e-3)) return ModelType::TopologicallyTrivial;
    }
    return ModelType::Composite;
  }

  if (m.max_degree() == 2) {
    // pure 2-spin: xi''^(-1/2) is constant (both convex and concave); the
    // finite-temperature structure decides
    CsResult cr = minimize_cs(xi, opt);
    IntervalSet s = compute_S(xi, cr.x);
    return s.is_single_atom(0.0, 1e-3) ? ModelType::StrictlyRS
                                       : ModelType::StrictlyFRSB;
  }

  bool convex = true, concave = true, strictly_concave = false;
  for (int i = 1; i <= 999; ++i) {
    double w = curvature_witness(m, i / 1000.0);
    if (w < -1e-12) convex = false;
    if (w > 1e-12) concave = false;
    if (w < -1e-9) strictly_concave = true;
  }
  if (convex) return ModelType::Strictly1RSB;
  if (concave && strictly_concave && m.xi(0.0, 2) > 0.0)
    return ModelType::StrictlyFRSB;

  ZtResult zr = minimize_zt(xi, opt);
  TReport tr = compute_T(xi, zr.p);
  if (tr.T.intervals.size() == 2 && tr.T.is_single_atom(0.0, 1e-3) == false) {
    const auto& t0 = tr.T.intervals[0];
    const auto& t1 = tr.T.intervals[1];
    if (std::fabs(t0.first) < 1e-3 && std::fabs(t0.second) < 1e-3 &&
        std::fabs(t1.first - 1.0) < 1e-3 && std::fabs(t1.second - 1.0) < 1e-3)
      return ModelType::Strictly1RSB;
  }
  if (tr.T.intervals.size() == 1 && tr.T.intervals[0].first < 1e-3 &&
      tr.T.intervals[0].second > 1.0 - 1e-3)
    return ModelType::StrictlyFRSB;

  CsResult cr = minimize_cs(xi, opt);
  IntervalSet s = compute_S(xi, cr.x);
  if (s.is_single_atom(0.0, 1e-3)) return ModelType::StrictlyRS;
  return ModelType::Composite;
}

// ------------------------------------------------------------- 1RSB closed forms

double upsilon(double z) {
  if (z < 1e-6)  // removable singularity at 0
    return 0.5 - z / 6.0 + z * z / 12.0 - z * z * z / 20.0;
  return (1.0 + z) * std::log1p(z) / (z * z) - 1.0 / z;
}

double solve_upsilon(double ratio) {
  if (!(ratio > 0.0 && ratio < 0.5))
    throw domain_error("solve_upsilon: ratio must lie in (0, 1/2)");
  double lo = 0.0, hi = 1.0;
  while (upsilon(hi) > ratio) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (upsilon(mid) > ratio ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OneRSBParams onersb_params(const XiFun& xi) {
  if (std::fabs(xi(0.0, 1)) > 1e-14)
    throw domain_error("onersb_params: requires gamma_1 = 0");
  double x1 = xi(1.0, 0), d1 = xi(1.0, 1), d2 = xi(1.0, 2);
  double ratio = x1 / d1;
  if (!(ratio > 0.0 && ratio <= 0.5 + 1e-9))
    throw domain_error("onersb_params: xi(1)/xi'(1) must lie in (0, 1/2]");
  OneRSBParams out{};
  if (std::fabs(ratio - 0.5) < 1e-9) {
    out.z = 0.0;
    out.y = std::sqrt(d1);
  } else {
    out.z = solve_upsilon(ratio);
    out.y = std::sqrt((1.0 + out.z) * d1);
  }
  out.L = (1.0 + out.z) / out.y;
  out.u = out.z / out.y;
  out.Q = (d1 + out.z * x1) / out.y;
  out.E0 = out.Q;
  out.R0 = out.y + d2 / out.y;
  return out;
}

// ------------------------------------------------------------- profiles etc.

double energy_profile(const XiFun& xi, const OrderParamFT& x, double q) {
  x.validate();
  if (!(q >= 0.0 && q <= 1.0)) throw domain_error("energy_profile: q in [0,1]");
  double t1 = xi(0.0, 1) * x.xhat(0.0);
  double t2 = 0.0;
  auto nodes = piece_nodes(x.breakpoints);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    double a = nodes[j], b = std::min(nodes[j + 1], q);
    if (b <= a) break;
    t2 += quad::gl16([&](double s) { return xi(s, 2) * x.xhat(s); }, a, b);
  }
  double t3 = integral_inv_xhat(x, 0.0, q);
  return 0.5 * (t1 + t2 + t3);
}

std::vector<double> s_refinement(const Mixture& m, const MinimizeOptions& opt) {
  CsResult cr = minimize_cs(m, opt);
  IntervalSet s = compute_S(fn(m), cr.x);
  return s.endpoints();
}

PhaseChecks phase_checks(const Mixture& m) {
  PhaseChecks pc{};
  pc.rs2_margin = pc.rs_margin = -kInf;
  const int n = 4001;
  for (int i = 0; i < n; ++i) {
    double q = (i + 0.5) / n * (1.0 - 1e-9);
    double a = m.xi(q) + 0.5 * std::log1p(-q * q);
    double b = m.xi(q) + q + std::log1p(-q);
    if (a > pc.rs2_margin) { pc.rs2_margin = a; pc.rs2_at = q; }
    if (b > pc.rs_margin) { pc.rs_margin = b; pc.rs_at = q; }
  }
  pc.onersb_applicable = false;
  if (!m.has_field()) {
    double ratio = m.xi(1.0) / m.xi(1.0, 1);
    if (ratio > 0.0 && ratio <= 0.5 + 1e-9) {
      pc.onersb_applicable = true;
      double z = std::fabs(ratio - 0.5) < 1e-9 ? 0.0 : solve_upsilon(ratio);
      pc.onersb_margin = kInf;
      for (int i = 0; i <= n; ++i) {
        double q = static_cast<double>(i) / n;
        double rhs;
        if (z < 1e-8) {
          double u = 1.0 - q;
          rhs = m.xi(1.0, 1) * (u - 0.5 * u * u);
        } else {
          rhs = m.xi(1.0, 1) * ((1.0 + z) / (z * z) * std::log1p((1.0 - q) * z) -
                                (1.0 - q) / z);
        }
        double margin = (m.xi(1.0) - m.xi(q)) - rhs;
        if (margin < pc.onersb_margin) { pc.onersb_margin = margin; pc.onersb_at = q; }
      }
    }
  }
  return pc;
}

}  // namespace spinlab
