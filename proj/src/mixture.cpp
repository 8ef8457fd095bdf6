#include "spinlab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinlab/errors.hpp"

namespace spinlab {

Mixture::Mixture(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  if (static_cast<int>(gammas_.size()) > kMaxDegree)
    throw domain_error("mixture degree exceeds cap P <= 16");
  for (double g : gammas_)
    if (!(g >= 0.0))
      throw domain_error("mixture weights gamma_p must be nonnegative");
  // drop trailing zeros so max_degree() is meaningful
  while (!gammas_.empty() && gammas_.back() == 0.0) gammas_.pop_back();
}

Mixture Mixture::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("gammas") || !j["gammas"].is_array())
    throw domain_error("mixture JSON must contain an array field \"gammas\"");
  return Mixture(j["gammas"].get<std::vector<double>>());
}

Mixture Mixture::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open mixture file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

double Mixture::gamma(int p) const {
  if (p < 1 || p > max_degree()) return 0.0;
  return gammas_[p - 1];
}

bool Mixture::is_pure() const {
  int nonzero = 0;
  for (double g : gammas_) nonzero += (g > 0.0);
  return nonzero == 1;
}

double Mixture::xi(double t, int order) const {
  if (order < 0 || order > 2) throw domain_error("xi: order must be 0, 1 or 2");
  if (order == 0 ? (t < -1.0 || t > 1.0) : (t < 0.0 || t > 1.0))
    throw domain_error("xi: argument outside domain");
  double acc = 0.0;
  for (int p = order == 0 ? 1 : std::max(order, 1); p <= max_degree(); ++p) {
    double c = gammas_[p - 1];
    if (c == 0.0) continue;
    double fac = 1.0;
    for (int k = 0; k < order; ++k) fac *= (p - k);
    acc += fac * c * c * std::pow(t, p - order);
  }
  return acc;
}

Mixture Mixture::replace_field(double h) const {
  if (h < 0.0) throw domain_error("replace_field: h must be nonnegative");
  std::vector<double> g = gammas_;
  if (g.empty()) g.resize(1, 0.0);
  g[0] = h;
  return Mixture(g);
}

Mixture Mixture::perturbed(double iota) const {
  std::vector<double> g = gammas_;
  int p = max_degree() + 1;
  if (p > kMaxDegree)
    throw domain_error("perturbed: degree cap P <= 16 reached");
  g.resize(p, 0.0);
  g[p - 1] = iota;
  return Mixture(g);
}

XiFun fn(const Mixture& m) {
  return [m](double t, int order) { return m.xi(t, order); };
}

XiFun band_mixture(const Mixture& m, double q) {
  if (!(std::fabs(q) < 1.0)) throw domain_error("band_mixture: |q| must be < 1");
  if (!(m.xi(1.0) > 0.0)) throw domain_error("band_mixture: xi(1) must be > 0");
  double q2 = q * q, s = 1.0 - q * q;
  double c = m.xi(q) * m.xi(q) / m.xi(1.0);
  return [m, q2, s, c](double t, int order) {
    double u = q2 + s * t;
    switch (order) {
      case 0: return m.xi(u, 0) - c;
      case 1: return s * m.xi(u, 1);
      default: return s * s * m.xi(u, 2);
    }
  };
}

XiFun band_mixture_grad(const Mixture& m, double q) {
  if (!(std::fabs(q) < 1.0))
    throw domain_error("band_mixture_grad: |q| must be < 1");
  if (!(m.xi(1.0, 1) > 0.0))
    throw domain_error("band_mixture_grad: xi'(1) must be > 0");
  double q2 = q * q, s = 1.0 - q * q;
  // xi'(q) evaluated directly so negative centers work too
  double d = 0.0;
  for (int p = 1; p <= m.max_degree(); ++p)
    d += p * m.gamma(p) * m.gamma(p) * std::pow(q, p - 1);
  double lin = s * d * d / m.xi(1.0, 1);
  return [m, q2, s, lin](double t, int order) {
    double u = q2 + s * t;
    switch (order) {
      case 0: return m.xi(u, 0) - lin * t;
      case 1: return s * m.xi(u, 1) - lin;
      default: return s * s * m.xi(u, 2);
    }
  };
}

XiFun submodel(const Mixture& m, double q_lo, double q_hi) {
  if (!(0.0 <= q_lo && q_lo < q_hi && q_hi <= 1.0))
    throw domain_error("submodel: need 0 <= q_lo < q_hi <= 1");
  double w = q_hi - q_lo;
  double v0 = m.xi(q_lo), d0 = m.xi(q_lo, 1);
  return [m, q_lo, w, v0, d0](double x, int order) {
    double u = q_lo + w * x;
    switch (order) {
      case 0: return m.xi(u, 0) - v0 - d0 * w * x;
      case 1: return w * m.xi(u, 1) - d0 * w;
      default: return w * w * m.xi(u, 2);
    }
  };
}

XiFun submodel_root(const Mixture& m, double q0) {
  if (!(0.0 < q0 && q0 <= 1.0))
    throw domain_error("submodel_root: need 0 < q0 <= 1");
  return [m, q0](double x, int order) {
    double fac = 1.0;
    for (int k = 0; k < order; ++k) fac *= q0;
    return fac * m.xi(q0 * x, order);
  };
}

}  // namespace spinlab
