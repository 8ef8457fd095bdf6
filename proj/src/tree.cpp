#include "spinlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include <nlohmann/json.hpp>

#include "spinlab/errors.hpp"
#include "spinlab/landscape.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/variational.hpp"

namespace spinlab {

std::string UltraTree::child_address(const std::string& u, int i) {
  return u.empty() ? std::to_string(i) : u + "." + std::to_string(i);
}

std::string UltraTree::parent_address(const std::string& u) {
  auto pos = u.rfind('.');
  return pos == std::string::npos ? std::string() : u.substr(0, pos);
}

int UltraTree::address_depth(const std::string& u) {
  if (u.empty()) return 0;
  return 1 + static_cast<int>(std::count(u.begin(), u.end(), '.'));
}

namespace {

std::vector<std::string> sorted_addresses(const UltraTree& t) {
  std::vector<std::string> a;
  for (const auto& kv : t.nodes) a.push_back(kv.first);
  // depth first, then numeric child order within a depth
  std::sort(a.begin(), a.end(), [](const std::string& x, const std::string& y) {
    int dx = UltraTree::address_depth(x), dy = UltraTree::address_depth(y);
    if (dx != dy) return dx < dy;
    return x < y;
  });
  return a;
}

// depth of the deepest common ancestor
int lca_depth(const std::string& u, const std::string& v) {
  if (u.empty() || v.empty()) return 0;
  int d = 0;
  std::size_t i = 0, j = 0;
  while (true) {
    std::size_t iu = u.find('.', i), iv = v.find('.', j);
    std::string su = u.substr(i, (iu == std::string::npos ? u.size() : iu) - i);
    std::string sv = v.substr(j, (iv == std::string::npos ? v.size() : iv) - j);
    if (su != sv) return d;
    ++d;
    if (iu == std::string::npos || iv == std::string::npos) return d;
    i = iu + 1;
    j = iv + 1;
  }
}

bool is_local_pair(const std::string& u, const std::string& v) {
  if (u == v) return true;
  std::string pu = UltraTree::parent_address(u);
  std::string pv = UltraTree::parent_address(v);
  if (pu == pv && UltraTree::address_depth(u) == UltraTree::address_depth(v))
    return true;  // siblings
  return pu == v || pv == u;  // parent-child
}

// children of u present in the tree, in numeric order
std::vector<std::string> children_of(const UltraTree& t, const std::string& u) {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    std::string c = UltraTree::child_address(u, i);
    if (!t.nodes.count(c)) break;
    out.push_back(c);
  }
  return out;
}

// rebuild a balanced subtree keeping, at every internal node, the
// lexicographically first `arity` members of the survivor list
UltraTree balanced_subtree(
    const UltraTree& t,
    const std::map<std::string, std::vector<std::string>>& survivors,
    int arity) {
  UltraTree out = t;
  out.nodes.clear();
  out.k = arity;
  std::function<void(const std::string&, const std::string&)> copy_down =
      [&](const std::string& src, const std::string& dst) {
        out.nodes[dst] = t.nodes.at(src);
        auto it = survivors.find(src);
        if (it == survivors.end()) return;
        for (int i = 0; i < arity; ++i)
          copy_down(it->second[i], UltraTree::child_address(dst, i + 1));
      };
  copy_down("", "");
  return out;
}

}  // namespace

UltraReport verify_ultrametric(const UltraTree& t, bool global) {
  UltraReport rep;
  std::vector<std::string> a = sorted_addresses(t);
  if (a.empty()) return rep;
  const int N = static_cast<int>(t.nodes.begin()->second.point.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i; j < a.size(); ++j) {
      if (!global && !is_local_pair(a[i], a[j])) continue;
      const auto& pu = t.nodes.at(a[i]).point;
      const auto& pv = t.nodes.at(a[j]).point;
      double R = pu.dot(pv) / N;
      double want = t.q.at(lca_depth(a[i], a[j]));
      double viol = std::fabs(R - want);
      if (viol > rep.worst) {
        rep.worst = viol;
        rep.u = a[i];
        rep.v = a[j];
      }
    }
  }
  rep.pass = rep.worst <= t.delta;
  return rep;
}

UltraTree build_tree(const Hamiltonian& H, const std::vector<double>& q, int k,
                     double delta, double eps, const TreeBudgets& budgets) {
  const int N = H.size();
  if (q.empty()) throw domain_error("build_tree: empty radius schedule");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0.0 || q[i] > 1.0) throw domain_error("build_tree: q in [0,1]");
    if (i > 0 && q[i] <= q[i - 1])
      throw domain_error("build_tree: radius schedule must increase");
  }
  const int D = static_cast<int>(q.size()) - 1;
  if (D > 0 && k < 1) throw domain_error("build_tree: k >= 1");

  UltraTree t;
  t.k = D > 0 ? k : 0;
  t.depth = D;
  t.q = q;
  t.delta = delta;

  // energy-profile targets from the finite-temperature minimizer
  CsResult cs = minimize_cs(H.mixture());
  for (double qd : q) t.targets.push_back(energy_profile(H.mixture(), cs.x, qd));

  // root
  TreeNode root;
  if (q[0] <= 1e-12) {
    root.point = Eigen::VectorXd::Zero(N);
    root.energy_density = H.value(root.point) / N;
  } else {
    double radius = std::sqrt(q[0] * N);
    AscentResult best;
    bool have = false;
    for (int r = 0; r < budgets.restarts; ++r) {
      rng::Stream rs(rng::derive_key(budgets.seed, 0x400, r));
      Eigen::VectorXd x0(N);
      for (int i = 0; i < N; ++i) x0[i] = rs.normal();
      AscentResult a = ascend(H, x0, radius, budgets.max_steps);
      if (!have || a.energy_density > best.energy_density) {
        best = a;
        have = true;
      }
    }
    root.point = best.point;
    root.energy_density = best.energy_density;
  }
  t.nodes[""] = root;

  const double lambda = 10.0 * H.mixture().xi(1.0, 1);
  const double gstop = 1e-8 * std::sqrt(static_cast<double>(N));
  const double step0 = 0.1 / std::sqrt(std::max(H.mixture().xi(1.0, 2), 1e-8));

  std::vector<std::string> frontier = {""};
  for (int d = 0; d < D; ++d) {
    const double r2 = (q[d + 1] - q[d]) * N;
    const double wr = std::sqrt(r2);
    const double target =
        t.targets[d + 1] - t.targets[d] - eps / (D + 1);
    std::vector<std::string> next;
    for (const std::string& u : frontier) {
      const Eigen::VectorXd& su = t.nodes.at(u).point;
      const double eu = t.nodes.at(u).energy_density;
      std::vector<Eigen::VectorXd> incrs;  // accepted sibling increments
      for (int i = 1; i <= k; ++i) {
        // penalized ascent over w perp sigma_u with |w| = wr
        auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                             double hval) {
          double pen = 0.0;
          for (const auto& wj : incrs) {
            double Rj = w.dot(wj) / N;
            pen += Rj * Rj;
          }
          (void)x;
          return hval - N * lambda * pen;
        };
        AscentResult best;
        double best_obj = -1e300;
        bool have = false;
        for (int r = 0; r < budgets.restarts; ++r) {
          rng::Stream rs(rng::derive_key(
              budgets.seed, rng::derive_key(0xc41d, d, i), r));
          Eigen::VectorXd w(N);
          for (int n = 0; n < N; ++n) w[n] = rs.normal();
          if (su.squaredNorm() > 0.0) w -= (w.dot(su) / su.squaredNorm()) * su;
          w *= wr / w.norm();
          Eigen::VectorXd x = su + w;
          double hval;
          Eigen::VectorXd grad;
          H.value_grad(x, hval, grad);
          double obj = objective(x, w, hval);
          double step = step0;
          AscentResult res;
          for (int it = 0; it < budgets.max_steps; ++it) {
            // gradient of the penalized objective in w
            Eigen::VectorXd g = grad;
            for (const auto& wj : incrs)
              g -= (2.0 * lambda * (w.dot(wj) / N)) * wj;
            if (su.squaredNorm() > 0.0) g -= (g.dot(su) / su.squaredNorm()) * su;
            g -= (g.dot(w) / w.squaredNorm()) * w;
            res.grad_norm = g.norm();
            if (res.grad_norm <= gstop) {
              res.converged = true;
              break;
            }
            bool moved = false;
            for (int bt = 0; bt < 50; ++bt) {
              Eigen::VectorXd wn = w + step * g;
              if (su.squaredNorm() > 0.0)
                wn -= (wn.dot(su) / su.squaredNorm()) * su;
              wn *= wr / wn.norm();
              Eigen::VectorXd xn = su + wn;
              double hn;
              Eigen::VectorXd gn;
              H.value_grad(xn, hn, gn);
              double on = objective(xn, wn, hn);
              if (on > obj) {
                w = wn;
                x = xn;
                hval = hn;
                grad = gn;
                obj = on;
                moved = true;
                step = std::min(step * 1.5, step0);
                break;
              }
              step *= 0.5;
            }
            ++res.steps;
            if (!moved) break;
          }
          res.point = x;
          res.energy_density = hval / N;
          if (!have || obj > best_obj) {
            best = res;
            best_obj = obj;
            have = true;
          }
        }
        std::string addr = UltraTree::child_address(u, i);
        TreeNode node;
        node.point = best.point;
        node.energy_density = best.energy_density;
        node.deficient = best.energy_density - eu < target;
        incrs.push_back(best.point - su);
        t.nodes[addr] = node;
        next.push_back(addr);
      }
    }
    frontier = next;
  }
  return t;
}

UltraTree prune_energy(const UltraTree& t, double eps) {
  if (t.depth == 0) return t;
  const int D = t.depth;
  std::map<std::string, std::vector<std::string>> survivors;
  int arity = t.k;
  for (const auto& kv : t.nodes) {
    const std::string& u = kv.first;
    int d = UltraTree::address_depth(u);
    if (d >= D) continue;
    double thresh = t.targets.at(d + 1) - t.targets.at(d) - eps / (D + 1);
    std::vector<std::string> keep;
    for (const std::string& c : children_of(t, u))
      if (t.nodes.at(c).energy_density - kv.second.energy_density >= thresh)
        keep.push_back(c);
    arity = std::min(arity, static_cast<int>(keep.size()));
    survivors[u] = std::move(keep);
  }
  return balanced_subtree(t, survivors, arity);
}

UltraTree prune_overlap(const UltraTree& t, double delta) {
  if (t.depth == 0) return t;
  const int D = t.depth;
  const double bound = delta / (D * D);
  const int N = static_cast<int>(t.nodes.at("").point.size());
  std::map<std::string, std::vector<std::string>> survivors;
  std::vector<Eigen::VectorXd> accepted;
  int arity = t.k;
  for (const std::string& u : sorted_addresses(t)) {
    int d = UltraTree::address_depth(u);
    if (d >= D) continue;
    const Eigen::VectorXd& su = t.nodes.at(u).point;
    std::vector<std::string> keep;
    for (const std::string& c : children_of(t, u)) {
      Eigen::VectorXd incr = t.nodes.at(c).point - su;
      bool ok = true;
      for (const auto& w : accepted) {
        if (std::fabs(incr.dot(w) / N) > bound) {
          ok = false;
          break;
        }
      }
      if (ok) {
        keep.push_back(c);
        accepted.push_back(std::move(incr));
      }
    }
    arity = std::min(arity, static_cast<int>(keep.size()));
    survivors[u] = std::move(keep);
  }
  return balanced_subtree(t, survivors, arity);
}

OrthogonalizeResult exact_orthogonalize(const std::vector<Eigen::VectorXd>& pts,
                                        double delta) {
  OrthogonalizeResult out;
  if (pts.empty()) return out;
  const int N = static_cast<int>(pts[0].size());
  const double disp_max = std::pow(delta, 0.01) * std::sqrt(static_cast<double>(N));
  std::vector<Eigen::VectorXd> basis;  // unit vectors
  for (std::size_t a = 0; a < pts.size(); ++a) {
    Eigen::VectorXd v = pts[a];
    for (int pass = 0; pass < 2; ++pass)  // second pass kills rounding residue
      for (const auto& b : basis) v -= v.dot(b) * b;
    double nrm = v.norm();
    if (nrm <= 1e-12 * std::sqrt(static_cast<double>(N))) continue;
    Eigen::VectorXd adj = v * (std::sqrt(static_cast<double>(N)) / nrm);
    if ((adj - pts[a]).norm() > disp_max) continue;
    out.accepted.push_back(static_cast<int>(a));
    out.points.push_back(adj);
    basis.push_back(v / nrm);
  }
  return out;
}

std::string tree_to_json(const UltraTree& t) {
  nlohmann::json j;
  j["k"] = t.k;
  j["depth"] = t.depth;
  j["q"] = t.q;
  j["energy_targets"] = t.targets;
  j["delta"] = t.delta;
  nlohmann::json nodes = nlohmann::json::object();
  for (const auto& kv : t.nodes) {
    nodes[kv.first] = {{"point_norm2", kv.second.point.squaredNorm()},
                       {"energy_density", kv.second.energy_density},
                       {"deficient", kv.second.deficient}};
  }
  j["nodes"] = nodes;
  return j.dump(2);
}

void write_sidecar(const UltraTree& t, int N, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw domain_error("write_sidecar: cannot open " + path);
  std::fwrite("UTRE", 1, 4, f);
  std::uint64_t n = static_cast<std::uint64_t>(N);
  std::uint64_t count = t.nodes.size();
  std::fwrite(&n, 8, 1, f);
  std::fwrite(&count, 8, 1, f);
  for (const std::string& a : sorted_addresses(t))
    std::fwrite(t.nodes.at(a).point.data(), 8, N, f);
  std::fclose(f);
}

}  // namespace spinlab
