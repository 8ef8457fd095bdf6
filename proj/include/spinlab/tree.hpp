#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/hamiltonian.hpp"

namespace spinlab {

// A tree of sphere points indexed by addresses "", "2", "2.1", ...; the node
// at depth d sits at radius sqrt(q_d N) and pairwise overlaps should match
// the radius of the deepest common ancestor.
struct TreeNode {
  Eigen::VectorXd point;
  double energy_density = 0.0;
  bool deficient = false;  // child ascent missed its energy target
};

struct UltraTree {
  int k = 0;
  int depth = 0;                   // D: leaves live at depth D+... (addresses of length <= depth)
  std::vector<double> q;           // radius schedule q_0..q_D
  std::vector<double> targets;     // E(q_0)..E(q_D), energy-profile values
  double delta = 0.0;
  std::map<std::string, TreeNode> nodes;

  static std::string child_address(const std::string& u, int i);
  static std::string parent_address(const std::string& u);
  static int address_depth(const std::string& u);
};

struct UltraReport {
  double worst = 0.0;  // max |R(u,v) - q_{u^v}|
  std::string u, v;
  bool pass = true;
};

UltraReport verify_ultrametric(const UltraTree& t, bool global);

struct TreeBudgets {
  int restarts = 3;
  int max_steps = 10000;
  std::uint64_t seed = 1;
};

// Layer-by-layer construction: root by ascent at radius sqrt(q_0 N) (the
// origin when q_0 = 0), then k sequential penalized band ascents per node.
// Nodes that miss their energy target are marked deficient, never dropped.
UltraTree build_tree(const Hamiltonian& H, const std::vector<double>& q, int k,
                     double delta, double eps, const TreeBudgets& budgets);

// Keep children whose energy increment meets the per-level target minus
// eps/(D+1); return the largest balanced subtree (lexicographically first
// survivors, addresses relabeled).
UltraTree prune_energy(const UltraTree& t, double eps);

// Keep children whose increment has overlap at most delta/D^2 against every
// previously accepted increment; balanced subtree as above.
UltraTree prune_overlap(const UltraTree& t, double delta);

struct OrthogonalizeResult {
  std::vector<int> accepted;              // indices into the input list
  std::vector<Eigen::VectorXd> points;    // exactly orthogonal, norm sqrt(N)
};

// Greedy projection onto the complement of the accepted set; a candidate is
// kept when renormalizing moves it by at most delta^0.01 sqrt(N).
OrthogonalizeResult exact_orthogonalize(const std::vector<Eigen::VectorXd>& pts,
                                        double delta);

// Serialization: JSON body for the tree and an optional coordinate sidecar
// (magic "UTRE", then N and node count as little-endian u64, then coordinates
// as little-endian f64 in address order).
std::string tree_to_json(const UltraTree& t);
void write_sidecar(const UltraTree& t, int N, const std::string& path);

}  // namespace spinlab
