// spinlab: command-line front end.
//
// Subcommands: analyze, profile, rate, complexity, sample-gs, band, subag,
// tree, tilt.  Structured results go to JSON (config and version embedded),
// curves go to CSV with a config comment header.  Exit codes: 0 ok, 2 domain
// error, 3 budget exhausted, 64 usage.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spinlab/errors.hpp"
#include "spinlab/hamiltonian.hpp"
#include "spinlab/kacrice.hpp"
#include "spinlab/landscape.hpp"
#include "spinlab/mixture.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/subag.hpp"
#include "spinlab/tree.hpp"
#include "spinlab/variational.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using namespace spinlab;

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("SPINLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return flag_value;
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw domain_error("cannot open output file " + path);
  f << body;
}

void emit_json(const std::string& path, const json& config, json result) {
  json doc;
  doc["version"] = kVersion;
  doc["config"] = config;
  doc["result"] = std::move(result);
  write_text(path, doc.dump(2) + "\n");
}

std::string csv_header(const json& config) {
  std::string line = "# version " + std::string(kVersion) + " config " +
                     config.dump() + "\n";
  return line;
}

json set_to_json(const IntervalSet& s) {
  json arr = json::array();
  for (const auto& iv : s.intervals) arr.push_back({iv.first, iv.second});
  return arr;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinlab: spherical mixed p-spin landscape toolkit"};
  app.require_subcommand(1);

  // shared flags, one instance per subcommand where relevant
  struct Common {
    std::string mixture, out;
    std::uint64_t seed = 1;
    int threads = 1;
    int levels = 3;
    int grid = 4001;
    double tol = -1.0;
  };

  auto add_common = [](CLI::App* sc, Common& c, bool need_mixture = true) {
    auto* m = sc->add_option("--mixture", c.mixture, "mixture JSON file");
    if (need_mixture) m->required();
    sc->add_option("--out", c.out, "output path (default stdout)");
    sc->add_option("--seed", c.seed, "master seed");
    sc->add_option("--threads", c.threads, "worker threads (SPINLAB_THREADS overrides)");
  };

  // ---- analyze
  Common an;
  auto* analyze = app.add_subcommand("analyze", "classify a mixture and minimize both functionals");
  add_common(analyze, an);
  analyze->add_option("--levels", an.levels, "max replica levels");
  analyze->add_option("--grid", an.grid, "detection grid size");
  analyze->add_option("--tol", an.tol, "detection tolerance override");

  // ---- profile
  Common pf;
  int pf_points = 101;
  auto* profile = app.add_subcommand("profile", "energy profile E(q) as CSV");
  add_common(profile, pf);
  profile->add_option("--points", pf_points, "number of grid points");

  // ---- rate
  Common rt;
  double rt_emin = 0.0, rt_emax = 0.0;
  int rt_steps = 20;
  bool rt_perturb = false;
  auto* rate = app.add_subcommand("rate", "large-deviation rate curve as CSV");
  add_common(rate, rt);
  rate->add_option("--emin", rt_emin, "lowest energy")->required();
  rate->add_option("--emax", rt_emax, "highest energy")->required();
  rate->add_option("--steps", rt_steps, "grid size");
  rate->add_flag("--perturb", rt_perturb, "perturb pure mixtures");

  // ---- complexity
  Common cx;
  double cx_e = 0.0, cx_r = 0.0, cx_q = -1.0, cx_e2 = 0.0, cx_r2 = 0.0;
  bool cx_perturb = false, cx_have_e2 = false, cx_have_r2 = false;
  auto* complexity = app.add_subcommand("complexity", "critical-point exponents at a given (E,R)");
  add_common(complexity, cx);
  complexity->add_option("--e", cx_e, "energy density")->required();
  complexity->add_option("--r", cx_r, "radial derivative")->required();
  complexity->add_option("--q", cx_q, "overlap for the two-point exponent");
  complexity->add_option("--e2", cx_e2, "second energy (default --e)")->each([&](const std::string&) { cx_have_e2 = true; });
  complexity->add_option("--r2", cx_r2, "second radial (default --r)")->each([&](const std::string&) { cx_have_r2 = true; });
  complexity->add_flag("--perturb", cx_perturb, "perturb pure mixtures");

  // ---- sample-gs
  Common sg;
  int sg_n = 100, sg_restarts = 4, sg_steps = 10000;
  auto* samplegs = app.add_subcommand("sample-gs", "ground-state estimate by multistart ascent");
  add_common(samplegs, sg);
  samplegs->add_option("--n", sg_n, "dimension")->required();
  samplegs->add_option("--restarts", sg_restarts, "ascent restarts");
  samplegs->add_option("--steps", sg_steps, "max ascent steps");

  // ---- band
  Common bd;
  int bd_n = 30, bd_samples = 2000, bd_restarts = 4;
  double bd_q = 0.0;
  std::string bd_mode = "fe";
  auto* band = app.add_subcommand("band", "band free energy or band ground state");
  add_common(band, bd);
  band->add_option("--n", bd_n, "dimension")->required();
  band->add_option("--q", bd_q, "band overlap")->required();
  band->add_option("--mode", bd_mode, "fe|gs")->check(CLI::IsMember({"fe", "gs"}));
  band->add_option("--samples", bd_samples, "MC samples (fe mode)");
  band->add_option("--restarts", bd_restarts, "ascent restarts (gs mode)");

  // ---- subag
  Common sb;
  int sb_n = 300, sb_runs = 1;
  double sb_eta = 0.02;
  auto* subag = app.add_subcommand("subag", "randomized Hessian ascent");
  add_common(subag, sb);
  subag->add_option("--n", sb_n, "dimension")->required();
  subag->add_option("--eta", sb_eta, "step fraction, 1/eta integer");
  subag->add_option("--runs", sb_runs, "independent runs");

  // ---- tree
  Common tr;
  int tr_n = 200, tr_k = 4, tr_restarts = 3;
  double tr_delta = 0.15, tr_eps = 0.1;
  std::string tr_schedule, tr_sidecar;
  bool tr_prune = false;
  auto* tree = app.add_subcommand("tree", "ultrametric tree construction");
  add_common(tree, tr);
  tree->add_option("--n", tr_n, "dimension")->required();
  tree->add_option("--k", tr_k, "arity");
  tree->add_option("--delta", tr_delta, "overlap tolerance");
  tree->add_option("--eps", tr_eps, "energy slack");
  tree->add_option("--restarts", tr_restarts, "ascent restarts per child");
  tree->add_option("--schedule", tr_schedule, "comma-separated radius schedule (default: S-refinement)");
  tree->add_option("--sidecar", tr_sidecar, "binary coordinate sidecar path");
  tree->add_flag("--prune", tr_prune, "apply energy and overlap pruning");

  // ---- tilt
  Common tl;
  int tl_p = 3;
  double tl_x = 0.0;
  auto* tilt = app.add_subcommand("tilt", "tilted conditional ground state GS(x)");
  add_common(tilt, tl);
  tilt->add_option("--p", tl_p, "tilted degree")->required();
  tilt->add_option("--x", tl_x, "tilt strength")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (analyze->parsed()) {
      Mixture m = Mixture::from_json_file(an.mixture);
      json cfg = {{"subcommand", "analyze"}, {"mixture", an.mixture},
                  {"levels", an.levels}, {"grid", an.grid}, {"tol", an.tol},
                  {"seed", an.seed}, {"threads", resolve_threads(an.threads)}};
      MinimizeOptions opt;
      opt.max_levels = an.levels;
      opt.seed = an.seed;
      SetOptions so;
      so.grid = an.grid;
      so.tol = an.tol;
      CsResult cs = minimize_cs(m, opt);
      ZtResult zt = minimize_zt(m, opt);
      IntervalSet S = compute_S(fn(m), cs.x, so);
      TReport T = compute_T(fn(m), zt.p, so);
      ModelType type = classify(m, opt);
      json res;
      res["classification"] = to_string(type);
      res["cs_value"] = cs.value;
      res["zt_value"] = zt.value;
      res["S"] = set_to_json(S);
      res["T"] = set_to_json(T.T);
      res["certificates"] = {{"G1", T.G1}, {"min_g", T.min_g},
                             {"mass_outside", T.mass_outside}};
      res["order_param"] = {{"breakpoints", cs.x.breakpoints},
                            {"values", cs.x.values}};
      res["zt_param"] = {{"L", zt.p.L}, {"breakpoints", zt.p.breakpoints},
                         {"values", zt.p.values}};
      emit_json(an.out, cfg, res);
    } else if (profile->parsed()) {
      Mixture m = Mixture::from_json_file(pf.mixture);
      if (pf_points < 2) throw domain_error("profile: --points >= 2");
      json cfg = {{"subcommand", "profile"}, {"mixture", pf.mixture},
                  {"points", pf_points}, {"seed", pf.seed}};
      MinimizeOptions opt;
      opt.seed = pf.seed;
      CsResult cs = minimize_cs(m, opt);
      std::ostringstream body;
      body << csv_header(cfg) << "q,energy\n";
      for (int i = 0; i < pf_points; ++i) {
        double q = cs.x.qhat() * i / (pf_points - 1);
        body << fmt17(q) << "," << fmt17(energy_profile(m, cs.x, q)) << "\n";
      }
      write_text(pf.out, body.str());
    } else if (rate->parsed()) {
      Mixture m = Mixture::from_json_file(rt.mixture);
      json cfg = {{"subcommand", "rate"}, {"mixture", rt.mixture},
                  {"emin", rt_emin}, {"emax", rt_emax}, {"steps", rt_steps},
                  {"perturb", rt_perturb}};
      auto curve = rate_curve(m, rt_emin, rt_emax, rt_steps, rt_perturb);
      std::ostringstream body;
      body << csv_header(cfg) << "E,R_plus,Theta_plus\n";
      for (const auto& row : curve)
        body << fmt17(row.E) << "," << fmt17(row.r_star) << ","
             << fmt17(row.theta_star) << "\n";
      write_text(rt.out, body.str());
    } else if (complexity->parsed()) {
      Mixture m = Mixture::from_json_file(cx.mixture);
      if (!cx_have_e2) cx_e2 = cx_e;
      if (!cx_have_r2) cx_r2 = cx_r;
      json cfg = {{"subcommand", "complexity"}, {"mixture", cx.mixture},
                  {"e", cx_e}, {"r", cx_r}, {"q", cx_q}, {"e2", cx_e2},
                  {"r2", cx_r2}, {"perturb", cx_perturb}};
      json res;
      res["theta"] = theta(m, cx_e, cx_r, cx_perturb);
      if (cx_q >= 0.0)
        res["xi_two"] = xi_two(m, cx_q, cx_e, cx_e2, cx_r, cx_r2, cx_perturb);
      if (!m.has_field()) {
        try {
          OneRSBParams pr = onersb_params(cx_perturb ? m.perturbed() : m);
          res["onersb"] = {{"z", pr.z}, {"y", pr.y}, {"E0", pr.E0},
                           {"R0", pr.R0}, {"L", pr.L}, {"u", pr.u}};
        } catch (const domain_error&) {
          // mixture outside the 1RSB-parameter window; omit the block
        }
      }
      emit_json(cx.out, cfg, res);
    } else if (samplegs->parsed()) {
      Mixture m = Mixture::from_json_file(sg.mixture);
      json cfg = {{"subcommand", "sample-gs"}, {"mixture", sg.mixture},
                  {"n", sg_n}, {"restarts", sg_restarts}, {"steps", sg_steps},
                  {"seed", sg.seed}};
      Hamiltonian H = sample(m, sg_n, sg.seed);
      AscentResult r = gs_estimate(H, sg_restarts, rng::derive_key(sg.seed, 1), sg_steps);
      emit_json(sg.out, cfg,
                json{{"value", r.energy_density}, {"grad_norm", r.grad_norm},
                     {"iterations", r.steps}, {"converged", r.converged}});
    } else if (band->parsed()) {
      Mixture m = Mixture::from_json_file(bd.mixture);
      json cfg = {{"subcommand", "band"}, {"mixture", bd.mixture}, {"n", bd_n},
                  {"q", bd_q}, {"mode", bd_mode}, {"samples", bd_samples},
                  {"restarts", bd_restarts}, {"seed", bd.seed}};
      Hamiltonian H = sample(m, bd_n, bd.seed);
      rng::Stream rs(rng::derive_key(bd.seed, 2));
      Eigen::VectorXd center(bd_n);
      for (int i = 0; i < bd_n; ++i) center[i] = rs.normal();
      center *= std::sqrt(static_cast<double>(bd_n)) / center.norm();
      if (bd_mode == "fe") {
        McEstimate e = band_free_energy(H, center, bd_q, bd_samples,
                                        rng::derive_key(bd.seed, 3));
        emit_json(bd.out, cfg,
                  json{{"value", e.value}, {"stderr", e.se},
                       {"iterations", e.samples}});
      } else {
        AscentResult r = band_gs(H, center, bd_q, bd_restarts,
                                 rng::derive_key(bd.seed, 3));
        emit_json(bd.out, cfg,
                  json{{"value", r.energy_density}, {"stderr", 0.0},
                       {"iterations", r.steps}});
      }
    } else if (subag->parsed()) {
      Mixture m = Mixture::from_json_file(sb.mixture);
      json cfg = {{"subcommand", "subag"}, {"mixture", sb.mixture}, {"n", sb_n},
                  {"eta", sb_eta}, {"runs", sb_runs}, {"seed", sb.seed}};
      Hamiltonian H = sample(m, sb_n, sb.seed);
      AscentConfig ac;
      ac.eta = sb_eta;
      ac.seed = rng::derive_key(sb.seed, 4);
      ManyRuns runs = many_runs(H, sb_runs, ac);
      json ov = json::array();
      for (int r = 0; r < sb_runs; ++r) {
        json row = json::array();
        for (int s = 0; s < sb_runs; ++s) row.push_back(runs.overlaps(r, s));
        ov.push_back(row);
      }
      emit_json(sb.out, cfg, json{{"energies", runs.energies}, {"overlaps", ov}});
    } else if (tree->parsed()) {
      Mixture m = Mixture::from_json_file(tr.mixture);
      std::vector<double> schedule;
      if (!tr_schedule.empty()) {
        std::stringstream ss(tr_schedule);
        std::string tok;
        while (std::getline(ss, tok, ',')) schedule.push_back(std::stod(tok));
      } else {
        schedule = s_refinement(m);
      }
      json cfg = {{"subcommand", "tree"}, {"mixture", tr.mixture}, {"n", tr_n},
                  {"k", tr_k}, {"delta", tr_delta}, {"eps", tr_eps},
                  {"schedule", schedule}, {"restarts", tr_restarts},
                  {"prune", tr_prune}, {"seed", tr.seed}};
      Hamiltonian H = sample(m, tr_n, tr.seed);
      TreeBudgets budgets;
      budgets.restarts = tr_restarts;
      budgets.seed = rng::derive_key(tr.seed, 5);
      UltraTree t = build_tree(H, schedule, tr_k, tr_delta, tr_eps, budgets);
      if (tr_prune) t = prune_overlap(prune_energy(t, tr_eps), tr_delta);
      UltraReport rep = verify_ultrametric(t, true);
      json doc;
      doc["version"] = kVersion;
      doc["config"] = cfg;
      doc["result"] = json::parse(tree_to_json(t));
      doc["result"]["ultrametric"] = {{"worst", rep.worst}, {"pass", rep.pass},
                                      {"pair", {rep.u, rep.v}}};
      write_text(tr.out, doc.dump(2) + "\n");
      if (!tr_sidecar.empty()) write_sidecar(t, tr_n, tr_sidecar);
    } else if (tilt->parsed()) {
      Mixture m = Mixture::from_json_file(tl.mixture);
      json cfg = {{"subcommand", "tilt"}, {"mixture", tl.mixture}, {"p", tl_p},
                  {"x", tl_x}};
      emit_json(tl.out, cfg, json{{"gs", tilted_gs(m, tl_p, tl_x)}});
    }
  } catch (const budget_error& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
