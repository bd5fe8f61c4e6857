#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "czlab/cz.hpp"
#include "czlab/experiments.hpp"
#include "czlab/geometry.hpp"
#include "czlab/kernels.hpp"
#include "czlab/measure.hpp"
#include "czlab/operators.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace czlab;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

Scenario make_scenario(const std::string& kind, int n_gamma, int n_mu, int n_nu,
                       std::uint64_t seed) {
  if (kind == "halfplane") return halfplane_scenario(n_gamma, n_mu, n_nu, seed);
  if (kind == "lipschitz")
    return lipschitz_scenario({0.5, -0.8, 0.3, -0.2}, n_gamma, n_mu, n_nu, seed);
  throw CLI::ValidationError("--scenario must be halfplane or lipschitz");
}

json report_to_json(const InvariantReport& rep) {
  auto c = [](const ClauseResult& r) {
    return json{{"pass", r.pass}, {"observed", r.observed}};
  };
  return {{"cc1", c(rep.cc1)},       {"cc2", c(rep.cc2)},
          {"cc3", c(rep.cc3)},       {"cc4", c(rep.cc4)},
          {"cc5", c(rep.cc5)},       {"cc6", c(rep.cc6)},
          {"overlap", c(rep.overlap)},
          {"beta_zero", c(rep.beta_zero)},
          {"beta_support", c(rep.beta_support)},
          {"reassembly", c(rep.reassembly)},
          {"radius_cap", c(rep.radius_cap)},
          {"all_pass", rep.all_pass()}};
}

json decomposition_to_json(const CZDecomposition& dec) {
  json balls = json::array();
  for (size_t i = 0; i < dec.balls_B.size(); ++i) {
    balls.push_back({{"center", {dec.balls_B[i].center(0), dec.balls_B[i].center(1)}},
                     {"radius", dec.balls_B[i].radius},
                     {"radius_R", dec.balls_R[i].radius},
                     {"alpha_re", dec.phis[i].alpha.real()},
                     {"alpha_im", dec.phis[i].alpha.imag()},
                     {"support_indices", dec.phis[i].support_indices},
                     {"threshold", dec.phis[i].threshold}});
  }
  return {{"lambda", dec.lambda}, {"p", dec.p},
          {"n_balls", dec.balls_B.size()},
          {"n_good_atoms", dec.good_atoms.size()},
          {"balls", balls}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular integral laboratory: CZ decompositions, operator norms, "
               "Cantor-set counterexample experiments"};
  app.require_subcommand(1);

  std::string kernel_name = "cauchy";
  std::string out_dir = ".";
  std::string scenario_kind = "halfplane";
  std::uint64_t seed = 1;
  int threads = 1;
  bool sequential = false;
  app.add_option("--kernel", kernel_name, "cauchy|riesz|cmpt:m")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "row-block threads")->capture_default_str();
  app.add_flag("--sequential", sequential, "force single-threaded, bit-reproducible run");

  // generate
  auto* gen = app.add_subcommand("generate", "emit a measure/scenario as CSV + JSON sidecar");
  std::string what = "cantor";
  int stage = 3, reps = 1, n_stages = 3;
  double spacing = 100.0;
  int n_gamma = 64, n_mu = 48, n_nu = 48;
  gen->add_option("--what", what, "cantor|section5|halfplane|lipschitz")->capture_default_str();
  gen->add_option("--stage", stage)->capture_default_str();
  gen->add_option("--reps", reps)->capture_default_str();
  gen->add_option("--N", n_stages, "section5 stage cutoff")->capture_default_str();
  gen->add_option("--spacing", spacing)->capture_default_str();
  gen->add_option("--n-gamma", n_gamma)->capture_default_str();
  gen->add_option("--n-mu", n_mu)->capture_default_str();
  gen->add_option("--n-nu", n_nu)->capture_default_str();

  // norm
  auto* norm = app.add_subcommand("norm", "operator norm of the truncated kernel matrix");
  std::string source_csv, target_csv;
  double eps = 0.0, tol = 1e-8;
  int norm_stage = -1;
  norm->add_option("--source", source_csv, "source measure CSV");
  norm->add_option("--target", target_csv, "target measure CSV (defaults to source)");
  norm->add_option("--stage", norm_stage, "use the stage-n Cantor measure instead of CSVs");
  norm->add_option("--reps", reps)->capture_default_str();
  norm->add_option("--eps", eps, "truncation radius (0 = principal value)")->capture_default_str();
  norm->add_option("--tol", tol)->capture_default_str();

  // decompose
  auto* dec_cmd = app.add_subcommand("decompose", "run the CZ decomposition and verify it");
  double lambda = 0.0, p = 1.0;
  std::string nu_csv, mu_csv, gamma_csv;
  bool adreg = false, measure_version = false;
  dec_cmd->add_option("--scenario", scenario_kind, "halfplane|lipschitz (generated)")->capture_default_str();
  dec_cmd->add_option("--nu", nu_csv, "nu measure CSV (overrides --scenario)");
  dec_cmd->add_option("--mu", mu_csv, "mu measure CSV");
  dec_cmd->add_option("--gamma", gamma_csv, "boundary measure CSV");
  dec_cmd->add_option("--lambda", lambda, "level (0 = auto: 90th percentile)")->capture_default_str();
  dec_cmd->add_option("--p", p)->capture_default_str();
  dec_cmd->add_option("--n-gamma", n_gamma)->capture_default_str();
  dec_cmd->add_option("--n-mu", n_mu)->capture_default_str();
  dec_cmd->add_option("--n-nu", n_nu)->capture_default_str();
  dec_cmd->add_flag("--adregular", adreg, "AD-regular variant (boundary role played by mu)");
  dec_cmd->add_flag("--measure", measure_version, "measure version (p = 1, f = weight phase)");

  // weaktype
  auto* wt = app.add_subcommand("weaktype", "weak-type ratio scan over an eps grid");
  wt->add_option("--scenario", scenario_kind)->capture_default_str();
  wt->add_option("--p", p)->capture_default_str();
  wt->add_option("--n-gamma", n_gamma)->capture_default_str();
  wt->add_option("--n-mu", n_mu)->capture_default_str();
  wt->add_option("--n-nu", n_nu)->capture_default_str();

  // maximal
  auto* mx = app.add_subcommand("maximal", "radial maximal operator bound check");
  double q = 1.0;
  mx->add_option("--scenario", scenario_kind)->capture_default_str();
  mx->add_option("--p", p, "Lebesgue exponent (> 1)")->capture_default_str();
  mx->add_option("--q", q, "q-radial variant exponent (1 = plain)")->capture_default_str();
  mx->add_option("--n-gamma", n_gamma)->capture_default_str();
  mx->add_option("--n-mu", n_mu)->capture_default_str();
  mx->add_option("--n-nu", n_nu)->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "canned section-5 experiments");
  std::string exp_name;
  exp->add_option("name", exp_name, "section5-growth|section5-scaling|section5-cross")
      ->required();
  int stage_min = 2, stage_max = 5;
  exp->add_option("--stage-min", stage_min)->capture_default_str();
  exp->add_option("--stage", stage_max, "max stage / cutoff N")->capture_default_str();
  exp->add_option("--reps", reps)->capture_default_str();
  exp->add_option("--spacing", spacing)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (sequential) threads = 1;
  fs::create_directories(out_dir);

  try {
    if (*gen) {
      json sidecar = {{"what", what}, {"seed", seed}};
      if (what == "cantor") {
        DiscreteMeasure m = cantor_measure(stage, reps);
        write_measure_csv(m, fs::path(out_dir) / "cantor.csv");
        sidecar["stage"] = stage;
        sidecar["reps"] = reps;
        sidecar["atoms"] = m.size();
      } else if (what == "section5") {
        Section5Construction c = section5_measures(n_stages, spacing, reps);
        write_measure_csv(c.mu, fs::path(out_dir) / "mu.csv");
        write_measure_csv(c.nu, fs::path(out_dir) / "nu.csv");
        sidecar["N"] = n_stages;
        sidecar["spacing"] = spacing;
        sidecar["reps"] = reps;
      } else {
        Scenario sc = make_scenario(what, n_gamma, n_mu, n_nu, seed);
        write_measure_csv(sc.boundary_measure, fs::path(out_dir) / "gamma.csv");
        write_measure_csv(sc.mu, fs::path(out_dir) / "mu.csv");
        write_measure_csv(sc.nu, fs::path(out_dir) / "nu.csv");
        sidecar["n_gamma"] = n_gamma;
        sidecar["n_mu"] = n_mu;
        sidecar["n_nu"] = n_nu;
      }
      write_json(fs::path(out_dir) / "generate.json", sidecar);
      return 0;
    }

    if (*norm) {
      KernelSpec k = KernelSpec::parse(kernel_name);
      DiscreteMeasure src = norm_stage >= 0 ? cantor_measure(norm_stage, reps)
                                            : read_measure_csv(source_csv);
      DiscreteMeasure tgt = target_csv.empty() ? src : read_measure_csv(target_csv);
      if (norm_stage >= 0 && eps == 0.0) eps = 0.5 * src.nearest_neighbor_spacing();
      NormEstimate est = operator_norm_matfree(k, src, tgt, eps, tol, 20000, seed, threads);
      json j = {{"kernel", k.name()},    {"eps", eps},
                {"n_source", src.size()}, {"n_target", tgt.size()},
                {"value", est.value},     {"iterations", est.iterations},
                {"residual", est.residual}, {"seed", seed}};
      std::cout << j.dump(2) << "\n";
      write_json(fs::path(out_dir) / "norm.json", j);
      return 0;
    }

    if (*dec_cmd) {
      DiscreteMeasure nu, mu, gamma;
      if (!nu_csv.empty()) {
        nu = read_measure_csv(nu_csv);
        mu = read_measure_csv(mu_csv);
        gamma = read_measure_csv(gamma_csv);
      } else {
        Scenario sc = make_scenario(scenario_kind, n_gamma, n_mu, n_nu, seed);
        nu = sc.nu;
        mu = sc.mu;
        gamma = sc.boundary_measure;
      }
      CZDecomposition dec;
      FunctionOnMeasure f;
      DiscreteMeasure nu_pos = nu;
      if (measure_version) {
        if (lambda == 0.0)
          lambda = 1.001 * 8.0 * total_variation(nu) / total_variation(mu) + 1.0;
        dec = decompose_measure(nu, mu, gamma, lambda);
        std::tie(f, nu_pos) = phase_split(nu);
      } else {
        f = FunctionOnMeasure::constant(nu, 1.0);
        DecompositionParams params;
        params.p = p;
        params.d = 2;
        if (lambda == 0.0)
          lambda = percentile_lambda(f, nu, mu, adreg ? mu : gamma, p, 2, 90.0);
        params.lambda = lambda;
        dec = adreg ? decompose_adregular(f, nu, mu, params)
                    : decompose(f, nu, mu, gamma, params);
      }
      InvariantReport rep =
          verify_decomposition(dec, f, nu_pos, mu, adreg ? mu : gamma);
      json j = {{"decomposition", decomposition_to_json(dec)},
                {"report", report_to_json(rep)}};
      std::cout << j.dump(2) << "\n";
      write_json(fs::path(out_dir) / "decompose.json", j);
      return rep.all_pass() ? 0 : 1;
    }

    if (*wt) {
      Scenario sc = make_scenario(scenario_kind, n_gamma, n_mu, n_nu, seed);
      FunctionOnMeasure f = FunctionOnMeasure::constant(sc.nu, 1.0);
      KernelSpec k = KernelSpec::parse(kernel_name);
      ExperimentRecord rec = weak_type_scan(sc, k, f, scenario_eps_grid(sc), p);
      std::cout << rec.to_json().dump(2) << "\n";
      write_json(fs::path(out_dir) / "weaktype.json", rec.to_json());
      return rec.ok ? 0 : 1;
    }

    if (*mx) {
      Scenario sc = make_scenario(scenario_kind, n_gamma, n_mu, n_nu, seed);
      FunctionOnMeasure f = FunctionOnMeasure::constant(sc.mu, 1.0);
      ExperimentRecord rec = maximal_bound_check(sc.mu, sc.nu, f, p, q);
      std::cout << rec.to_json().dump(2) << "\n";
      write_json(fs::path(out_dir) / "maximal.json", rec.to_json());
      return rec.ok ? 0 : 1;
    }

    if (*exp) {
      ExperimentRecord rec;
      if (exp_name == "section5-growth")
        rec = norm_growth(stage_min, stage_max, reps, 1e-8, seed, threads);
      else if (exp_name == "section5-scaling")
        rec = scaling_identities(cantor_measure(stage_max, reps), {0.5, 2.0, 4.0, 10.0},
                                 1e-10, seed);
      else if (exp_name == "section5-cross") {
        std::vector<int> ns;
        for (int n = 1; n <= stage_max; ++n) ns.push_back(n);
        rec = cross_norm_failure(ns, spacing, reps, 1e-8, seed);
      } else {
        throw CLI::ValidationError("unknown experiment '" + exp_name + "'");
      }
      std::cout << rec.to_json().dump(2) << "\n";
      write_json(fs::path(out_dir) / (rec.name + ".json"), rec.to_json());
      return rec.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
