#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "czlab/geometry.hpp"
#include "czlab/kernels.hpp"
#include "czlab/operators.hpp"

namespace czlab {

/// Replayable experiment result: parameters carry everything needed to rerun.
struct ExperimentRecord {
  std::string name;
  nlohmann::json parameters;
  nlohmann::json results;
  bool ok = true;

  nlohmann::json to_json() const {
    return {{"name", name}, {"parameters", parameters}, {"results", results}, {"ok", ok}};
  }
};

/// Self-norm of the Cauchy transform on stage-n Cantor measures and the
/// log-log fit of norm against stage. eps is half the minimum interatomic
/// distance, so truncation only removes self-pairs.
ExperimentRecord norm_growth(int stage_min, int stage_max, int reps = 1,
                             double tol = 1e-8, std::uint64_t seed = 1,
                             int threads = 1);

/// Checks the exact lambda and lambda^{1/2} scaling identities of the Cauchy
/// transform norm under measure scaling, plus translation invariance.
ExperimentRecord scaling_identities(const DiscreteMeasure& sigma,
                                    const std::vector<double>& lam_values,
                                    double tol = 1e-10, std::uint64_t seed = 1);

/// Cross norm ||C||_{L^2(mu) -> L^2(nu)} on the section-5 construction against
/// the N^{-1/4} ||C_{sigma_N}|| block-restriction lower bound.
ExperimentRecord cross_norm_failure(const std::vector<int>& n_values,
                                    double spacing = 100.0, int reps = 1,
                                    double tol = 1e-8, std::uint64_t seed = 1);

/// Weak-type ratio W(p, eps) = sup_lambda lambda^p mu{|T_eps(f nu)| > lambda} / ||f||_p^p
/// over a log-spaced lambda grid between the 10th and 99.9th percentile of the
/// observed values, for each eps in the grid.
ExperimentRecord weak_type_scan(const Scenario& scenario, const KernelSpec& kernel,
                                const FunctionOnMeasure& f,
                                const std::vector<double>& eps_grid, double p);

/// Ratio ||M_R^mu f||_{L^p(nu)} / ||f||_{L^p(mu)} and the q-radial variant.
ExperimentRecord maximal_bound_check(const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu,
                                     const FunctionOnMeasure& f, double p, double q);

/// Geometric eps grid for a scenario: halvings of base_factor times the
/// minimum mu-to-nu separation. The anchor stays near the separation scale:
/// far above it T_eps decays toward zero and the weak-type ratio with it.
std::vector<double> scenario_eps_grid(const Scenario& sc, int halvings = 4,
                                      double base_factor = 4.0);

}  // namespace czlab
