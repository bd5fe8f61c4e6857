#pragma once

#include <vector>

#include "czlab/measure.hpp"

namespace czlab {

struct DecompositionParams {
  double lambda = 1.0;
  double p = 1.0;
  int d = 2;
  std::vector<double> radius_grid;  // dyadic candidates; filled by decompose if empty
};

/// phi_i = alpha * indicator of A_i, a constant-phase correction supported on
/// boundary atoms inside R_i.
struct PhiFunction {
  Complex alpha = 0.0;
  std::vector<Eigen::Index> support_indices;  // A_i as Gamma-atom indices
  int ball_index = -1;
  double threshold = 0.0;  // realized 2^m lambda level of the A_i cut
};

struct StoppingBall {
  Eigen::Index atom = -1;  // nu-atom index of the center
  Ball ball;
};

struct CZDecomposition {
  std::vector<Ball> balls_B;
  std::vector<Ball> balls_R;                 // R_i = 10 B_i
  std::vector<Eigen::Index> ball_centers;    // nu-atom index per ball
  Eigen::VectorXi cover_count;               // per nu atom: sum_k chi_{B_k}
  std::vector<PhiFunction> phis;
  Eigen::VectorXcd h;        // good density on Gamma
  Eigen::VectorXcd h_tilde;  // h + sum_i phi_i (density of kappa)
  DiscreteMeasure kappa;     // h_tilde * Gamma
  std::vector<DiscreteMeasure> betas;
  std::vector<Eigen::Index> good_atoms;  // nu atoms outside every B_i
  double lambda = 0.0;
  double p = 1.0;
  int d = 2;
  bool adregular_mode = false;  // Gamma role played by mu itself
};

/// For each nu atom, the maximal ball (dyadic grid) whose |f|^p nu mass beats
/// lambda^p/2^{d+1} mu(2B) while every larger dilation stays below the bar.
/// Atoms with no qualifying ball belong to the good set.
std::vector<StoppingBall> find_stopping_balls(const FunctionOnMeasure& f,
                                              const DiscreteMeasure& nu,
                                              const DiscreteMeasure& mu,
                                              const DecompositionParams& params);

/// Greedy Besicovitch subfamily: descending radius, keep a ball iff its center
/// is uncovered. Every candidate center ends up covered by a kept ball.
std::vector<StoppingBall> besicovitch_select(const std::vector<StoppingBall>& candidates);

std::vector<PhiFunction> build_phi(const std::vector<StoppingBall>& selected,
                                   const DiscreteMeasure& gamma,
                                   const FunctionOnMeasure& f,
                                   const DiscreteMeasure& nu,
                                   const DecompositionParams& params);

CZDecomposition decompose(const FunctionOnMeasure& f, const DiscreteMeasure& nu,
                          const DiscreteMeasure& mu, const DiscreteMeasure& gamma,
                          DecompositionParams params);

/// Level at the given percentile of the per-atom local stopping ratios
/// (2^{d+1} int_B |f|^p dnu / mu(2B))^{1/p} over the candidate grid, clamped
/// above the admissibility threshold.
double percentile_lambda(const FunctionOnMeasure& f, const DiscreteMeasure& nu,
                         const DiscreteMeasure& mu, const DiscreteMeasure& gamma,
                         double p, int d, double percentile);

/// Splits a complex measure nu into (phase function f, positive part |nu|)
/// so that nu = f |nu| atomwise.
std::pair<FunctionOnMeasure, DiscreteMeasure> phase_split(const DiscreteMeasure& nu);

/// Measure version (p = 1): nu = f |nu| with f the phase of the weights.
CZDecomposition decompose_measure(const DiscreteMeasure& nu_complex,
                                  const DiscreteMeasure& mu,
                                  const DiscreteMeasure& gamma, double lambda);

/// AD-regular variant: the boundary role is played by mu itself.
CZDecomposition decompose_adregular(const FunctionOnMeasure& f,
                                    const DiscreteMeasure& nu,
                                    const DiscreteMeasure& mu_adreg,
                                    DecompositionParams params);

struct ClauseResult {
  bool pass = true;
  double observed = 0.0;  // clause constant or residual, see name
};

struct InvariantReport {
  ClauseResult cc1;           // observed: min margin ratio lhs/rhs over balls
  ClauseResult cc2;           // observed: max ratio over eta in {3,4,8}
  ClauseResult cc3;           // observed: ||h||_inf / lambda
  ClauseResult cc4;           // observed: max abs defect
  ClauseResult cc5;           // observed: c1 = sup_Gamma sum |phi_i| / lambda
  ClauseResult cc6;           // observed: max per-ball constant
  ClauseResult overlap;       // observed: max sum chi_{B_i}
  ClauseResult beta_zero;     // observed: max |total beta_i|
  ClauseResult beta_support;  // spt beta_i inside R_i
  ClauseResult reassembly;    // observed: relative TV residual
  ClauseResult radius_cap;    // r(B_i) <= 3 diam Gamma
  bool all_pass() const;
};

/// Independent re-computation of every theorem clause; shares no code with the
/// builder beyond the measure primitives.
InvariantReport verify_decomposition(const CZDecomposition& dec,
                                     const FunctionOnMeasure& f,
                                     const DiscreteMeasure& nu,
                                     const DiscreteMeasure& mu,
                                     const DiscreteMeasure& gamma);

}  // namespace czlab
