#pragma once

#include <cstdint>
#include <vector>

#include "czlab/measure.hpp"

namespace czlab {

enum class DomainKind { HalfPlane, SubgraphPiecewiseLinear };

/// Separated-measure configuration: boundary Gamma with its (d-1)-measure,
/// mu supported on/above Gamma (in the closed upper region), nu strictly below.
struct Scenario {
  DiscreteMeasure boundary_measure;  // discretization of H^{d-1} on Gamma
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  DomainKind domain = DomainKind::HalfPlane;

  // piecewise-linear boundary graph; (0,0)-(1,0) for the half-plane
  std::vector<double> break_x;
  std::vector<double> break_y;

  double boundary_height(double x) const;
};

/// Section 5 configuration: mu = sum lambda_n sigma_n, nu = sum sigma_n with
/// lambda_n = n^{-1/2} and translated stage-n Cantor measures sigma_n.
struct Section5Construction {
  int stages = 0;
  std::vector<DiscreteMeasure> sigma;
  std::vector<double> lambda;
  std::vector<Vec> z;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

/// Stage-n corner-quarters Cantor measure on the unit square: 4^stage squares
/// of side 4^-stage, mass 4^-stage each, split uniformly over reps_per_square
/// deterministic sample points (reps = 1 uses the square center).
DiscreteMeasure cantor_measure(int stage, int reps_per_square = 1);

Section5Construction section5_measures(int n_stages, double spacing = 100.0,
                                       int reps = 1);

/// Scales down weights inside growth-violating balls until
/// m(B(x,r)) <= target * r^n on the candidate grid. Positive m required.
DiscreteMeasure renormalize_growth(const DiscreteMeasure& m, int n,
                                   double target = 2.0);

Scenario halfplane_scenario(int n_gamma, int n_mu, int n_nu, std::uint64_t seed);

Scenario lipschitz_scenario(const std::vector<double>& slopes, int n_gamma,
                            int n_mu, int n_nu, std::uint64_t seed);

}  // namespace czlab
