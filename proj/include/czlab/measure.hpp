#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace czlab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;

/// Closed ball B(center, radius). Dilation eta*B keeps the center.
struct Ball {
  Vec center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vec c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
  }

  Ball scaled(double eta) const { return Ball(center, eta * radius); }
  bool contains(const Vec& x) const { return (x - center).norm() <= radius; }
};

/// Finite atomic measure: N atoms in R^d with complex weights.
/// Atoms are stored one per row; the measure is immutable after construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(Eigen::MatrixXd atoms, Eigen::VectorXcd weights);

  Eigen::Index size() const { return atoms_.rows(); }
  bool empty() const { return atoms_.rows() == 0; }
  Eigen::Index dimension() const { return atoms_.cols(); }

  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const Eigen::VectorXcd& weights() const { return weights_; }
  Vec atom(Eigen::Index i) const { return atoms_.row(i).transpose(); }
  Complex weight(Eigen::Index i) const { return weights_(i); }

  /// True iff every weight is real and nonnegative.
  bool is_positive(double tol = 0.0) const;

  /// Max pairwise atom distance. O(N^2); for N > 1e5 callers should prefer
  /// bounding_box_diameter() below.
  double diameter() const;
  /// Diagonal of the axis-aligned bounding box; upper bound on diameter().
  double bounding_box_diameter() const;

  /// Min over atoms of the distance to the nearest other atom.
  double nearest_neighbor_spacing() const;

  DiscreteMeasure translated(const Vec& v) const;
  DiscreteMeasure with_weights(Eigen::VectorXcd w) const;

  /// Measure with weights |w_j| (positive part used by the measure-version CZ).
  DiscreteMeasure abs() const;

 private:
  Eigen::MatrixXd atoms_;    // N x d
  Eigen::VectorXcd weights_; // N
};

/// Values of a function sampled at the atoms of a fixed measure.
struct FunctionOnMeasure {
  Eigen::VectorXcd values;

  static FunctionOnMeasure constant(const DiscreteMeasure& m, Complex c) {
    return {Eigen::VectorXcd::Constant(m.size(), c)};
  }
};

double total_variation(const DiscreteMeasure& m);

/// Sum of weights of atoms inside the closed ball.
Complex ball_mass(const DiscreteMeasure& m, const Ball& b);

/// Dyadic radius grid from the nearest-neighbor spacing of m up to r_max.
std::vector<double> dyadic_radius_grid(const DiscreteMeasure& m, double r_max);

/// sup over atoms x and dyadic radii r of m(B(x,r)) / r^n.
double growth_constant(const DiscreteMeasure& m, int n);

struct ADRegularityConstants {
  double c_lower = 0.0;
  double c_upper = 0.0;
  bool regular() const { return c_lower > 0.0; }
};

ADRegularityConstants ad_regularity_constants(const DiscreteMeasure& m, int n);

DiscreteMeasure restrict(const DiscreteMeasure& m,
                         const std::function<bool(const Vec&)>& pred);

/// dist(x, A) <= eps for a finite point set A.
bool neighborhood_contains(const std::vector<Vec>& a, double eps, const Vec& x);

/// Atomwise sum; atoms at identical coordinates are merged (weights added).
DiscreteMeasure merge(const std::vector<DiscreteMeasure>& parts);

// CSV format: header x1,...,xd,w_re,w_im, one atom per row.
DiscreteMeasure read_measure_csv(const std::string& path);
void write_measure_csv(const DiscreteMeasure& m, const std::string& path);

}  // namespace czlab
