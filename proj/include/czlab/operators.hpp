#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "czlab/kernels.hpp"
#include "czlab/measure.hpp"

namespace czlab {

/// T_eps nu evaluated at the points X: out[i] = sum_{|X_i - y_j| > eps} k(X_i, y_j) w_j.
/// eps = 0 keeps the principal-value convention: exact self-pairs are skipped.
Eigen::VectorXcd truncated_apply(const KernelSpec& k, const DiscreteMeasure& nu,
                                 const std::vector<Vec>& x, double eps);

/// Dense symmetrically weighted matrix of T_eps : L^2(source) -> L^2(target),
/// entry(i,j) = sqrt(tau_i) k(x_i, y_j) [|x_i - y_j| > eps] sqrt(sigma_j).
/// Its largest singular value is the L^2 operator norm.
class OperatorMatrix {
 public:
  OperatorMatrix(Eigen::MatrixXcd entries, double eps)
      : entries_(std::move(entries)), eps_(eps) {}

  const Eigen::MatrixXcd& entries() const { return entries_; }
  double eps() const { return eps_; }
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }

 private:
  Eigen::MatrixXcd entries_;
  double eps_;
};

OperatorMatrix assemble_matrix(const KernelSpec& k, const DiscreteMeasure& source,
                               const DiscreteMeasure& target, double eps);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Largest singular value by power iteration on the Gram operator B^H B with a
/// seeded start vector. Convergence is certified by the eigen-residual, or,
/// when the top singular values are nearly degenerate (the eigen-residual then
/// stalls), by stagnation of the monotone Rayleigh quotient.
NormEstimate operator_norm(const OperatorMatrix& b, double tol = 1e-8,
                           int max_iter = 5000, std::uint64_t seed = 1);

/// Matrix-free variant: the weighted kernel matrix is never stored; rows are
/// generated on the fly. threads > 1 partitions rows; per-row accumulation
/// order is fixed, so results do not depend on the thread count.
NormEstimate operator_norm_matfree(const KernelSpec& k, const DiscreteMeasure& source,
                                   const DiscreteMeasure& target, double eps,
                                   double tol = 1e-8, int max_iter = 5000,
                                   std::uint64_t seed = 1, int threads = 1);

/// M_R^mu f(x) = sup_r r^{1-d} int_{B(x,r)} |f| dmu, sup attained at atom distances.
double radial_maximal(const DiscreteMeasure& mu, const FunctionOnMeasure& f,
                      const Vec& x, int d);

double q_radial_maximal(const DiscreteMeasure& mu, const FunctionOnMeasure& f,
                        const Vec& x, int d, double q);

struct TailBound {
  double lhs = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Checks int_{|y-x|>=rho} |y-x|^-(n+eta) dmu <= c(n,eta) c0 / rho^eta with the
/// explicit constant c(n,eta) = 2^n / (1 - 2^-eta). The growth precondition
/// mu(B(x,r)) <= c0 r^n for r >= rho is verified and an error thrown naming the
/// violating radius if it fails.
TailBound tail_bound_check(const DiscreteMeasure& mu, const Vec& x, double rho,
                           int n, double eta, double c0);

}  // namespace czlab
