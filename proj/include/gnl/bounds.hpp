#pragma once

#include <cstdint>
#include <vector>

#include "gnl/model.hpp"

namespace gnl {

/// Value of the alternating maximization together with how it was obtained.
/// `value` is a certified lower bound (it is the objective evaluated at an
/// explicit feasible pair); global optimality is not guaranteed.
struct SigmaStarResult {
  double value = 0.0;
  bool converged = false;
  int restarts = 0;
  int best_restart = 0;
};

/// All bound parameters for one model. The *_shape quantities are
/// constant-free: no universal constant is asserted, only the functional
/// form, so comparisons against sampled norms are ratio statements.
struct BoundReport {
  double sigma_col = 0.0;
  double sigma_row = 0.0;
  double v_frob = 0.0;
  double sigma_star = 0.0;
  double w_proxy = 0.0;
  double nck_lower = 0.0;        // sigma_col + sigma_row
  double nck_upper_shape = 0.0;  // sqrt(log d) (sigma_col + sigma_row)
  double main_bound_shape = 0.0; // sigma_col + sigma_row + d^eps v_frob
  double conjecture_shape = 0.0; // sigma_col + sigma_row + sqrt(log d) sigma_star
  double epsilon = 0.0;
  bool sigma_star_converged = false;
  int sigma_star_restarts = 0;
};

/// (||sum A_k^T A_k||^(1/2), ||sum A_k A_k^T||^(1/2)) via the symmetric
/// eigensolver on the PSD Gram sums.
std::pair<double, double> sigma_params(const CoeffModel& m);

/// Largest singular value of B |-> (<A_k, B>)_k over unit-Frobenius B,
/// equivalently the square root of the top eigenvalue of the covariance
/// operator. Power iteration on covariance_apply with relative Rayleigh
/// tolerance 1e-10 and at most 2000 iterations; throws std::runtime_error
/// with an iteration trace on non-convergence. For trace-orthogonal
/// families the value equals max_k ||A_k||_F.
double v_frob(const CoeffModel& m);

/// Dense cross-check of v_frob: materializes the (rows*cols)^2 covariance
/// operator (allowed up to rows*cols <= 4096) and calls the eigensolver.
double v_frob_dense(const CoeffModel& m);

/// sqrt(sum_k <A_k v, w>^2) for unit v, w.
double sigma_star_objective(const CoeffModel& m, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& w);

/// Alternating maximization of sigma_star_objective: for fixed v the
/// optimal w is the top singular direction of [A_1 v ... A_n v], and
/// symmetrically for v. Alternates until the value changes by less than
/// 1e-8 relative (at most 500 alternations), over `restarts` seeded starts;
/// exact value ties keep the lowest restart index.
SigmaStarResult sigma_star(const CoeffModel& m, int restarts,
                           std::uint64_t seed, int threads = 1);

/// 2 (max_k ||A_k||_F)^(1/2) ||sum_k A_k^2||^(1/4), evaluated on the
/// self-adjoint dilation when the family is not self-adjoint.
double w_proxy(const CoeffModel& m);

/// Assembles the shape quantities from already-computed parameters; d is
/// the larger matrix dimension. For d = 1 the sqrt(log d) factor is
/// replaced by 1.
BoundReport shape_report(double sigma_col, double sigma_row, double vf,
                         const SigmaStarResult& ss, double wp, int d,
                         double eps);

/// Fills a BoundReport at the given epsilon (0 < eps <= 1).
BoundReport assemble(const CoeffModel& m, double eps, int restarts = 32,
                     std::uint64_t seed = 0, int threads = 1);

/// Aggregate parameter for a sum of independent square blocks:
/// (sum_r (||E X_r^* X_r||^2 + ||E X_r X_r^*||^2 + d^eps ||E X_r (x) X_r||^2))^(1/2).
double samplecov_bound(const std::vector<CoeffModel>& models, double eps);

}  // namespace gnl
