#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnl/model.hpp"
#include "gnl/montecarlo.hpp"
#include "gnl/partitions.hpp"

namespace gnl {

/// Outcome of one inequality check. `max_ratio` is the largest observed
/// LHS / RHS (1 is the theoretical ceiling); `detail` names the worst case.
struct CheckReport {
  std::string name;
  bool pass = false;
  double max_ratio = 0.0;
  long checks = 0;
  long violations = 0;
  std::string detail;
};

/// Exact Gaussian moment E Tr(X^p) as a sum over pair partitions of the
/// labeled trace products. Requires a self-adjoint family, even p in
/// [2, 14], and n^(p/2) (p-1)!! <= 1e8.
double wick_trace_moment(const CoeffModel& m, int p);

/// Single-partition contribution: sum over label maps constant on the
/// blocks of nu of Tr(A_{f(1)} ... A_{f(p)}).
double partition_term(const CoeffModel& m, const PairPartition& nu);

/// Checks |partition term| <= Tr((sum_k A_k^2)^(p/2)) for every pair
/// partition of [p].
CheckReport buchholz_check(const CoeffModel& m, int p);

/// Checks the moment recursion
///   E Tr(X^p) <= 2^p Tr((sum A_k^2)^(p/2))
///                + c_p (max_k ||A_k||_F)^2 ||sum A_k^2|| E Tr(X^(p-4))
/// with c_p = 8^p for general sign patterns and additionally c_p = p^4 when
/// all entries are nonnegative. Requires a self-adjoint trace-orthogonal
/// family and even p >= 4.
CheckReport recursion_check(const CoeffModel& m, int p);

/// Random-conjugation cross-term bound: for seeded orthogonal Q_1..Q_5 and
/// symmetric Y,
///   |sum_{k1,k2} Tr(Q1 Y^2 Q2 A_{k1} Q3 A_{k2} Q4 A_{k1} Q5 A_{k2})|
///     <= (max_k ||A_k||_F)^2 ||sum A_k^2|| Tr(Y^2).
/// Requires a self-adjoint trace-orthogonal family.
CheckReport tracecross_check(const CoeffModel& m, int trials,
                             std::uint64_t seed);

/// Reproducing identity sum_k B_k^T L B_k = Tr(L) I for an orthonormal
/// basis {B_k} of the d x d matrices. Throws when the basis is not
/// orthonormal; passes when the residual is <= 1e-8 ||L||_F d.
CheckReport orthtr_check(const std::vector<Eigen::MatrixXd>& basis,
                         const Eigen::MatrixXd& l);

/// Monte Carlo estimate of E Tr(X^p) (p >= 1; model must be square).
MCEstimate mc_trace_moment(const CoeffModel& m, int p, long n_samples,
                           std::uint64_t seed, int threads = 1);

/// Estimates several trace moments from one shared set of draws.
std::vector<MCEstimate> mc_trace_moments(const CoeffModel& m,
                                         const std::vector<int>& ps,
                                         long n_samples, std::uint64_t seed,
                                         int threads = 1);

}  // namespace gnl
