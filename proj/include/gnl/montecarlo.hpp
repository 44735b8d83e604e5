#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnl/model.hpp"

namespace gnl {

/// Sample-mean estimate with its standard error. `sigma_star` is filled by
/// callers that want Gaussian-concentration half-widths.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  std::optional<double> sigma_star;

  /// Half-width t with P(|estimand - mean of one draw| >= t) <= delta under
  /// the Gaussian tail exp(-t^2 / (2 sigma*^2)): t = sigma* sqrt(2 ln(2/delta)).
  double concentration_halfwidth(double delta) const;
};

/// Default sample count: 200 for d >= 64, 10000 below.
long default_samples(int d);

/// Spectral norms of n_samples independent draws; draw i uses the derived
/// stream (seed, i), results land in slot i, so every statistic downstream
/// is bit-identical for any thread count.
std::vector<double> opnorm_samples(const CoeffModel& m, long n_samples,
                                   std::uint64_t seed, int threads = 1);

/// Mean of ||X|| over n_samples draws (n_samples == 0 picks the default).
MCEstimate estimate_opnorm_mean(const CoeffModel& m, long n_samples,
                                std::uint64_t seed, int threads = 1);

/// Mean of ||X||^2 over the same norm samples.
MCEstimate estimate_second_moment(const CoeffModel& m, long n_samples,
                                  std::uint64_t seed, int threads = 1);

/// Log-log least-squares fit of mean ||X|| against dimension.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<int> dims;
  std::vector<double> means;
  std::vector<double> residuals;  // ln(mean) - fit, per dimension
};

/// Runs the named ensemble at each dimension (params.d is overridden) and
/// fits ln E||X|| ~ intercept + slope ln d. Needs at least three dimensions.
ScalingFit scaling_fit(const std::string& family, const std::vector<int>& dims,
                       const GenParams& params, long n_samples,
                       std::uint64_t seed, int threads = 1);

}  // namespace gnl
