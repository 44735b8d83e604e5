#include "gnl/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "gnl/linalg.hpp"
#include "gnl/parallel.hpp"
#include "gnl/rng.hpp"

namespace gnl {

double MCEstimate::concentration_halfwidth(double delta) const {
  if (!sigma_star)
    throw std::invalid_argument(
        "concentration_halfwidth: sigma_star not supplied");
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("concentration_halfwidth: delta not in (0,1)");
  return *sigma_star * std::sqrt(2.0 * std::log(2.0 / delta));
}

long default_samples(int d) { return d >= 64 ? 200 : 10000; }

std::vector<double> opnorm_samples(const CoeffModel& m, long n_samples,
                                   std::uint64_t seed, int threads) {
  if (n_samples <= 0)
    throw std::invalid_argument("opnorm_samples: need a positive sample count");
  std::vector<double> norms(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, threads, [&](long i) {
    norms[static_cast<std::size_t>(i)] =
        spectral_norm(m.sample(rng::derive(seed, static_cast<std::uint64_t>(i))));
  });
  return norms;
}

namespace {

MCEstimate reduce(const std::vector<double>& xs, std::uint64_t seed) {
  MCEstimate est;
  est.n_samples = static_cast<long>(xs.size());
  est.seed = seed;
  double sum = 0.0;
  for (double x : xs) sum += x;
  est.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - est.mean) * (x - est.mean);
    est.std_error = std::sqrt(
        ss / (static_cast<double>(xs.size()) *
              static_cast<double>(xs.size() - 1)));
  }
  return est;
}

}  // namespace

MCEstimate estimate_opnorm_mean(const CoeffModel& m, long n_samples,
                                std::uint64_t seed, int threads) {
  if (n_samples == 0) n_samples = default_samples(std::max(m.rows(), m.cols()));
  return reduce(opnorm_samples(m, n_samples, seed, threads), seed);
}

MCEstimate estimate_second_moment(const CoeffModel& m, long n_samples,
                                  std::uint64_t seed, int threads) {
  if (n_samples == 0) n_samples = default_samples(std::max(m.rows(), m.cols()));
  auto norms = opnorm_samples(m, n_samples, seed, threads);
  for (double& x : norms) x *= x;
  return reduce(norms, seed);
}

ScalingFit scaling_fit(const std::string& family, const std::vector<int>& dims,
                       const GenParams& params, long n_samples,
                       std::uint64_t seed, int threads) {
  if (dims.size() < 3)
    throw std::invalid_argument("scaling_fit: need at least three dimensions");
  ScalingFit fit;
  fit.dims = dims;
  for (int d : dims) {
    GenParams p = params;
    p.d = d;
    const CoeffModel m = gen_named(family, p);
    const long n = n_samples > 0 ? n_samples : default_samples(d);
    fit.means.push_back(
        estimate_opnorm_mean(m, n, rng::derive(seed, static_cast<std::uint64_t>(d)),
                             threads)
            .mean);
  }
  const auto n = static_cast<double>(dims.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double x = std::log(static_cast<double>(dims[i]));
    const double y = std::log(fit.means[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double x = std::log(static_cast<double>(dims[i]));
    fit.residuals.push_back(std::log(fit.means[i]) - fit.intercept -
                            fit.slope * x);
  }
  return fit;
}

}  // namespace gnl
