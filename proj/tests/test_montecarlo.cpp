#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gnl/model.hpp"
#include "gnl/montecarlo.hpp"

using namespace gnl;
using Eigen::MatrixXd;

TEST_CASE("default sample counts switch at dimension 64") {
  CHECK(default_samples(64) == 200);
  CHECK(default_samples(200) == 200);
  CHECK(default_samples(63) == 10000);
  CHECK(default_samples(1) == 10000);
}

TEST_CASE("norm draws are slotted: thread- and length-stable") {
  const auto m = gen_named("toeplitz", {.d = 6});
  const auto a = opnorm_samples(m, 20, 9, 1);
  const auto b = opnorm_samples(m, 20, 9, 3);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const auto prefix = opnorm_samples(m, 10, 9, 2);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i] == a[i]);
}

TEST_CASE("scalar mean norm is the half-normal mean") {
  const auto one = build_model({MatrixXd::Ones(1, 1)});
  const auto est = estimate_opnorm_mean(one, 100000, 3);
  const double target = std::sqrt(2.0 / std::numbers::pi);
  CHECK(std::abs(est.mean - target) <= 4.0 * est.std_error);
  CHECK(est.n_samples == 100000);
  CHECK(est.seed == 3);
}

TEST_CASE("square ensemble mean norm sits at twice the semicircle edge") {
  const auto m = gen_named("iid", {.d = 100});
  const auto est = estimate_opnorm_mean(m, 0, 1);  // default: 200 draws
  CHECK(est.n_samples == 200);
  const double ratio = est.mean / 10.0;
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.05);
}

TEST_CASE("diagonal ensemble mean norm tracks the Gaussian maximum") {
  const auto m = gen_named("diagonal", {.d = 1024});
  const auto est = estimate_opnorm_mean(m, 0, 2);
  const double target = std::sqrt(2.0 * std::log(1024.0));
  CHECK(est.mean > 0.85 * target);
  CHECK(est.mean < 1.05 * target);
}

TEST_CASE("second moment of the square ensemble") {
  const auto m = gen_named("iid", {.d = 64});
  const auto est = estimate_second_moment(m, 0, 4);
  CHECK(est.mean > 3.2 * 64.0);
  CHECK(est.mean < 4.4 * 64.0);
}

TEST_CASE("tail half-width needs the rank-one parameter and a valid level") {
  MCEstimate est;
  est.mean = 1.0;
  CHECK_THROWS_AS(est.concentration_halfwidth(0.01), std::invalid_argument);
  est.sigma_star = 2.0;
  CHECK(est.concentration_halfwidth(0.01) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * std::log(200.0))).epsilon(1e-14));
  CHECK_THROWS_AS(est.concentration_halfwidth(0.0), std::invalid_argument);
  CHECK_THROWS_AS(est.concentration_halfwidth(1.0), std::invalid_argument);
}

TEST_CASE("log-log growth fit brackets the known exponents") {
  GenParams p;
  const auto iid = scaling_fit("iid", {32, 64, 128}, p, 100, 5);
  CHECK(iid.slope > 0.45);
  CHECK(iid.slope < 0.65);
  REQUIRE(iid.means.size() == 3);
  REQUIRE(iid.residuals.size() == 3);
  CHECK(iid.dims == std::vector<int>{32, 64, 128});
  for (double m : iid.means) CHECK(m > 0.0);

  const auto diag = scaling_fit("diagonal", {32, 64, 128}, p, 200, 5);
  CHECK(diag.slope >= 0.0);
  CHECK(diag.slope < 0.25);
  CHECK(diag.slope < iid.slope);

  CHECK_THROWS_AS(scaling_fit("iid", {8, 16}, p, 50, 0), std::invalid_argument);
}

TEST_CASE("norm estimates accept rectangular models") {
  GenParams p;
  p.covariances = {MatrixXd::Identity(3, 3), 2.0 * MatrixXd::Identity(3, 3)};
  const auto m = gen_named("indep_rows", p);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  const auto est = estimate_opnorm_mean(m, 500, 6);
  CHECK(est.mean > 0.0);
  CHECK(est.std_error > 0.0);
}
