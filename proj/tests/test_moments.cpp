#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gnl/linalg.hpp"
#include "gnl/model.hpp"
#include "gnl/moments.hpp"
#include "gnl/partitions.hpp"
#include "gnl/rng.hpp"

using namespace gnl;
using Eigen::MatrixXd;

namespace {

// Frobenius Gram-Schmidt over random symmetric matrices: a self-adjoint
// trace-orthogonal family that is not a named ensemble.
CoeffModel sym_orthonormal_family(int d, int n, std::uint64_t seed) {
  std::vector<MatrixXd> out;
  for (int k = 0; k < n; ++k) {
    MatrixXd a = random_symmetric(d, rng::derive(seed, static_cast<std::uint64_t>(k)));
    for (const auto& b : out) a -= a.cwiseProduct(b).sum() * b;
    a /= a.norm();
    out.push_back(a);
  }
  return build_model(out);
}

}  // namespace

TEST_CASE("scalar moments are the double factorials") {
  const auto one = build_model({MatrixXd::Ones(1, 1)});
  CHECK(wick_trace_moment(one, 2) == 1.0);
  CHECK(wick_trace_moment(one, 4) == 3.0);
  CHECK(wick_trace_moment(one, 6) == 15.0);
}

TEST_CASE("diagonal model moments are d times the double factorial") {
  const auto m = gen_named("diagonal", {.d = 5});
  CHECK(wick_trace_moment(m, 2) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(wick_trace_moment(m, 4) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(wick_trace_moment(m, 6) == doctest::Approx(75.0).epsilon(1e-14));
}

TEST_CASE("second moment equals the squared Frobenius mass") {
  const auto m = gen_named("toeplitz", {.d = 4});
  CHECK(wick_trace_moment(m, 2) == doctest::Approx(16.0).epsilon(1e-13));
  const auto s = sym_orthonormal_family(3, 4, 2);
  CHECK(wick_trace_moment(s, 2) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("moment equals the sum of its partition terms exactly") {
  const auto s = sym_orthonormal_family(3, 4, 7);
  for (int p : {4, 6}) {
    double total = 0.0;
    for (const auto& nu : enum_pair_partitions(p)) total += partition_term(s, nu);
    CHECK(wick_trace_moment(s, p) == total);
  }
  const auto dil = selfadjoint_dilation(gen_named("iid", {.d = 2}));
  double total = 0.0;
  for (const auto& nu : enum_pair_partitions(6)) total += partition_term(dil, nu);
  CHECK(wick_trace_moment(dil, 6) == total);
}

TEST_CASE("partition terms of projection families count the dimension") {
  const auto m = gen_named("diagonal", {.d = 5});
  for (const auto& nu : enum_pair_partitions(4))
    CHECK(partition_term(m, nu) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("moment domain and budget guard") {
  const auto m = gen_named("diagonal", {.d = 3});
  CHECK_THROWS_AS(wick_trace_moment(m, 3), std::invalid_argument);
  CHECK_THROWS_AS(wick_trace_moment(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(wick_trace_moment(m, 16), std::invalid_argument);
  const auto ns = gen_named("iid", {.d = 2});
  CHECK_THROWS_AS(wick_trace_moment(ns, 4), std::invalid_argument);
  const auto big = selfadjoint_dilation(gen_named("iid", {.d = 10}));
  CHECK_THROWS_AS(wick_trace_moment(big, 8), std::runtime_error);
}

TEST_CASE("per-partition trace bound holds with ratio at most one") {
  for (int p : {4, 6}) {
    const auto rep = buchholz_check(gen_named("toeplitz", {.d = 4}), p);
    CHECK(rep.name == "buchholz");
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio <= 1.0 + 1e-10);
    CHECK(rep.checks == (p == 4 ? 3 : 15));
  }
  const auto s = sym_orthonormal_family(4, 5, 3);
  const auto rep = buchholz_check(s, 6);
  CHECK(rep.pass);
  CHECK(!rep.detail.empty());
}

TEST_CASE("moment recursion holds for both constants") {
  const auto dil = selfadjoint_dilation(gen_named("circulant", {.d = 4}));
  const auto rep = recursion_check(dil, 6);
  CHECK(rep.name == "recursion");
  CHECK(rep.pass);
  CHECK(rep.checks == 2);  // general and nonnegative variants
  CHECK(rep.max_ratio <= 1.0);

  const auto toe = recursion_check(gen_named("toeplitz", {.d = 4}), 4);
  CHECK(toe.pass);

  const auto s = sym_orthonormal_family(3, 4, 9);
  const auto gen_only = recursion_check(s, 4);
  CHECK(gen_only.pass);
  CHECK(gen_only.checks == 1);  // signed entries: general constant only
}

TEST_CASE("moment recursion rejects unsuitable input") {
  const MatrixXd a = random_symmetric(3, 1);
  const auto dup = build_model({a, a});
  CHECK_THROWS_AS(recursion_check(dup, 4), std::invalid_argument);
  const auto m = gen_named("toeplitz", {.d = 3});
  CHECK_THROWS_AS(recursion_check(m, 2), std::invalid_argument);
  CHECK_THROWS_AS(recursion_check(m, 5), std::invalid_argument);
  CHECK_THROWS_AS(recursion_check(gen_named("iid", {.d = 2}), 4),
                  std::invalid_argument);
}

TEST_CASE("conjugated cross terms stay under the Frobenius-norm budget") {
  const auto rep = tracecross_check(gen_named("toeplitz", {.d = 4}), 50, 3);
  CHECK(rep.name == "tracecross");
  CHECK(rep.pass);
  CHECK(rep.checks == 50);
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio <= 1.0);

  const auto dia = tracecross_check(gen_named("diagonal", {.d = 6}), 50, 4);
  CHECK(dia.pass);

  const MatrixXd a = random_symmetric(3, 1);
  CHECK_THROWS_AS(tracecross_check(build_model({a, a}), 10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(tracecross_check(gen_named("toeplitz", {.d = 3}), 0, 0),
                  std::invalid_argument);
}

TEST_CASE("reproducing identity for a full orthonormal matrix basis") {
  std::vector<MatrixXd> basis;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MatrixXd b = MatrixXd::Zero(3, 3);
      b(i, j) = 1.0;
      basis.push_back(std::move(b));
    }
  const MatrixXd l = random_symmetric(3, 5);
  const auto rep = orthtr_check(basis, l);
  CHECK(rep.name == "orthtr");
  CHECK(rep.pass);
  CHECK(rep.max_ratio <= 1e-4);  // residual well inside the allowance

  auto scaled = basis;
  scaled[0] *= 2.0;
  CHECK_THROWS_AS(orthtr_check(scaled, l), std::invalid_argument);
  basis.pop_back();
  CHECK_THROWS_AS(orthtr_check(basis, l), std::invalid_argument);
}

TEST_CASE("sampled scalar moments match the double factorials") {
  const auto one = build_model({MatrixXd::Ones(1, 1)});
  const auto m2 = mc_trace_moment(one, 2, 20000, 1);
  CHECK(std::abs(m2.mean - 1.0) <= 4.0 * m2.std_error);
  const auto m4 = mc_trace_moment(one, 4, 20000, 1);
  CHECK(std::abs(m4.mean - 3.0) <= 4.0 * m4.std_error);
  const auto m3 = mc_trace_moment(one, 3, 20000, 1);
  CHECK(std::abs(m3.mean) <= 4.0 * m3.std_error);
}

TEST_CASE("sampled moments agree with the exact expansion") {
  const auto s = sym_orthonormal_family(3, 5, 13);
  const double exact = wick_trace_moment(s, 4);
  const auto mc = mc_trace_moment(s, 4, 40000, 2);
  CHECK(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
}

TEST_CASE("shared-draw moment batches are slotted and thread-stable") {
  const auto m = gen_named("toeplitz", {.d = 3});
  const auto batch = mc_trace_moments(m, {2, 4}, 500, 11, 1);
  REQUIRE(batch.size() == 2);
  const auto single = mc_trace_moment(m, 2, 500, 11, 1);
  CHECK(batch[0].mean == single.mean);
  CHECK(batch[0].std_error == single.std_error);
  const auto batch3 = mc_trace_moments(m, {2, 4}, 500, 11, 3);
  CHECK(batch[0].mean == batch3[0].mean);
  CHECK(batch[1].mean == batch3[1].mean);
  CHECK(batch[1].std_error == batch3[1].std_error);
}

TEST_CASE("sampled moments reject bad input") {
  const auto m = gen_named("toeplitz", {.d = 3});
  CHECK_THROWS_AS(mc_trace_moment(m, 0, 10, 0), std::invalid_argument);
  const CoeffModel rect(1, 2, {{{0, 0, 1.0}}});
  CHECK_THROWS_AS(mc_trace_moment(rect, 2, 10, 0), std::invalid_argument);
}
