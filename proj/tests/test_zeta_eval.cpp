#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "shintani/accum.hpp"
#include "shintani/gamma.hpp"
#include "shintani/zeta_eval.hpp"
#include "testutil.hpp"

using shintani::Error;
using shintani::ErrorKind;
using shintani::EvalRequest;
using shintani::SigmaMatrix;

namespace {

// independent 1-D oracles: plain partial sums, no shared code with eval_zeta
double zeta_oracle(double s, long terms = 200000) {
  double sum = 0.0;
  for (long k = terms; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  return sum;
}

// sum over t >= 2 of (t-1) t^-4 = zeta(3) - zeta(4), the 1-D collapse of the
// all-ones 2x2 matrix at s = (2,2)
double collapse_oracle(long terms = 200000) {
  double sum = 0.0;
  for (long t = terms; t >= 2; --t)
    sum += (static_cast<double>(t) - 1.0) / std::pow(static_cast<double>(t), 4.0);
  return sum;
}

}  // namespace

TEST_CASE("neumaier summation survives cancellation") {
  shintani::NeumaierSum acc;
  acc.add(1.0);
  acc.add(1e100);
  acc.add(1.0);
  acc.add(-1e100);
  CHECK(acc.value() == 2.0);  // naive summation returns 0

  shintani::NeumaierComplexSum cacc;
  cacc.add({1.0, -1.0});
  cacc.add({1e100, 1e100});
  cacc.add({1.0, -1.0});
  cacc.add({-1e100, -1e100});
  CHECK(cacc.value() == std::complex<double>(2.0, -2.0));
}

TEST_CASE("gamma function against the standard library") {
  for (double x = 1.0; x <= 30.0; x += 0.37) {
    double got = shintani::gamma_fn(x);
    double ref = std::tgamma(x);
    CHECK(std::abs(got - ref) <= 1e-12 * std::abs(ref));
  }
  CHECK(shintani::gamma_fn(0.5) == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  // reflection below 1/2
  CHECK(shintani::gamma_fn(-0.5) == Catch::Approx(-2.0 * std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(shintani::gamma_fn(-1.5) == Catch::Approx(4.0 * std::sqrt(M_PI) / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(shintani::gamma_fn(0.0), Error);
  CHECK_THROWS_AS(shintani::gamma_fn(-3.0), Error);
  CHECK_THROWS_AS(shintani::gamma_fn(std::nan("")), Error);
}

TEST_CASE("one-dimensional zeta values converge to the oracles") {
  EvalRequest req;
  req.A = SigmaMatrix{1, 1, {1}};
  req.s = {{2.0, 0.0}};
  req.rel_tol = 2e-7;
  req.max_terms_per_axis = std::int64_t{1} << 24;
  auto res = shintani::eval_zeta(req);
  CHECK(res.converged);
  CHECK(std::abs(res.value.real() - M_PI * M_PI / 6.0) < 1e-6);
  CHECK(res.value.imag() == 0.0);
  CHECK(res.error_estimate < 1e-5);

  req.s = {{3.0, 0.0}};
  res = shintani::eval_zeta(req);
  CHECK(res.converged);
  CHECK(std::abs(res.value.real() - zeta_oracle(3.0)) < 1e-7);
}

TEST_CASE("chain summation agrees with the generic odometer") {
  std::vector<std::complex<double>> s{{1.0, 0.0}, {2.0, 0.0}};
  SigmaMatrix A{2, 2, {1, 0, 1, 1}};
  auto plan = shintani::detail::chain_plan(A, s);
  REQUIRE(plan.has_value());
  std::vector<double> e{1.0, 2.0};
  std::vector<double> s_re{1.0, 2.0};
  for (std::int64_t M : {8, 16, 33, 64}) {
    double dp = shintani::detail::chain_box_sum<double>(e, M);
    double brute = shintani::detail::generic_box_sum<double>(A, s_re, M);
    CHECK(dp == Catch::Approx(brute).epsilon(1e-13));
  }

  // three-level chain with a complex exponent
  SigmaMatrix B{3, 3, {1, 0, 0, 1, 1, 0, 1, 1, 1}};
  std::vector<std::complex<double>> sc{{1.5, 0.25}, {1.0, 0.0}, {2.0, -0.5}};
  auto planB = shintani::detail::chain_plan(B, sc);
  REQUIRE(planB.has_value());
  for (std::int64_t M : {5, 12, 21}) {
    auto dp = shintani::detail::chain_box_sum<std::complex<double>>(planB->e, M);
    auto brute = shintani::detail::generic_box_sum<std::complex<double>>(B, sc, M);
    CHECK(std::abs(dp - brute) <= 1e-12 * (1.0 + std::abs(brute)));
  }
}

TEST_CASE("chain detection requires nested 0/1 rows") {
  std::vector<std::complex<double>> s2{{2.0, 0.0}, {2.0, 0.0}};
  CHECK(shintani::detail::chain_plan(SigmaMatrix{2, 2, {1, 1, 1, 1}}, s2).has_value());
  CHECK(shintani::detail::chain_plan(SigmaMatrix{2, 2, {1, 0, 1, 1}}, s2).has_value());
  // crossing supports: {1} and {2} nest in neither direction
  CHECK_FALSE(shintani::detail::chain_plan(SigmaMatrix{2, 2, {1, 0, 0, 1}}, s2).has_value());
  // non-0/1 entry
  CHECK_FALSE(shintani::detail::chain_plan(SigmaMatrix{2, 2, {2, 0, 1, 1}}, s2).has_value());
  // largest row must touch every column
  CHECK_FALSE(
      shintani::detail::chain_plan(SigmaMatrix{2, 3, {1, 0, 0, 1, 1, 0}}, s2).has_value());
}

TEST_CASE("nested double sum reproduces zeta(3)") {
  EvalRequest req;
  req.A = SigmaMatrix{2, 2, {1, 0, 1, 1}};
  req.s = {{1.0, 0.0}, {2.0, 0.0}};
  req.rel_tol = 2e-6;
  req.max_terms_per_axis = std::int64_t{1} << 24;
  auto res = shintani::eval_zeta(req);
  CHECK(res.converged);
  CHECK(std::abs(res.value.real() - zeta_oracle(3.0)) < 1e-5);
}

TEST_CASE("all-ones matrix reproduces the 1-D collapse") {
  EvalRequest req;
  req.A = SigmaMatrix{2, 2, {1, 1, 1, 1}};
  req.s = {{2.0, 0.0}, {2.0, 0.0}};
  req.rel_tol = 1e-7;
  auto res = shintani::eval_zeta(req);
  CHECK(res.converged);
  CHECK(std::abs(res.value.real() - collapse_oracle()) < 1e-6);
}

TEST_CASE("generic path handles non-0/1 entries") {
  EvalRequest req;
  req.A = SigmaMatrix{2, 2, {2, 1, 1, 1}};
  req.s = {{2.0, 0.0}, {2.0, 0.0}};
  req.rel_tol = 1e-6;
  req.max_terms_per_axis = 1 << 13;
  auto res = shintani::eval_zeta(req);
  CHECK(res.converged);
  // brute truncation oracle at a fixed box
  double brute = 0.0;
  for (long m1 = 4000; m1 >= 1; --m1)
    for (long m2 = 4000; m2 >= 1; --m2) {
      double l1 = 2.0 * m1 + m2, l2 = static_cast<double>(m1 + m2);
      brute += 1.0 / (l1 * l1 * l2 * l2);
    }
  CHECK(res.value.real() == Catch::Approx(brute).margin(1e-6));
}

TEST_CASE("complex exponents run through the complex accumulator") {
  EvalRequest req;
  req.A = SigmaMatrix{1, 1, {1}};
  req.s = {{2.0, 0.5}};
  req.rel_tol = 1e-6;
  req.max_terms_per_axis = std::int64_t{1} << 22;
  auto res = shintani::eval_zeta(req);
  std::complex<double> direct{0.0, 0.0};
  for (long k = 1; k <= 2000000; ++k)
    direct += std::exp(-std::complex<double>(2.0, 0.5) * std::log(static_cast<double>(k)));
  CHECK(std::abs(res.value - direct) < 1e-5);
  CHECK(res.value.imag() != 0.0);
}

TEST_CASE("evaluation rejects bad requests") {
  EvalRequest req;
  req.A = SigmaMatrix{2, 2, {1, 1, 1, 1}};
  req.s = {{2.0, 0.0}};
  CHECK_THROWS_AS(shintani::eval_zeta(req), Error);  // dimension

  req.s = {{2.0, 0.0}, {2.0, 0.0}};
  req.rel_tol = -1.0;
  CHECK_THROWS_AS(shintani::eval_zeta(req), Error);

  req.rel_tol = 1e-7;
  req.max_terms_per_axis = 8;
  CHECK_THROWS_AS(shintani::eval_zeta(req), Error);

  req.max_terms_per_axis = 1 << 20;
  req.s = {{0.5, 0.0}, {1.0, 0.0}};
  try {
    shintani::eval_zeta(req);
    FAIL("divergent request accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideConvergenceRegion);
    CHECK(std::string(e.what()).find("sigma_1 + sigma_2 > 2") != std::string::npos);
  }

  // the region test uses real parts only
  req.s = {{1.2, 10.0}, {0.9, -3.0}};
  CHECK_NOTHROW(shintani::eval_zeta(req));
}

TEST_CASE("non-converged results are flagged, not thrown") {
  EvalRequest req;
  req.A = SigmaMatrix{1, 1, {1}};
  req.s = {{1.05, 0.0}};  // painfully slow series
  req.rel_tol = 1e-10;
  req.max_terms_per_axis = 64;
  auto res = shintani::eval_zeta(req);
  CHECK_FALSE(res.converged);
  CHECK(res.terms_used == 64);
  CHECK(res.error_estimate > 0.0);
}

TEST_CASE("kernel closed form matches hand values") {
  SigmaMatrix one{1, 1, {1}};
  CHECK(shintani::eval_kernel(one, {std::log(2.0)}) == Catch::Approx(1.0).epsilon(1e-12));

  SigmaMatrix tri{2, 2, {1, 0, 1, 1}};
  double expected = 1.0 / (std::expm1(2.0) * std::expm1(1.0));
  CHECK(shintani::eval_kernel(tri, {1.0, 1.0}) == Catch::Approx(expected).epsilon(1e-12));

  try {
    shintani::eval_kernel(tri, {1.0, 0.0});
    FAIL("nonpositive epsilon accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositiveEpsilon);
    CHECK(e.indices() == std::vector<int>{2});
  }
  CHECK_THROWS_AS(shintani::eval_kernel(tri, {1.0}), Error);
}

TEST_CASE("mellin identity holds at reference points") {
  for (double s : {2.0, 3.0, 4.5}) {
    auto res = shintani::mellin_cross_check_1d(s);
    CHECK(res.abs_diff < 1e-4);
    CHECK(res.lhs == Catch::Approx(shintani::gamma_fn(s) * zeta_oracle(s)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(shintani::mellin_cross_check_1d(1.0), Error);
  CHECK_THROWS_AS(shintani::mellin_cross_check_1d(2.0, 4), Error);
  CHECK_THROWS_AS(shintani::mellin_cross_check_1d(2.0, 100, 0.5), Error);
}
