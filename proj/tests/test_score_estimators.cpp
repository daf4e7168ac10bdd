#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dsm/score_estimators.hpp"
#include "test_support.hpp"

using namespace dsm;
using testsup::fig1_mixture;

namespace {
const GaussianMixture1D kStdNormal{{{1.0, 0.0, 1.0}}};
}

TEST_CASE("conditional score closed forms") {
    CHECK(conditional_score(0.0, 0.5, 0.5, 1) == doctest::Approx(-2.0));
    CHECK(conditional_score(3.1, -0.4, 0.5, 2) == doctest::Approx(-4.0));
    CHECK(conditional_score(1.0, 2.0, 0.7, 3) == 0.0);
    CHECK(conditional_score(1.0, 2.0, 0.7, 5) == 0.0);
    CHECK_THROWS_AS(conditional_score(0, 0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(conditional_score(0, 0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("h1 equals the conditional score exactly") {
    const auto marginal = analytic_marginal(fig1_mixture(), 0.5);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const double x0 = rng.uniform(-2, 6), x_t = rng.uniform(-2, 6);
        CHECK(h_term(1, x0, x_t, 0.5, marginal) == conditional_score(x0, x_t, 0.5, 1));
    }
}

TEST_CASE("score operator applied to h1 reproduces the three-term identity") {
    const double sigma = 0.6;
    const auto perturbed = fig1_mixture().perturbed(sigma);
    auto marg1 = [&](double x) { return perturbed.log_density_derivative(x, 1); };
    const auto marginal = analytic_marginal(fig1_mixture(), sigma);

    const HkTerm h1 = make_h1(sigma);
    const HkTerm h2 = apply_score_operator(h1, marg1, sigma);
    CHECK(h2.order == 2);

    Rng rng(17);
    for (int i = 0; i < 25; ++i) {
        const double x0 = rng.uniform(-1, 5), x_t = rng.uniform(-1, 5);
        const double sc = conditional_score(x0, x_t, sigma, 1);
        const double sm = marg1(x_t);
        // term for term: s2(x_t|x0) + s(x_t|x0)^2 - s(x_t|x0) s(x_t)
        const double expected = -1.0 / (sigma * sigma) + sc * sc - sc * sm;
        CHECK(h2.value(x0, x_t) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(h_term(2, x0, x_t, sigma, marginal) == doctest::Approx(expected).epsilon(1e-12));
    }

    // degenerate one-point prior: s(x_t|x0) == s(x_t), outer products cancel
    const GaussianMixture1D point{{{1.0, 1.3, 1e-9}}};
    const auto pm = analytic_marginal(point, sigma);
    const double h2_point = h_term(2, 1.3, 2.0, sigma, pm);
    CHECK(h2_point == doctest::Approx(-1.0 / (sigma * sigma)).epsilon(1e-5));
}

TEST_CASE("operator iterates to order three consistently with the closed-form chain") {
    const double sigma = 0.8;
    const auto perturbed = fig1_mixture().perturbed(sigma);
    auto marg1 = [&](double x) { return perturbed.log_density_derivative(x, 1); };
    const auto marginal = analytic_marginal(fig1_mixture(), sigma);

    const HkTerm h3 = apply_score_operator(apply_score_operator(make_h1(sigma), marg1, sigma),
                                           marg1, sigma);
    CHECK(h3.order == 3);
    Rng rng(4);
    for (int i = 0; i < 10; ++i) {
        const double x0 = rng.uniform(0, 4), x_t = rng.uniform(0, 4);
        const double direct = h_term(3, x0, x_t, sigma, marginal);
        // the operator route differentiates h2 by finite differences
        CHECK(h3.value(x0, x_t) == doctest::Approx(direct).epsilon(1e-5));
    }
}

TEST_CASE("monte-carlo score estimates converge to analytic derivatives") {
    Rng rng(11);

    SUBCASE("k=1 on the fig1 mixture") {
        const double sigma = 0.5;
        const auto perturbed = fig1_mixture().perturbed(sigma);
        for (double x_t : {-0.5, 1.0, 2.5, 3.9}) {
            const auto est = estimate_score_mc(fig1_mixture(), sigma, x_t, 1, 200000, rng.split(1));
            const double want = perturbed.log_density_derivative(x_t, 1);
            CHECK(std::abs(est.estimate - want) < 3.0 * est.std_err + 1e-9);
        }
    }

    SUBCASE("k=2 closed-form Gaussian") {
        const auto est = estimate_score_mc(kStdNormal, 1.0, 0.0, 2, 200000, rng.split(2));
        CHECK(std::abs(est.estimate - (-0.5)) < 3.0 * est.std_err);
        // E[h2] is -1/(s^2+sigma^2) at every x_t, not just the origin
        const auto est2 = estimate_score_mc(kStdNormal, 1.0, 1.7, 2, 200000, rng.split(3));
        CHECK(std::abs(est2.estimate - (-0.5)) < 3.0 * est2.std_err);
    }

    SUBCASE("k=3 against the analytic third derivative") {
        const double sigma = 0.5;
        const auto perturbed = fig1_mixture().perturbed(sigma);
        const auto est = estimate_score_mc(fig1_mixture(), sigma, 2.0, 3, 400000, rng.split(4));
        const double want = perturbed.log_density_derivative(2.0, 3);
        CHECK(std::abs(est.estimate - want) < 3.0 * est.std_err);
    }

    SUBCASE("k=5 goes through the finite-difference fallback") {
        const double sigma = 0.8;
        const auto perturbed = fig1_mixture().perturbed(sigma);
        const auto est = estimate_score_mc(fig1_mixture(), sigma, 1.2, 5, 200000, rng.split(5));
        const double want = perturbed.log_density_derivative(1.2, 5);
        CHECK(std::abs(est.estimate - want) < 3.0 * est.std_err + 1e-3 * std::abs(want));
    }

    SUBCASE("rejections") {
        CHECK_THROWS_AS(estimate_score_mc(kStdNormal, 1.0, 0.0, 7, 100, rng), std::invalid_argument);
        CHECK_THROWS_AS(estimate_score_mc(kStdNormal, 1.0, 0.0, 1, 1, rng), std::invalid_argument);
    }

    SUBCASE("determinism in the rng key") {
        const auto a = estimate_score_mc(fig1_mixture(), 0.5, 1.0, 2, 50000, Rng(42));
        const auto b = estimate_score_mc(fig1_mixture(), 0.5, 1.0, 2, 50000, Rng(42));
        CHECK(a.estimate == b.estimate);
        CHECK(a.std_err == b.std_err);
    }
}

TEST_CASE("second-order estimators: delta=0 is unbiased, delta shifts as derived") {
    Rng rng(21);
    // prior N(0,1), sigma=1: marginal N(0,2), H = -0.5 everywhere, s(0) = 0
    for (auto kind : {EstimatorKind::T1, EstimatorKind::T2, EstimatorKind::T3}) {
        const auto est = second_order_estimate(kind, kStdNormal, 1.0, 0.0, 0.0, 400000, rng.split(1));
        CHECK(std::abs(est.estimate - (-0.5)) < 3.0 * est.std_err);
    }

    // T2 picks up +delta^2
    const auto t2 = second_order_estimate(EstimatorKind::T2, kStdNormal, 1.0, 0.0, 0.1, 400000,
                                          rng.split(2));
    CHECK(std::abs(t2.estimate - (-0.49)) < 3.0 * t2.std_err);

    // T3 at a zero-score point picks up -delta^2
    const auto t3 = second_order_estimate(EstimatorKind::T3, kStdNormal, 1.0, 0.0, 0.1, 400000,
                                          rng.split(3));
    CHECK(std::abs(t3.estimate - (-0.51)) < 3.0 * t3.std_err);
}

TEST_CASE("bias table: signs at the zero-score point") {
    // x_t = 0 has s(x_t) = 0 by symmetry for the standard normal prior
    const std::vector<double> grid{0.0};
    const double delta = 0.2;
    Rng rng(31);

    const auto t1 = estimator_bias_variance(EstimatorKind::T1, kStdNormal, 1.0, grid, delta, 20000,
                                            24, rng);
    const auto t2 = estimator_bias_variance(EstimatorKind::T2, kStdNormal, 1.0, grid, delta, 20000,
                                            24, rng);
    const auto t3 = estimator_bias_variance(EstimatorKind::T3, kStdNormal, 1.0, grid, delta, 20000,
                                            24, rng);

    CHECK(std::abs(t1[0].bias) <= 3.0 * t1[0].std_err);
    CHECK(t2[0].bias > 0.0);
    CHECK(std::abs(t2[0].bias - delta * delta) <= 3.0 * t2[0].std_err);
    CHECK(t3[0].bias < 0.0);
    CHECK(std::abs(t3[0].bias + delta * delta) <= 3.0 * t3[0].std_err);

    CHECK_THROWS_AS(estimator_bias_variance(EstimatorKind::T1, kStdNormal, 1.0, grid, 0.0, 100, 5,
                                            rng),
                    std::invalid_argument);
}

TEST_CASE("bias table: all estimators unbiased at delta=0 across a grid") {
    const std::vector<double> grid{-0.8, 0.4, 1.6, 3.2, 4.1};
    Rng rng(37);
    for (auto kind : {EstimatorKind::T1, EstimatorKind::T2, EstimatorKind::T3}) {
        const auto rows = estimator_bias_variance(kind, fig1_mixture(), 0.7, grid, 0.0, 20000, 24,
                                                  rng);
        for (const auto& r : rows) CHECK(std::abs(r.bias) <= 3.0 * r.std_err);
    }
}

TEST_CASE("T1 bias vanishes in expectation over the marginal") {
    // at fixed x_t the T1 bias is -delta s(x_t); averaged over x_t ~ p_t it
    // cancels because the expected score is zero
    const double sigma = 1.0, delta = 0.2;
    const auto perturbed = fig1_mixture().perturbed(sigma);
    Rng rng(43);
    const int draws = 400;
    double mean = 0.0, var = 0.0;
    std::vector<double> biases(draws);
    for (int i = 0; i < draws; ++i) {
        const double x_t = perturbed.sample_one(rng);
        const auto est = second_order_estimate(EstimatorKind::T1, fig1_mixture(), sigma, x_t, delta,
                                               4000, rng.split(1000 + i));
        biases[i] = est.estimate - perturbed.log_density_derivative(x_t, 2);
        mean += biases[i];
    }
    mean /= draws;
    for (double b : biases) var += (b - mean) * (b - mean);
    var /= (draws - 1);
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(var / draws));
}
