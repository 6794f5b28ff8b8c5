#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stocklab/metrics.hpp"
#include "stocklab/rng.hpp"
#include "stocklab/stats.hpp"

using namespace stocklab;

TEST_CASE("perfect forecast scores zero error and r2 one") {
    const auto report = pointwise_metrics({7.0, 9.0}, {7.0, 9.0});
    CHECK(report.mse == 0.0);
    CHECK(report.rmse == 0.0);
    CHECK(report.mae == 0.0);
    CHECK(report.mape == 0.0);
    CHECK(report.mdape == 0.0);
    CHECK(report.smape == 0.0);
    CHECK(report.r2 == 1.0);
    CHECK(report.n == 2);
}

TEST_CASE("two-point example evaluates the definitions directly") {
    // Hand evaluation: errors (-10, 20); mse = (100+400)/2; mae = 15;
    // ape = (0.1, 0.1); smape ratios 10/105 and 20/190.
    const auto report = pointwise_metrics({100.0, 200.0}, {110.0, 180.0});
    CHECK(report.mse == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(report.rmse == doctest::Approx(15.811388300841896).epsilon(1e-12));
    CHECK(report.mae == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(report.mape == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(report.mdape == doctest::Approx(0.1).epsilon(1e-12));
    const double smape_expected = (10.0 / 105.0 + 20.0 / 190.0) / 2.0;  // 0.10025062656641603
    CHECK(report.smape == doctest::Approx(smape_expected).epsilon(1e-12));
}

TEST_CASE("rmse is the square root of mse") {
    // Reported pairing: mse 838.091687 with rmse 28.949813.
    CHECK(std::sqrt(838.091687) == doctest::Approx(28.949813).epsilon(1e-7));
    Rng rng(11);
    std::vector<double> actual, predicted;
    for (int i = 0; i < 64; ++i) {
        actual.push_back(rng.normal(50.0, 10.0));
        predicted.push_back(rng.normal(50.0, 10.0));
    }
    const auto report = pointwise_metrics(actual, predicted);
    CHECK(report.rmse * report.rmse == doctest::Approx(report.mse).epsilon(1e-12));
}

TEST_CASE("error paths and undefined sentinels") {
    CHECK_THROWS_AS(pointwise_metrics({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(pointwise_metrics({}, {}), std::invalid_argument);

    const auto with_zero = pointwise_metrics({0.0, 2.0}, {1.0, 1.0});
    CHECK(std::isnan(with_zero.mape));
    CHECK(std::isnan(with_zero.mdape));
    CHECK(with_zero.mse == doctest::Approx(1.0));
    CHECK(with_zero.mae == doctest::Approx(1.0));

    const auto constant_actual = pointwise_metrics({5.0, 5.0}, {4.0, 6.0});
    CHECK(std::isnan(constant_actual.r2));
}

TEST_CASE("scale equivariance and permutation invariance") {
    Rng rng(23);
    std::vector<double> actual, predicted;
    for (int i = 0; i < 40; ++i) {
        actual.push_back(rng.uniform(10.0, 100.0));
        predicted.push_back(rng.uniform(10.0, 100.0));
    }
    const auto base = pointwise_metrics(actual, predicted);

    const double c = 3.7;
    std::vector<double> actual_scaled = actual, predicted_scaled = predicted;
    for (double& v : actual_scaled) v *= c;
    for (double& v : predicted_scaled) v *= c;
    const auto scaled = pointwise_metrics(actual_scaled, predicted_scaled);
    CHECK(scaled.mae == doctest::Approx(c * base.mae).epsilon(1e-12));
    CHECK(scaled.rmse == doctest::Approx(c * base.rmse).epsilon(1e-12));
    CHECK(scaled.mape == doctest::Approx(base.mape).epsilon(1e-12));
    CHECK(scaled.mdape == doctest::Approx(base.mdape).epsilon(1e-12));
    CHECK(scaled.smape == doctest::Approx(base.smape).epsilon(1e-12));
    CHECK(scaled.r2 == doctest::Approx(base.r2).epsilon(1e-12));

    std::vector<std::size_t> order(actual.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i],
                  order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
    std::vector<double> actual_perm, predicted_perm;
    for (std::size_t i : order) {
        actual_perm.push_back(actual[i]);
        predicted_perm.push_back(predicted[i]);
    }
    const auto permuted = pointwise_metrics(actual_perm, predicted_perm);
    CHECK(permuted.mse == doctest::Approx(base.mse).epsilon(1e-12));
    CHECK(permuted.mae == doctest::Approx(base.mae).epsilon(1e-12));
    CHECK(permuted.smape == doctest::Approx(base.smape).epsilon(1e-12));
    CHECK(permuted.mdape == doctest::Approx(base.mdape).epsilon(1e-12));
    CHECK(permuted.r2 == doctest::Approx(base.r2).epsilon(1e-12));
}

TEST_CASE("smape stays in [0,2] and mean prediction scores exactly zero r2") {
    Rng rng(31);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> actual, predicted;
        for (int i = 0; i < 16; ++i) {
            actual.push_back(rng.normal(0.0, 20.0));
            predicted.push_back(rng.normal(0.0, 20.0));
        }
        const auto report = pointwise_metrics(actual, predicted);
        CHECK(report.smape >= 0.0);
        CHECK(report.smape <= 2.0);

        double sum = 0.0;
        for (double a : actual) sum += a;
        const double mean = sum / static_cast<double>(actual.size());
        const auto mean_report =
            pointwise_metrics(actual, std::vector<double>(actual.size(), mean));
        CHECK(mean_report.r2 == 0.0);
    }
}

TEST_CASE("interval coverage") {
    CHECK(interval_coverage({1.0, 2.0}, {0.0, 0.0}, {3.0, 3.0}) == 1.0);
    CHECK(interval_coverage({1.0, 2.0}, {-1e18, -1e18}, {1e18, 1e18}) == 1.0);
    CHECK(interval_coverage({1.0, 2.0, 3.0}, {0.0, 0.0, 3.5}, {2.0, 2.5, 4.0}) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(interval_coverage({1.0}, {0.0, 0.0}, {2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(interval_coverage({1.0}, {2.0}, {1.0}), std::invalid_argument);

    // Scaling bounds with the data leaves coverage unchanged.
    const double c = 2.5;
    CHECK(interval_coverage({c * 1.0, c * 2.0, c * 3.0}, {c * 0.0, c * 0.0, c * 3.5},
                            {c * 2.0, c * 2.5, c * 4.0}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("residual diagnostics histogram and qq") {
    const auto symmetric = residual_diagnostics({-1.0, 1.0}, 2);
    REQUIRE(symmetric.histogram.size() == 2);
    CHECK(symmetric.histogram[0].count == 1);
    CHECK(symmetric.histogram[1].count == 1);

    const auto single = residual_diagnostics({4.2}, 1);
    REQUIRE(single.qq.size() == 1);
    CHECK(single.qq[0].first == 0.0);  // median of the standard normal

    CHECK_THROWS_AS(residual_diagnostics({}, 3), std::invalid_argument);

    // Monte Carlo oracle: seeded standard-normal draws track the theoretical
    // quantiles. The full-range bound holds for this seed; the extreme order
    // statistics of 1000 draws fluctuate by ~0.3, so the seed is part of the
    // frozen expectation.
    Rng rng(12);
    std::vector<double> draws;
    for (int i = 0; i < 1000; ++i) draws.push_back(rng.normal());
    const auto diag = residual_diagnostics(draws, 30);
    std::size_t total = 0;
    for (const auto& bin : diag.histogram) total += bin.count;
    CHECK(total == draws.size());
    double worst = 0.0;
    for (std::size_t i = 1; i < diag.qq.size(); ++i) {
        CHECK(diag.qq[i].second >= diag.qq[i - 1].second);
        worst = std::max(worst, std::abs(diag.qq[i].second - diag.qq[i].first));
    }
    CHECK(worst < 0.2);

    // Seed-robust check over the central band (p in [0.05, 0.95]), where the
    // order statistics concentrate tightly.
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        Rng central_rng(seed);
        std::vector<double> sample;
        for (int i = 0; i < 1000; ++i) sample.push_back(central_rng.normal());
        const auto d = residual_diagnostics(sample, 30);
        const std::size_t n = d.qq.size();
        for (std::size_t i = n / 20; i < n - n / 20; ++i)
            CHECK(std::abs(d.qq[i].second - d.qq[i].first) < 0.2);
    }
}

TEST_CASE("normal quantile accuracy") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    for (double p : {0.001, 0.01, 0.2, 0.5, 0.77, 0.99, 0.9999})
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("report serialization uses the exact field names") {
    const auto report = pointwise_metrics({1.0, 2.0}, {1.5, 2.5});
    const std::string csv = report.to_csv();
    CHECK(csv.find("mse,rmse,mae,mape,mdape,smape,r2,n") == 0);
    const std::string json = report.to_json();
    for (const char* key : {"\"mse\":", "\"rmse\":", "\"mae\":", "\"mape\":", "\"mdape\":",
                            "\"smape\":", "\"r2\":", "\"n\":"})
        CHECK(json.find(key) != std::string::npos);
}
