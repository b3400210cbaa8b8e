#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "toricnn/rng.hpp"
#include "toricnn/stats.hpp"

using namespace toricnn;

TEST_CASE("Wilson interval basics") {
    const Interval ci = wilson_interval(50, 100, 0.95);
    CHECK(ci.lo > 0.40);
    CHECK(ci.hi < 0.60);
    CHECK(ci.lo < 0.5);
    CHECK(ci.hi > 0.5);
    const Interval zero = wilson_interval(0, 100, 0.95);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK_THROWS_AS(wilson_interval(0, 0, 0.95), std::invalid_argument);
}

TEST_CASE("censored exponential MLE closed forms") {
    // failures at 1,2,3 and two runs censored at 3: (1+2+3+3+3)/3 = 4.
    const CensoredMean m = censored_exponential_mean({1, 2, 3, 3, 3}, {0, 0, 0, 1, 1});
    CHECK(m.defined);
    CHECK(m.t_hat == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(m.failures == 3);
    CHECK(m.censored == 2);
    CHECK(m.ci.lo < 4.0);
    CHECK(m.ci.hi > 4.0);

    // No censoring: plain sample mean.
    const CensoredMean plain = censored_exponential_mean({2, 2, 2}, {0, 0, 0});
    CHECK(plain.t_hat == doctest::Approx(2.0).epsilon(1e-12));

    // All censored: estimate undefined, flagged.
    const CensoredMean undef = censored_exponential_mean({5, 5}, {1, 1});
    CHECK(!undef.defined);
}

TEST_CASE("censored estimator equals sample mean when nothing is censored") {
    Rng rng(12);
    std::vector<double> t;
    std::vector<uint8_t> c;
    double total = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = -50.0 * std::log(1.0 - rng.uniform());
        t.push_back(x);
        c.push_back(0);
        total += x;
    }
    const CensoredMean m = censored_exponential_mean(t, c);
    CHECK(m.t_hat == doctest::Approx(total / 200).epsilon(1e-12));
}

TEST_CASE("type-II censored estimator: accuracy and 80% CI coverage on synthetic data") {
    const double true_T = 50.0;
    const int n = 1000;
    const int r = 400; // 60% censored
    int covered = 0;
    double mean_of_means = 0.0;
    const int repetitions = 500;
    for (int rep = 0; rep < repetitions; ++rep) {
        Rng rng = Rng::split(2025, rep);
        std::vector<double> x(n);
        for (double& v : x) v = -true_T * std::log(1.0 - rng.uniform());
        std::sort(x.begin(), x.end());
        // Observe the first r failures; the rest are censored at x[r-1].
        std::vector<double> t;
        std::vector<uint8_t> c;
        for (int i = 0; i < r; ++i) {
            t.push_back(x[i]);
            c.push_back(0);
        }
        for (int i = r; i < n; ++i) {
            t.push_back(x[r - 1]);
            c.push_back(1);
        }
        const CensoredMean m = censored_exponential_mean(t, c, 0.80);
        mean_of_means += m.t_hat;
        if (m.ci.lo <= true_T && true_T <= m.ci.hi) ++covered;
    }
    mean_of_means /= repetitions;
    CHECK(std::abs(mean_of_means - true_T) / true_T < 0.10);
    const double coverage = static_cast<double>(covered) / repetitions;
    CHECK(std::abs(coverage - 0.80) < 0.05);
}

TEST_CASE("quantiles sane") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
    CHECK(chi_squared_quantile(0.5, 2.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("KS test accepts uniform samples and rejects shifted ones") {
    Rng rng(31415);
    std::vector<double> u;
    for (int i = 0; i < 5000; ++i) u.push_back(rng.uniform_range(0.03, 0.07));
    CHECK(ks_test_uniform(u, 0.03, 0.07) > 0.01);

    std::vector<double> bad;
    for (int i = 0; i < 5000; ++i) bad.push_back(0.03 + 0.04 * std::pow(rng.uniform(), 2.0));
    CHECK(ks_test_uniform(bad, 0.03, 0.07) < 1e-6);
}

TEST_CASE("rng reproducibility and stream independence") {
    Rng a = Rng::split(1, 7);
    Rng b = Rng::split(1, 7);
    Rng c = Rng::split(1, 8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const uint64_t x = a.next(), y = b.next(), z = c.next();
        all_equal = all_equal && (x == y);
        any_diff = any_diff || (x != z);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}
