#pragma once

#include <cstdint>
#include <vector>

namespace toricnn {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(long successes, long trials, double confidence);

struct CensoredMean {
    double t_hat = 0.0; // MLE: total recorded time / number of failures
    Interval ci;        // from the chi-squared pivot 2 r T_hat / T ~ chi2(2r)
    long failures = 0;
    long censored = 0;
    bool defined = false; // false when no uncensored failure was observed
};

// Exponential mean under right censoring. `times` are rounds survived;
// `censored[i]` marks runs halted while still alive.
CensoredMean censored_exponential_mean(const std::vector<double>& times,
                                       const std::vector<uint8_t>& censored,
                                       double confidence = 0.80);

double normal_quantile(double p);
double chi_squared_quantile(double p, double dof);

// One-sample Kolmogorov-Smirnov test against U[lo, hi]; returns the
// asymptotic p-value.
double ks_test_uniform(std::vector<double> samples, double lo, double hi);

} // namespace toricnn
