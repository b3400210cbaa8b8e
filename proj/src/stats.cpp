#include "toricnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace toricnn {

Interval wilson_interval(long successes, long trials, double confidence) {
    if (trials <= 0) throw std::invalid_argument("Wilson interval needs trials >= 1");
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    // The bound is exactly 0 (resp. 1) at the extremes; snap rounding dust.
    if (successes == 0) out.lo = 0.0;
    if (successes == trials) out.hi = 1.0;
    return out;
}

CensoredMean censored_exponential_mean(const std::vector<double>& times,
                                       const std::vector<uint8_t>& censored, double confidence) {
    if (times.size() != censored.size()) throw std::invalid_argument("times/censored length mismatch");
    CensoredMean out;
    double total = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        total += times[i];
        if (censored[i])
            ++out.censored;
        else
            ++out.failures;
    }
    if (out.failures == 0) return out; // estimate undefined, flagged via `defined`
    out.defined = true;
    const double r = static_cast<double>(out.failures);
    out.t_hat = total / r;
    const double alpha = 1.0 - confidence;
    const double lo_q = chi_squared_quantile(1.0 - alpha / 2.0, 2.0 * r);
    const double hi_q = chi_squared_quantile(alpha / 2.0, 2.0 * r);
    out.ci = {2.0 * r * out.t_hat / lo_q, 2.0 * r * out.t_hat / hi_q};
    return out;
}

double normal_quantile(double p) {
    boost::math::normal_distribution<double> dist;
    return boost::math::quantile(dist, p);
}

double chi_squared_quantile(double p, double dof) {
    boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::quantile(dist, p);
}

double ks_test_uniform(std::vector<double> samples, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("KS test needs samples");
    if (hi <= lo) throw std::invalid_argument("KS test needs hi > lo");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double cdf = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    // Asymptotic Kolmogorov distribution with the usual small-sample shift.
    const double sqrt_n = std::sqrt(n);
    const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k & 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

} // namespace toricnn
