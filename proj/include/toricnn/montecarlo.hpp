#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toricnn/decoder.hpp"
#include "toricnn/stats.hpp"

namespace toricnn {

struct SweepConfig {
    int dim = 4;
    std::vector<int> sides;
    std::vector<double> ps;
    long trials = 1000;
    DecoderConfig decoder;
    uint64_t seed = 1;
    double trial_time_cap_s = 0.0; // 0 disables the per-trial wall-clock cap
};

struct SweepRow {
    int side;
    double p;
    long trials;
    long failures;
    double p_bar;
    Interval ci95;
};

// Logical-error-rate sweep for error model (a). Failure = non-trivial
// logical class or a decode that timed out. Trials are parallel with
// per-trial seed streams; aggregate counts do not depend on worker count.
std::vector<SweepRow> run_noiseless_sweep(const Network& net, const SweepConfig& cfg, int workers);

struct MemoryTimeConfig {
    int dim = 4;
    std::vector<int> sides;
    double p = 0.01; // p = q throughout
    long runs = 50;
    long round_cap = 10000;
    DecoderConfig decoder;        // controls the per-round NN loop
    DecoderConfig assess_decoder; // model-(a) pipeline used for failure checks
    uint64_t seed = 1;
};

struct MemoryTimeRecord {
    int side;
    double p;
    long rounds;
    bool censored;
};

// Memory-time runs for error model (b) with p = q. After every round the
// accumulated state is cloned and fed through the model-(a) pipeline; the
// run fails at the first round whose assessment is not trivially corrected,
// and is recorded censored when it survives to the round cap.
std::vector<MemoryTimeRecord> run_memory_time(const Network& net_noisy, const Network& net_assess,
                                              const MemoryTimeConfig& cfg, int workers);

CensoredMean memory_time_estimate(const std::vector<MemoryTimeRecord>& records, int side,
                                  double confidence = 0.80);

struct ScalingFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double p_c = 0.0;
    double nu = 0.0;
    double cov[5][5] = {}; // order: A, B, C, p_c, nu
    double residual = 0.0; // sum of squared residuals
    bool identifiable = true;
};

struct ScalingPoint {
    int side;
    double p;
    double p_bar;
};

// Nonlinear least squares of P = A + B x + C x^2 with x = (p - p_c) L^(1/nu),
// multi-started over a (p_c, nu) grid and refined by Levenberg-Marquardt.
// Covariance comes from the Jacobian at the optimum.
ScalingFit fit_scaling(const std::vector<ScalingPoint>& points);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string memory_csv(const std::vector<MemoryTimeRecord>& records);
std::string fit_csv(const ScalingFit& fit);
std::vector<ScalingPoint> parse_sweep_csv(const std::string& body);

} // namespace toricnn
