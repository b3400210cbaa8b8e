#pragma once

#include "toricnn/network.hpp"

namespace toricnn {

struct AdamHyper {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment accumulators congruent to the network parameters,
// flattened in canonical order (per layer: kernel then bias).
struct AdamState {
    long t = 0;
    std::vector<double> m;
    std::vector<double> v;
    AdamHyper hyper;

    static AdamState zeros_like(const Network& net, AdamHyper hyper = {});
};

// Standard Adam update with bias correction (epsilon added outside the
// square root). Mutates params in place.
void adam_step(AdamState& state, Network& net, const NetGrads& grads);
// Scalar variant used by oracle tests.
void adam_step_scalar(AdamState& state, double& w, double grad);

void sgd_step(Network& net, const NetGrads& grads, double eta);

} // namespace toricnn
