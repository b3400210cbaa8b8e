#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toricnn/optim.hpp"

using namespace toricnn;

TEST_CASE("Adam first step on f(w)=w^2 matches the hand-derived recurrence") {
    AdamState state;
    state.hyper = {0.1, 0.9, 0.999, 1e-8};
    double w = 1.0;
    adam_step_scalar(state, w, 2.0 * 1.0);

    // Hand trace at t=1: m=0.2, v=0.004, mhat=2, vhat=4,
    // w1 = 1 - 0.1 * 2 / (sqrt(4) + 1e-8).
    const double expected = 1.0 - 0.1 * 2.0 / (std::sqrt(4.0) + 1e-8);
    CHECK(std::abs(w - expected) < 1e-12);
    CHECK(w == doctest::Approx(0.9).epsilon(1e-6));

    // Second step, still hand-derived.
    const double g2 = 2.0 * w;
    const double m2 = 0.9 * 0.2 + 0.1 * g2;
    const double v2 = 0.999 * 0.004 + 0.001 * g2 * g2;
    const double mhat = m2 / (1.0 - 0.9 * 0.9);
    const double vhat = v2 / (1.0 - 0.999 * 0.999);
    const double expected2 = expected - 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
    adam_step_scalar(state, w, g2);
    CHECK(std::abs(w - expected2) < 1e-12);
}

TEST_CASE("Adam with zero gradient leaves parameters unchanged") {
    AdamState state;
    double w = 0.7;
    adam_step_scalar(state, w, 0.0);
    CHECK(w == 0.7);
    adam_step_scalar(state, w, 0.0);
    CHECK(w == 0.7);
}

TEST_CASE("200 Adam steps on f(w)=w^2 reach |w| < 1e-2") {
    AdamState state;
    state.hyper.alpha = 0.1;
    double w = 1.0;
    for (int t = 0; t < 200; ++t) adam_step_scalar(state, w, 2.0 * w);
    CHECK(std::abs(w) < 1e-2);
}

TEST_CASE("network Adam matches the scalar recurrence elementwise") {
    Network net;
    net.dim = 1;
    ConvLayer l;
    l.spec = {1, 1, 2, Activation::none};
    l.kernel = {1.0, -2.0};
    l.bias = {0.5, 0.25};
    net.layers = {l};
    AdamState st = AdamState::zeros_like(net, {0.05, 0.9, 0.999, 1e-8});
    NetGrads g = NetGrads::zeros_like(net);
    g.kernel[0] = {2.0, -4.0};
    g.bias[0] = {1.0, 0.5};
    adam_step(st, net, g);

    auto scalar_after = [&](double w0, double grad) {
        AdamState s;
        s.hyper = {0.05, 0.9, 0.999, 1e-8};
        double w = w0;
        adam_step_scalar(s, w, grad);
        return w;
    };
    CHECK(net.layers[0].kernel[0] == scalar_after(1.0, 2.0));
    CHECK(net.layers[0].kernel[1] == scalar_after(-2.0, -4.0));
    CHECK(net.layers[0].bias[0] == scalar_after(0.5, 1.0));
    CHECK(net.layers[0].bias[1] == scalar_after(0.25, 0.5));
}

TEST_CASE("SGD closed forms: w1 = w0 - eta * grad") {
    Network net;
    net.dim = 1;
    ConvLayer l;
    l.spec = {1, 1, 1, Activation::none};
    l.kernel = {1.0};
    l.bias = {0.0};
    net.layers = {l};
    NetGrads g = NetGrads::zeros_like(net);
    g.kernel[0] = {2.0}; // f(w) = w^2 at w=1
    sgd_step(net, g, 0.25);
    CHECK(net.layers[0].kernel[0] == 0.5);
    sgd_step(net, g, 0.0);
    CHECK(net.layers[0].kernel[0] == 0.5);
    CHECK_THROWS_AS(sgd_step(net, g, -1.0), std::invalid_argument);
}

TEST_CASE("SGD with exponential decay follows the closed-form product") {
    // w_{t+1} = w_t (1 - 2 eta_t) with eta_t = eta0 * gamma^t on f(w)=w^2.
    double w = 1.0;
    double closed = 1.0;
    const double eta0 = 0.05, gamma = 0.9;
    Network net;
    net.dim = 1;
    ConvLayer l;
    l.spec = {1, 1, 1, Activation::none};
    l.kernel = {w};
    l.bias = {0.0};
    net.layers = {l};
    for (int t = 0; t < 50; ++t) {
        const double eta = eta0 * std::pow(gamma, t);
        NetGrads g = NetGrads::zeros_like(net);
        g.kernel[0] = {2.0 * net.layers[0].kernel[0]};
        sgd_step(net, g, eta);
        closed *= (1.0 - 2.0 * eta);
    }
    CHECK(net.layers[0].kernel[0] == doctest::Approx(closed).epsilon(1e-12));
}
