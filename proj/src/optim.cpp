#include "toricnn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace toricnn {

AdamState AdamState::zeros_like(const Network& net, AdamHyper h) {
    AdamState s;
    s.hyper = h;
    s.m.assign(net.n_params(), 0.0);
    s.v.assign(net.n_params(), 0.0);
    return s;
}

namespace {

inline void adam_update(const AdamHyper& h, double b1t, double b2t, double& m, double& v, double& p,
                        double g) {
    m = h.beta1 * m + (1.0 - h.beta1) * g;
    v = h.beta2 * v + (1.0 - h.beta2) * g * g;
    const double mhat = m / (1.0 - b1t);
    const double vhat = v / (1.0 - b2t);
    p -= h.alpha * mhat / (std::sqrt(vhat) + h.eps);
}

} // namespace

void adam_step(AdamState& state, Network& net, const NetGrads& grads) {
    if (static_cast<long>(state.m.size()) != net.n_params())
        throw std::invalid_argument("Adam state incongruent with network");
    ++state.t;
    const double b1t = std::pow(state.hyper.beta1, state.t);
    const double b2t = std::pow(state.hyper.beta2, state.t);
    size_t k = 0;
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        for (size_t i = 0; i < layer.kernel.size(); ++i, ++k)
            adam_update(state.hyper, b1t, b2t, state.m[k], state.v[k], layer.kernel[i],
                        grads.kernel[l][i]);
        for (size_t i = 0; i < layer.bias.size(); ++i, ++k)
            adam_update(state.hyper, b1t, b2t, state.m[k], state.v[k], layer.bias[i],
                        grads.bias[l][i]);
    }
}

void adam_step_scalar(AdamState& state, double& w, double grad) {
    if (state.m.empty()) {
        state.m.assign(1, 0.0);
        state.v.assign(1, 0.0);
    }
    ++state.t;
    const double b1t = std::pow(state.hyper.beta1, state.t);
    const double b2t = std::pow(state.hyper.beta2, state.t);
    adam_update(state.hyper, b1t, b2t, state.m[0], state.v[0], w, grad);
}

void sgd_step(Network& net, const NetGrads& grads, double eta) {
    if (eta < 0.0) throw std::invalid_argument("learning rate must be >= 0");
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        for (size_t i = 0; i < layer.kernel.size(); ++i) layer.kernel[i] -= eta * grads.kernel[l][i];
        for (size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= eta * grads.bias[l][i];
    }
}

} // namespace toricnn
