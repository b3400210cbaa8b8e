#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace toricnn {

// Dense real array on a periodic D-dimensional lattice: site-major
// (row-major coordinates, last axis fastest), channel fastest within a
// site.
struct Tensor {
    int dim = 1;
    int side = 1;
    int channels = 1;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int dim_, int side_, int channels_);

    long n_sites() const {
        long n = 1;
        for (int a = 0; a < dim; ++a) n *= side;
        return n;
    }
    double& at(long site, int c) { return v[site * channels + c]; }
    double at(long site, int c) const { return v[site * channels + c]; }
};

enum class Activation : uint8_t { none = 0, tanh_fn = 1, sigmoid_fn = 2, relu_fn = 3 };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
inline double apply_activation(Activation a, double z) {
    switch (a) {
        case Activation::none: return z;
        case Activation::tanh_fn: return std::tanh(z);
        case Activation::sigmoid_fn: return sigmoid(z);
        case Activation::relu_fn: return z > 0.0 ? z : 0.0;
    }
    return z;
}
// Derivative expressed through the activation output.
inline double activation_deriv_from_output(Activation a, double y) {
    switch (a) {
        case Activation::none: return 1.0;
        case Activation::tanh_fn: return 1.0 - y * y;
        case Activation::sigmoid_fn: return y * (1.0 - y);
        case Activation::relu_fn: return y > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

struct ConvLayerSpec {
    int kernel_side = 1; // n; layers in decoder networks use 1 or 3
    int in_channels = 1;
    int out_channels = 1;
    Activation act = Activation::none;
};

// Kernel layout: [u][i][o] with u the flattened offset in Z_n^D (row-major,
// last axis fastest), i the input channel, o the output channel (fastest).
struct ConvLayer {
    ConvLayerSpec spec;
    std::vector<double> kernel;
    std::vector<double> bias;

    long kernel_size(int dim) const {
        long nu = 1;
        for (int a = 0; a < dim; ++a) nu *= spec.kernel_side;
        return nu * spec.in_channels * spec.out_channels;
    }
};

// Periodic convolutional network. Hidden activations follow each layer's
// spec; the terminal softmax is not part of the stack (it is fused with the
// cross-entropy during training, and at inference the pre-softmax scores
// are used directly).
struct Network {
    int dim = 3;
    bool softmax_head = true;
    std::string model_tag;    // "a", "b", or free-form
    int train_side = 0;       // L the net was trained at (metadata)
    std::vector<ConvLayer> layers;

    int in_channels() const { return layers.empty() ? 0 : layers.front().spec.in_channels; }
    int out_channels() const { return layers.empty() ? 0 : layers.back().spec.out_channels; }
    long n_params() const;
};

// Frozen layout / channel-order convention string, stored in checkpoints
// and checked by the decoder against the geometry it runs on.
std::string channel_convention();

// y_v[o] = act( sum_{u in Z_n^D, i} x[(v - u + origin) mod L, i] * K[u,i,o] + b[o] ).
// origin = (n-1)/2 centers odd kernels; origin = 0 gives the raw cyclic
// convolution with offsets in Z_n^D.
Tensor conv_forward(const Tensor& x, const ConvLayer& layer, int origin);
inline Tensor conv_forward(const Tensor& x, const ConvLayer& layer) {
    return conv_forward(x, layer, (layer.spec.kernel_side - 1) / 2);
}

// Naive reference implementation (direct modular arithmetic, no window
// table); oracle for the optimized path.
Tensor conv_forward_ref(const Tensor& x, const ConvLayer& layer, int origin);

Tensor network_forward(const Network& net, const Tensor& x);

struct ForwardCache {
    Tensor input;
    std::vector<Tensor> outputs; // post-activation output of each layer
};

void network_forward_cached(const Network& net, const Tensor& x, ForwardCache& cache);

struct NetGrads {
    std::vector<std::vector<double>> kernel;
    std::vector<std::vector<double>> bias;

    static NetGrads zeros_like(const Network& net);
    void accumulate(const NetGrads& other, double scale = 1.0);
    void scale(double s);
};

// Reverse-mode gradients from d(cost)/d(final layer output); returns
// gradients for every kernel entry and bias. If dx_out is non-null it
// receives d(cost)/d(input).
NetGrads network_backward(const Network& net, const ForwardCache& cache, const Tensor& d_out,
                          Tensor* dx_out = nullptr);

// Softmax over all entries jointly (the paper's head is global, not
// per-site). Max-subtraction keeps it shift-invariant bit-exactly.
Tensor softmax_global(const Tensor& x);

// Cross-entropy with both-sided log terms; `pred` entries are clamped away
// from {0,1} by eps = 1e-12.
double cross_entropy_full(const Tensor& pred, const Tensor& target);
// Reduced form -sum t_k log p_k used with the softmax head.
double cross_entropy_reduced(const Tensor& pred, const Tensor& target);

// Fused softmax + reduced cross-entropy head: returns the sample cost and
// d(cost)/d(pre-softmax scores) = softmax(scores) - target.
double softmax_ce_loss(const Tensor& scores, const Tensor& target, Tensor& d_scores);

constexpr double kLogClampEps = 1e-12;

} // namespace toricnn
