#include "toricnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace toricnn {

Tensor::Tensor(int dim_, int side_, int channels_) : dim(dim_), side(side_), channels(channels_) {
    if (dim < 1 || side < 1 || channels < 1) throw std::invalid_argument("bad tensor shape");
    v.assign(static_cast<size_t>(n_sites()) * channels, 0.0);
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::none: return "none";
        case Activation::tanh_fn: return "tanh";
        case Activation::sigmoid_fn: return "sigmoid";
        case Activation::relu_fn: return "relu";
    }
    return "none";
}

Activation activation_from_name(const std::string& name) {
    if (name == "none") return Activation::none;
    if (name == "tanh") return Activation::tanh_fn;
    if (name == "sigmoid") return Activation::sigmoid_fn;
    if (name == "relu") return Activation::relu_fn;
    throw std::invalid_argument("unknown activation: " + name);
}

long Network::n_params() const {
    long n = 0;
    for (const auto& l : layers) n += l.kernel_size(dim) + l.spec.out_channels;
    return n;
}

std::string channel_convention() {
    return "faces:axis-pairs-lex;edges:axis-asc;layout:site-row-major-channel-fastest";
}

namespace {

// Input-site lookup per (output site, kernel offset), cached per shape.
// Nets are evaluated concurrently from many Monte-Carlo workers, so the
// cache is guarded and entries are immutable once built.
struct WindowTable {
    long n_sites = 0;
    long n_offsets = 0;
    std::vector<int32_t> idx; // [site * n_offsets + u]
};

const WindowTable& window_table(int dim, int side, int kernel_side, int origin) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int, int>, WindowTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(dim, side, kernel_side, origin);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    WindowTable t;
    long n_sites = 1, n_off = 1;
    for (int a = 0; a < dim; ++a) {
        n_sites *= side;
        n_off *= kernel_side;
    }
    t.n_sites = n_sites;
    t.n_offsets = n_off;
    t.idx.resize(static_cast<size_t>(n_sites) * n_off);
    std::vector<int> vc(dim), uc(dim);
    for (long v = 0; v < n_sites; ++v) {
        long rem = v;
        for (int a = dim - 1; a >= 0; --a) {
            vc[a] = static_cast<int>(rem % side);
            rem /= side;
        }
        for (long u = 0; u < n_off; ++u) {
            long urem = u;
            for (int a = dim - 1; a >= 0; --a) {
                uc[a] = static_cast<int>(urem % kernel_side);
                urem /= kernel_side;
            }
            long s = 0;
            for (int a = 0; a < dim; ++a) {
                int x = (vc[a] - uc[a] + origin) % side;
                if (x < 0) x += side;
                s = s * side + x;
            }
            t.idx[static_cast<size_t>(v) * n_off + u] = static_cast<int32_t>(s);
        }
    }
    return cache.emplace(key, std::move(t)).first->second;
}

} // namespace

Tensor conv_forward(const Tensor& x, const ConvLayer& layer, int origin) {
    const int d = layer.spec.in_channels;
    const int r = layer.spec.out_channels;
    if (x.channels != d) throw std::invalid_argument("conv input channel mismatch");
    if (static_cast<long>(layer.kernel.size()) != layer.kernel_size(x.dim))
        throw std::invalid_argument("conv kernel size mismatch");
    const auto& win = window_table(x.dim, x.side, layer.spec.kernel_side, origin);

    Tensor y(x.dim, x.side, r);
    const long n_sites = win.n_sites;
    const long n_off = win.n_offsets;
    std::vector<double> acc(r);
    for (long v = 0; v < n_sites; ++v) {
        for (int o = 0; o < r; ++o) acc[o] = layer.bias[o];
        const int32_t* wrow = &win.idx[static_cast<size_t>(v) * n_off];
        for (long u = 0; u < n_off; ++u) {
            const double* xi = &x.v[static_cast<size_t>(wrow[u]) * d];
            const double* kk = &layer.kernel[static_cast<size_t>(u) * d * r];
            for (int i = 0; i < d; ++i) {
                const double xv = xi[i];
                const double* krow = kk + static_cast<size_t>(i) * r;
                for (int o = 0; o < r; ++o) acc[o] += xv * krow[o];
            }
        }
        double* yv = &y.v[static_cast<size_t>(v) * r];
        for (int o = 0; o < r; ++o) yv[o] = apply_activation(layer.spec.act, acc[o]);
    }
    return y;
}

Tensor conv_forward_ref(const Tensor& x, const ConvLayer& layer, int origin) {
    const int d = layer.spec.in_channels;
    const int r = layer.spec.out_channels;
    const int n = layer.spec.kernel_side;
    const int D = x.dim;
    const int L = x.side;
    Tensor y(D, L, r);
    long n_off = 1;
    for (int a = 0; a < D; ++a) n_off *= n;
    std::vector<int> vc(D), uc(D);
    for (long v = 0; v < y.n_sites(); ++v) {
        long rem = v;
        for (int a = D - 1; a >= 0; --a) {
            vc[a] = static_cast<int>(rem % L);
            rem /= L;
        }
        for (int o = 0; o < r; ++o) {
            double acc = layer.bias[o];
            for (long u = 0; u < n_off; ++u) {
                long urem = u;
                for (int a = D - 1; a >= 0; --a) {
                    uc[a] = static_cast<int>(urem % n);
                    urem /= n;
                }
                long s = 0;
                for (int a = 0; a < D; ++a) s = s * L + ((vc[a] - uc[a] + origin) % L + L) % L;
                for (int i = 0; i < d; ++i)
                    acc += x.at(s, i) * layer.kernel[(static_cast<size_t>(u) * d + i) * r + o];
            }
            y.at(v, o) = apply_activation(layer.spec.act, acc);
        }
    }
    return y;
}

Tensor network_forward(const Network& net, const Tensor& x) {
    Tensor cur = x;
    for (const auto& layer : net.layers) cur = conv_forward(cur, layer);
    return cur;
}

void network_forward_cached(const Network& net, const Tensor& x, ForwardCache& cache) {
    cache.input = x;
    cache.outputs.resize(net.layers.size());
    const Tensor* cur = &x;
    for (size_t l = 0; l < net.layers.size(); ++l) {
        cache.outputs[l] = conv_forward(*cur, net.layers[l]);
        cur = &cache.outputs[l];
    }
}

NetGrads NetGrads::zeros_like(const Network& net) {
    NetGrads g;
    g.kernel.reserve(net.layers.size());
    g.bias.reserve(net.layers.size());
    for (const auto& l : net.layers) {
        g.kernel.emplace_back(l.kernel.size(), 0.0);
        g.bias.emplace_back(l.bias.size(), 0.0);
    }
    return g;
}

void NetGrads::accumulate(const NetGrads& other, double s) {
    for (size_t l = 0; l < kernel.size(); ++l) {
        for (size_t i = 0; i < kernel[l].size(); ++i) kernel[l][i] += s * other.kernel[l][i];
        for (size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += s * other.bias[l][i];
    }
}

void NetGrads::scale(double s) {
    for (auto& k : kernel)
        for (double& x : k) x *= s;
    for (auto& b : bias)
        for (double& x : b) x *= s;
}

NetGrads network_backward(const Network& net, const ForwardCache& cache, const Tensor& d_out,
                          Tensor* dx_out) {
    NetGrads grads = NetGrads::zeros_like(net);
    Tensor d_cur = d_out;
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const ConvLayer& layer = net.layers[l];
        const Tensor& out = cache.outputs[l];
        const Tensor& in = (l == 0) ? cache.input : cache.outputs[l - 1];
        const int d = layer.spec.in_channels;
        const int r = layer.spec.out_channels;
        const int origin = (layer.spec.kernel_side - 1) / 2;
        const auto& win = window_table(in.dim, in.side, layer.spec.kernel_side, origin);

        // d(cost)/d(pre-activation)
        Tensor ds = d_cur;
        for (size_t i = 0; i < ds.v.size(); ++i)
            ds.v[i] *= activation_deriv_from_output(layer.spec.act, out.v[i]);

        Tensor dx(in.dim, in.side, d);
        double* gk = grads.kernel[l].data();
        double* gb = grads.bias[l].data();
        const long n_sites = win.n_sites;
        const long n_off = win.n_offsets;
        for (long v = 0; v < n_sites; ++v) {
            const double* dsv = &ds.v[static_cast<size_t>(v) * r];
            for (int o = 0; o < r; ++o) gb[o] += dsv[o];
            const int32_t* wrow = &win.idx[static_cast<size_t>(v) * n_off];
            for (long u = 0; u < n_off; ++u) {
                const long s = wrow[u];
                const double* xi = &in.v[static_cast<size_t>(s) * d];
                double* dxi = &dx.v[static_cast<size_t>(s) * d];
                for (int i = 0; i < d; ++i) {
                    const double xv = xi[i];
                    const double* krow = &layer.kernel[(static_cast<size_t>(u) * d + i) * r];
                    double* grow = gk + (static_cast<size_t>(u) * d + i) * r;
                    double acc = 0.0;
                    for (int o = 0; o < r; ++o) {
                        grow[o] += xv * dsv[o];
                        acc += krow[o] * dsv[o];
                    }
                    dxi[i] += acc;
                }
            }
        }
        d_cur = std::move(dx);
    }
    if (dx_out) *dx_out = std::move(d_cur);
    return grads;
}

Tensor softmax_global(const Tensor& x) {
    Tensor out = x;
    const double mx = *std::max_element(x.v.begin(), x.v.end());
    double sum = 0.0;
    for (double& v : out.v) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : out.v) v /= sum;
    return out;
}

double cross_entropy_full(const Tensor& pred, const Tensor& target) {
    if (pred.v.size() != target.v.size()) throw std::invalid_argument("cross-entropy shape mismatch");
    double c = 0.0;
    for (size_t i = 0; i < pred.v.size(); ++i) {
        const double p = std::clamp(pred.v[i], kLogClampEps, 1.0 - kLogClampEps);
        const double t = target.v[i];
        c -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return c;
}

double cross_entropy_reduced(const Tensor& pred, const Tensor& target) {
    if (pred.v.size() != target.v.size()) throw std::invalid_argument("cross-entropy shape mismatch");
    double c = 0.0;
    for (size_t i = 0; i < pred.v.size(); ++i) {
        const double t = target.v[i];
        if (t != 0.0) c -= t * std::log(std::max(pred.v[i], kLogClampEps));
    }
    return c;
}

double softmax_ce_loss(const Tensor& scores, const Tensor& target, Tensor& d_scores) {
    const Tensor p = softmax_global(scores);
    d_scores = p;
    for (size_t i = 0; i < d_scores.v.size(); ++i) d_scores.v[i] -= target.v[i];
    return cross_entropy_reduced(p, target);
}

} // namespace toricnn
