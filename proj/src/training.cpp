#include "toricnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "toricnn/io.hpp"

namespace toricnn {

Tensor TrainingSample::input_tensor(const LatticeGeometry& geom) const {
    Tensor t(geom.dim(), geom.side(), geom.dim());
    const long n_sites = geom.n_sites();
    syndrome_bits.for_each_set([&](size_t e) {
        const int d = static_cast<int>(e / n_sites);
        const long s = static_cast<long>(e % n_sites);
        t.v[static_cast<size_t>(s) * geom.dim() + d] = 1.0;
    });
    return t;
}

Tensor TrainingSample::target_tensor(const LatticeGeometry& geom) const {
    Tensor t(geom.dim(), geom.side(), geom.n_axis_pairs());
    if (error_faces.empty()) return t;
    const long n_sites = geom.n_sites();
    const double w = 1.0 / static_cast<double>(error_faces.size());
    for (int32_t f : error_faces) {
        const int c = static_cast<int>(f / n_sites);
        const long s = f % n_sites;
        t.v[static_cast<size_t>(s) * geom.n_axis_pairs() + c] = w;
    }
    return t;
}

std::vector<TrainingSample> generate_dataset(const LatticeGeometry& geom,
                                             const TrainingRunConfig& cfg, long count,
                                             int workers) {
    std::vector<TrainingSample> out(static_cast<size_t>(count));
#pragma omp parallel for schedule(dynamic, 64) num_threads(std::max(1, workers))
    for (long i = 0; i < count; ++i) {
        Rng rng = Rng::split(cfg.seed, static_cast<uint64_t>(i));
        TrainingSample& sample = out[static_cast<size_t>(i)];
        while (true) {
            const double p = rng.uniform_range(cfg.p_lo, cfg.p_hi);
            ErrorConfig err = sample_error(geom, p, rng);
            if (!err.bits.any()) continue; // 1/N target undefined at N = 0
            Syndrome s = syndrome_of(err);
            if (cfg.model == 'b') s = corrupt_syndrome(s, cfg.q, rng);
            sample.p_drawn = p;
            sample.syndrome_bits = s.bits;
            sample.error_faces.clear();
            err.bits.for_each_set(
                [&](size_t f) { sample.error_faces.push_back(static_cast<int32_t>(f)); });
            break;
        }
    }
    return out;
}

Network build_decoder_network(int dim, int hidden_channels, uint64_t init_seed, int conv3_layers) {
    if (dim != 3 && dim != 4) throw std::invalid_argument("decoder network dimension must be 3 or 4");
    Network net;
    net.dim = dim;
    net.softmax_head = true;
    const int in_ch = dim;
    const int out_ch = static_cast<int>(binomial(dim, 2));
    Rng rng(init_seed);

    auto add_layer = [&](int n, int d, int r, Activation act) {
        ConvLayer l;
        l.spec = {n, d, r, act};
        long nu = 1;
        for (int a = 0; a < dim; ++a) nu *= n;
        const double sigma = 1.0 / std::sqrt(static_cast<double>(nu * d));
        l.kernel.resize(static_cast<size_t>(nu) * d * r);
        for (double& w : l.kernel) w = sigma * rng.normal();
        l.bias.assign(r, 0.0);
        net.layers.push_back(std::move(l));
    };

    add_layer(3, in_ch, hidden_channels, Activation::tanh_fn);
    for (int i = 1; i < conv3_layers; ++i) add_layer(3, hidden_channels, hidden_channels, Activation::tanh_fn);
    add_layer(1, hidden_channels, hidden_channels, Activation::tanh_fn);
    add_layer(1, hidden_channels, out_ch, Activation::none);
    return net;
}

namespace {

double sample_cost_and_grads(const Network& net, const LatticeGeometry& geom,
                             const TrainingSample& sample, NetGrads& grads) {
    ForwardCache cache;
    const Tensor x = sample.input_tensor(geom);
    network_forward_cached(net, x, cache);
    const Tensor target = sample.target_tensor(geom);
    Tensor d_scores;
    const double cost = softmax_ce_loss(cache.outputs.back(), target, d_scores);
    grads = network_backward(net, cache, d_scores);
    return cost;
}

} // namespace

double batch_cost_and_grads(const Network& net, const LatticeGeometry& geom,
                            const std::vector<TrainingSample>& samples,
                            const std::vector<long>& indices, NetGrads& grads, bool parallel,
                            int workers) {
    const size_t n = indices.size();
    if (n == 0) throw std::invalid_argument("empty batch");
    grads = NetGrads::zeros_like(net);
    std::vector<NetGrads> per_sample(n);
    std::vector<double> costs(n);
    if (parallel && workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (long i = 0; i < static_cast<long>(n); ++i)
            costs[i] = sample_cost_and_grads(net, geom, samples[indices[i]], per_sample[i]);
    } else {
        for (size_t i = 0; i < n; ++i)
            costs[i] = sample_cost_and_grads(net, geom, samples[indices[i]], per_sample[i]);
    }
    // Canonical-order reduction keeps results identical for any worker count.
    double cost = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cost += costs[i];
        grads.accumulate(per_sample[i]);
    }
    const double inv = 1.0 / static_cast<double>(n);
    grads.scale(inv);
    return cost * inv;
}

namespace {

double mean_validation_cost(const Network& net, const LatticeGeometry& geom,
                            const std::vector<TrainingSample>& samples,
                            const std::vector<long>& indices, int workers) {
    std::vector<double> costs(indices.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
    for (long i = 0; i < static_cast<long>(indices.size()); ++i) {
        const TrainingSample& sample = samples[indices[i]];
        const Tensor scores = network_forward(net, sample.input_tensor(geom));
        costs[i] = cross_entropy_reduced(softmax_global(scores), sample.target_tensor(geom));
    }
    double total = 0.0;
    for (double c : costs) total += c;
    return total / static_cast<double>(indices.size());
}

} // namespace

TrainResult train(const TrainingRunConfig& cfg, int workers, TrainProgressFn progress) {
    const LatticeGeometry geom(cfg.dim, cfg.train_side);
    const auto t0 = std::chrono::steady_clock::now();

    auto samples = generate_dataset(geom, cfg, cfg.samples, workers);
    const long n_val = std::max<long>(1, static_cast<long>(cfg.hyper.val_fraction * cfg.samples));
    const long n_train = cfg.samples - n_val;
    if (n_train < cfg.hyper.batch_size) throw std::invalid_argument("dataset too small for batch size");
    std::vector<long> train_idx(n_train), val_idx(n_val);
    std::iota(train_idx.begin(), train_idx.end(), 0);
    std::iota(val_idx.begin(), val_idx.end(), n_train);

    TrainResult result;
    Network net = build_decoder_network(cfg.dim, cfg.hidden_channels,
                                        cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.conv3_layers);
    result.uniform_baseline_cost =
        std::log(static_cast<double>(geom.n_faces()));

    AdamState adam = AdamState::zeros_like(net);
    double lr = cfg.hyper.eta0;
    double best_val = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    Rng shuffle_rng = Rng::split(cfg.seed, 0xda7a5e7);

    for (int epoch = 1; epoch <= cfg.hyper.epochs; ++epoch) {
        // Fisher-Yates with the run RNG: the trajectory is a pure function
        // of (cfg, seed).
        for (long i = n_train - 1; i > 0; --i) {
            const long j = static_cast<long>(shuffle_rng.below(static_cast<uint64_t>(i + 1)));
            std::swap(train_idx[i], train_idx[j]);
        }
        double epoch_cost = 0.0;
        long n_batches = 0;
        NetGrads grads;
        std::vector<long> batch;
        for (long start = 0; start + cfg.hyper.batch_size <= n_train; start += cfg.hyper.batch_size) {
            batch.assign(train_idx.begin() + start, train_idx.begin() + start + cfg.hyper.batch_size);
            adam.hyper.alpha = lr;
            epoch_cost += batch_cost_and_grads(net, geom, samples, batch, grads, true, workers);
            adam_step(adam, net, grads);
            ++n_batches;
        }
        epoch_cost /= static_cast<double>(n_batches);
        const double val_cost = mean_validation_cost(net, geom, samples, val_idx, workers);
        if (!std::isfinite(epoch_cost) || !std::isfinite(val_cost))
            throw std::runtime_error("training diverged: non-finite cost at epoch " +
                                     std::to_string(epoch));

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        TrainLogRow row{epoch, epoch_cost, val_cost, lr, seconds};
        result.log.push_back(row);
        if (progress) progress(row);

        if (val_cost < best_val) {
            best_val = val_cost;
            result.net = net;
            bad_epochs = 0;
        } else if (++bad_epochs >= cfg.hyper.patience) {
            lr *= cfg.hyper.lr_decay;
            bad_epochs = 0;
        }
        if (lr < cfg.hyper.min_lr) break;
    }
    if (result.net.layers.empty()) result.net = net;
    result.net.model_tag = std::string(1, cfg.model);
    result.net.train_side = cfg.train_side;
    result.best_val_cost = best_val;
    return result;
}

std::string training_log_csv(const std::vector<TrainLogRow>& log) {
    std::ostringstream ss;
    ss << "epoch,train_cost,val_cost,lr,seconds\n";
    for (const auto& r : log)
        ss << r.epoch << ',' << format_double(r.train_cost) << ',' << format_double(r.val_cost)
           << ',' << format_double(r.lr) << ',' << format_double(r.seconds) << '\n';
    return ss.str();
}

ValidationResult validate(const Network& net, const LatticeGeometry& geom,
                          const std::vector<TrainingSample>& samples, int workers) {
    if (samples.empty()) throw std::invalid_argument("validate needs at least one sample");
    std::vector<double> costs(samples.size());
    std::vector<uint8_t> hits(samples.size(), 0);
    const long n_sites = geom.n_sites();
    const int c2 = geom.n_axis_pairs();
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
    for (long i = 0; i < static_cast<long>(samples.size()); ++i) {
        const TrainingSample& sample = samples[i];
        const Tensor scores = network_forward(net, sample.input_tensor(geom));
        costs[i] = cross_entropy_reduced(softmax_global(scores), sample.target_tensor(geom));

        // True errored face with the most violated boundary edges in the
        // input syndrome (ties -> smallest face index).
        long best_face = -1;
        int best_support = -1;
        long edges[4];
        for (int32_t f : sample.error_faces) {
            geom.face_boundary_edges_flat(f, edges);
            int support = 0;
            for (long e : edges) support += sample.syndrome_bits.get(e) ? 1 : 0;
            if (support > best_support) {
                best_support = support;
                best_face = f;
            }
        }
        const long n_errors = static_cast<long>(sample.error_faces.size());
        std::vector<std::pair<double, long>> ranked;
        ranked.reserve(static_cast<size_t>(n_sites) * c2);
        for (int c = 0; c < c2; ++c)
            for (long s = 0; s < n_sites; ++s)
                ranked.emplace_back(-scores.v[static_cast<size_t>(s) * c2 + c], geom.face_index(s, c));
        const size_t k = std::min<size_t>(static_cast<size_t>(n_errors), ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
        for (size_t j = 0; j < k; ++j)
            if (ranked[j].second == best_face) {
                hits[i] = 1;
                break;
            }
    }
    ValidationResult out;
    for (size_t i = 0; i < samples.size(); ++i) {
        out.mean_cost += costs[i];
        out.topk_hit_rate += hits[i];
    }
    out.mean_cost /= static_cast<double>(samples.size());
    out.topk_hit_rate /= static_cast<double>(samples.size());
    return out;
}

} // namespace toricnn
