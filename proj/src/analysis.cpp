#include "toricnn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toricnn/bitfield.hpp"

namespace toricnn {

namespace {

BitField random_k_subset(long n_bits, long k, Rng& rng) {
    BitField bits(static_cast<size_t>(n_bits));
    long placed = 0;
    while (placed < k) {
        const long pos = static_cast<long>(rng.below(static_cast<uint64_t>(n_bits)));
        if (!bits.get(pos)) {
            bits.set(pos, true);
            ++placed;
        }
    }
    return bits;
}

} // namespace

ToyOverlapStats nn_toy_overlap_experiment(const ToyLatticeConfig& cfg, int repetitions) {
    const long n = static_cast<long>(cfg.side) * cfg.side;
    const long k = static_cast<long>(cfg.p * n);
    if (k < 1) throw std::invalid_argument("floor(p * L^2) must be >= 1");
    if (repetitions < 1) throw std::invalid_argument("need at least one repetition");

    ToyOverlapStats stats;
    double overlap_sum = 0.0;
    long overlap_count = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
        Rng rng = Rng::split(cfg.seed, static_cast<uint64_t>(rep));
        const BitField target = random_k_subset(n, k, rng);
        long best = -1;
        for (long e = 0; e < cfg.db_size; ++e) {
            const BitField entry = random_k_subset(n, k, rng);
            const long ov = static_cast<long>(target.overlap(entry));
            overlap_sum += ov;
            ++overlap_count;
            if (ov > best) best = ov;
        }
        // Flipping the best entry: weight k + k - 2 * overlap.
        const long after = 2 * k - 2 * best;
        stats.reps.push_back({best, k, after});
        stats.mean_max_overlap += best;
        stats.mean_weight_before += k;
        stats.mean_weight_after += after;
    }
    stats.mean_max_overlap /= repetitions;
    stats.mean_weight_before /= repetitions;
    stats.mean_weight_after /= repetitions;
    stats.mean_overlap = overlap_sum / static_cast<double>(overlap_count);
    return stats;
}

// ---- LocalNet ----------------------------------------------------------

namespace {

inline long ipow(int base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

} // namespace

LocalNet::LocalNet(const LocalNetSpec& spec, Rng& rng) : spec_(spec) {
    if (spec.dims != 1 && spec.dims != 2) throw std::invalid_argument("LocalNet supports 1D and 2D");
    if (spec.input_n != 2 * (spec.depth_m - 1) + 1)
        throw std::invalid_argument("input width must contract to one output: n = 2(m-1)+1");
    for (int ld = 0; ld < spec.depth_m - 1; ++ld) {
        Layer layer;
        layer.in_size = spec.input_n - 2 * ld;
        layer.out_size = layer.in_size - 2;
        layer.in_ch = ld == 0 ? 1 : spec.channels;
        layer.out_ch = ld == spec.depth_m - 2 ? 1 : spec.channels;
        const long n_pos = spec.shared ? 1 : ipow(layer.out_size, spec.dims);
        const long n_k = ipow(3, spec.dims);
        layer.w.resize(n_pos * n_k * layer.in_ch * layer.out_ch);
        for (double& w : layer.w) w = spec.init_sigma * rng.normal();
        layer.gw.assign(layer.w.size(), 0.0);
        layers_.push_back(std::move(layer));
    }
}

long LocalNet::n_weights() const {
    long n = 0;
    for (const auto& l : layers_) n += static_cast<long>(l.w.size());
    return n;
}

double LocalNet::forward_impl(const std::vector<double>& input,
                              std::vector<std::vector<double>>* acts) const {
    const int dims = spec_.dims;
    if (static_cast<long>(input.size()) != ipow(spec_.input_n, dims))
        throw std::invalid_argument("LocalNet input size mismatch");
    std::vector<double> cur = input;
    if (acts) {
        acts->clear();
        acts->push_back(cur);
    }
    for (size_t li = 0; li < layers_.size(); ++li) {
        const Layer& layer = layers_[li];
        const bool last = li + 1 == layers_.size();
        const long out_positions = ipow(layer.out_size, dims);
        const long n_k = ipow(3, dims);
        std::vector<double> next(out_positions * layer.out_ch, 0.0);
        for (long op = 0; op < out_positions; ++op) {
            const int orow = dims == 2 ? static_cast<int>(op / layer.out_size) : 0;
            const int ocol = dims == 2 ? static_cast<int>(op % layer.out_size) : static_cast<int>(op);
            const long wbase = spec_.shared ? 0 : op * n_k * layer.in_ch * layer.out_ch;
            for (long kk = 0; kk < n_k; ++kk) {
                const int krow = dims == 2 ? static_cast<int>(kk / 3) : 0;
                const int kcol = dims == 2 ? static_cast<int>(kk % 3) : static_cast<int>(kk);
                const long ip = dims == 2
                                    ? static_cast<long>(orow + krow) * layer.in_size + (ocol + kcol)
                                    : static_cast<long>(ocol + kcol);
                for (int ci = 0; ci < layer.in_ch; ++ci) {
                    const double xv = cur[ip * layer.in_ch + ci];
                    const double* wrow =
                        &layer.w[wbase + (kk * layer.in_ch + ci) * layer.out_ch];
                    for (int co = 0; co < layer.out_ch; ++co)
                        next[op * layer.out_ch + co] += xv * wrow[co];
                }
            }
        }
        if (!last)
            for (double& v : next) v = apply_activation(spec_.hidden_act, v);
        cur = std::move(next);
        if (acts) acts->push_back(cur);
    }
    return cur[0];
}

double LocalNet::forward(const std::vector<double>& input) const {
    return forward_impl(input, nullptr);
}

void LocalNet::backward(const std::vector<double>& input, double d_output) {
    forward_impl(input, &scratch_);
    const int dims = spec_.dims;
    std::vector<double> d_cur{d_output};
    for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li) {
        Layer& layer = layers_[li];
        const bool last = li + 1 == static_cast<int>(layers_.size());
        const std::vector<double>& out = scratch_[li + 1];
        const std::vector<double>& in = scratch_[li];
        const long out_positions = ipow(layer.out_size, dims);
        const long n_k = ipow(3, dims);
        std::vector<double> ds(out.size());
        for (size_t i = 0; i < out.size(); ++i)
            ds[i] = d_cur[i] * (last ? 1.0 : activation_deriv_from_output(spec_.hidden_act, out[i]));
        std::vector<double> d_in(in.size(), 0.0);
        for (long op = 0; op < out_positions; ++op) {
            const int orow = dims == 2 ? static_cast<int>(op / layer.out_size) : 0;
            const int ocol = dims == 2 ? static_cast<int>(op % layer.out_size) : static_cast<int>(op);
            const long wbase = spec_.shared ? 0 : op * n_k * layer.in_ch * layer.out_ch;
            for (long kk = 0; kk < n_k; ++kk) {
                const int krow = dims == 2 ? static_cast<int>(kk / 3) : 0;
                const int kcol = dims == 2 ? static_cast<int>(kk % 3) : static_cast<int>(kk);
                const long ip = dims == 2
                                    ? static_cast<long>(orow + krow) * layer.in_size + (ocol + kcol)
                                    : static_cast<long>(ocol + kcol);
                for (int ci = 0; ci < layer.in_ch; ++ci) {
                    const double xv = in[ip * layer.in_ch + ci];
                    const long row = wbase + (kk * layer.in_ch + ci) * layer.out_ch;
                    double acc = 0.0;
                    for (int co = 0; co < layer.out_ch; ++co) {
                        const double dso = ds[op * layer.out_ch + co];
                        layer.gw[row + co] += xv * dso;
                        acc += layer.w[row + co] * dso;
                    }
                    d_in[ip * layer.in_ch + ci] += acc;
                }
            }
        }
        d_cur = std::move(d_in);
    }
}

void LocalNet::sgd_update(double eta) {
    for (auto& layer : layers_)
        for (size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= eta * layer.gw[i];
}

void LocalNet::zero_grads() {
    for (auto& layer : layers_) std::fill(layer.gw.begin(), layer.gw.end(), 0.0);
}

long count_paths(int m, int n, int position) {
    if (n != 2 * (m - 1) + 1) throw std::invalid_argument("count_paths expects n = 2(m-1)+1");
    if (position < 0 || position >= n) return 0;
    std::vector<long> cur(n, 0);
    cur[position] = 1;
    for (int l = 0; l < m - 1; ++l) {
        const int out_size = n - 2 * (l + 1);
        std::vector<long> next(out_size, 0);
        for (int j = 0; j < out_size; ++j) next[j] = cur[j] + cur[j + 1] + cur[j + 2];
        cur = std::move(next);
    }
    return cur[0];
}

std::vector<VariancePoint> variance_vs_paths_experiment(const LocalNetSpec& spec, int trials,
                                                        uint64_t seed) {
    if (spec.dims != 1) throw std::invalid_argument("variance experiment is 1D");
    const int n = spec.input_n;
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    std::vector<double> input(n, 0.0);
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::split(seed, static_cast<uint64_t>(t));
        LocalNet net(spec, rng);
        for (int k = 0; k < n; ++k) {
            std::fill(input.begin(), input.end(), 0.0);
            input[k] = 1.0;
            const double a = net.forward(input);
            sum[k] += a;
            sumsq[k] += a * a;
        }
    }
    std::vector<VariancePoint> out;
    for (int k = 0; k < n; ++k) {
        const double mean = sum[k] / trials;
        const double var = (sumsq[k] - trials * mean * mean) / (trials - 1);
        out.push_back({k, var, count_paths(spec.depth_m, n, k)});
    }
    return out;
}

namespace {

int round_to_bit(double tanh_out) {
    if (tanh_out > 0.5) return 1;
    if (tanh_out < -0.5) return -1;
    return 0;
}

} // namespace

std::vector<AlignedRunOutcome> aligned_reversed_experiment(const AlignedConfig& cfg, int runs) {
    const int n = cfg.input_n;
    LocalNetSpec spec;
    spec.dims = 2;
    spec.input_n = n;
    spec.depth_m = (n - 1) / 2 + 1;
    spec.channels = cfg.channels;
    spec.shared = false;
    spec.hidden_act = cfg.noisy ? Activation::relu_fn : Activation::none;
    spec.init_sigma = 0.1;

    const long center = static_cast<long>(n / 2) * n + n / 2;
    const long corner = 0;

    std::vector<AlignedRunOutcome> outcomes;
    for (int run = 0; run < runs; ++run) {
        Rng rng = Rng::split(cfg.seed, static_cast<uint64_t>(run));
        LocalNet net(spec, rng);
        std::vector<double> input(static_cast<size_t>(n) * n, 0.0);

        auto fill_input = [&](double y, bool reversed, Rng& r) {
            if (cfg.noisy)
                for (double& v : input) v = r.bernoulli(0.5) ? 1.0 : -1.0;
            else
                std::fill(input.begin(), input.end(), 0.0);
            input[center] = y;
            input[corner] = reversed ? -y : y;
        };

        AlignedRunOutcome outcome{run, false, 0, 0.0, false, 0.0};
        double eta = cfg.eta0;
        for (long step = 0; step < cfg.max_steps; ++step) {
            net.zero_grads();
            double cost = 0.0;
            for (int b = 0; b < cfg.batch; ++b) {
                const double y = rng.bernoulli(0.5) ? 1.0 : -1.0;
                fill_input(y, false, rng);
                const double out = net.forward(input);
                const double t = std::tanh(out);
                cost += (y - t) * (y - t);
                const double d_out = -2.0 * (y - t) * (1.0 - t * t) / cfg.batch;
                net.backward(input, d_out);
            }
            cost /= cfg.batch;
            net.sgd_update(eta);
            eta *= cfg.eta_decay;
            outcome.steps = step + 1;
            outcome.final_cost = cost;
            if (cost < cfg.stop_cost) {
                outcome.converged = true;
                break;
            }
        }

        if (outcome.converged) {
            const int eval_batch = cfg.noisy ? 50 : 2;
            int rev_center = 0, ali_correct = 0;
            for (int b = 0; b < eval_batch; ++b) {
                const double y = (b % 2 == 0) ? 1.0 : -1.0;
                fill_input(y, true, rng);
                if (round_to_bit(std::tanh(net.forward(input))) == static_cast<int>(y)) ++rev_center;
                fill_input(y, false, rng);
                if (round_to_bit(std::tanh(net.forward(input))) == static_cast<int>(y)) ++ali_correct;
            }
            outcome.reversed_matches_center = rev_center * 2 > eval_batch;
            outcome.aligned_accuracy = static_cast<double>(ali_correct) / eval_batch;
        }
        outcomes.push_back(outcome);
    }
    return outcomes;
}

std::vector<SensitivityPoint> sensitivity_vs_distance(const Network& net,
                                                      const LatticeGeometry& geom,
                                                      const std::vector<int>& distances, int reps,
                                                      double p_ref, uint64_t seed) {
    const long n_sites = geom.n_sites();
    const int L = geom.side();
    std::array<int, 4> center_coords{0, 0, 0, 0};
    for (int a = 0; a < geom.dim(); ++a) center_coords[a] = L / 2;
    const long center = geom.site_index(center_coords);

    // Sites grouped by periodic L1 distance from the center.
    const int max_dist = geom.dim() * (L / 2);
    std::vector<std::vector<long>> by_dist(max_dist + 1);
    for (long s = 0; s < n_sites; ++s) {
        const auto c = geom.site_coords(s);
        int dist = 0;
        for (int a = 0; a < geom.dim(); ++a) {
            const int d = std::abs(c[a] - center_coords[a]);
            dist += std::min(d, L - d);
        }
        by_dist[dist].push_back(s);
    }

    std::vector<SensitivityPoint> out;
    for (int dist : distances) {
        if (dist < 0 || dist > max_dist || by_dist[dist].empty())
            throw std::invalid_argument("no lattice site at requested L1 distance");
        double total = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            Rng rng = Rng::split(seed, (static_cast<uint64_t>(dist) << 32) | static_cast<uint64_t>(rep));
            const ErrorConfig err = sample_error(geom, p_ref, rng);
            const Syndrome s = syndrome_of(err);
            Tensor x = syndrome_to_tensor(geom, s.bits);
            const double y0 = network_forward(net, x).at(center, 0);
            const long site = by_dist[dist][rng.below(by_dist[dist].size())];
            const int channel = static_cast<int>(rng.below(static_cast<uint64_t>(geom.dim())));
            double& bit = x.v[static_cast<size_t>(site) * geom.dim() + channel];
            bit = bit == 0.0 ? 1.0 : 0.0;
            const double y1 = network_forward(net, x).at(center, 0);
            total += std::abs(y1 - y0);
        }
        out.push_back({dist, total / reps});
    }
    return out;
}

} // namespace toricnn
