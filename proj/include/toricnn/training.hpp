#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toricnn/code.hpp"
#include "toricnn/network.hpp"
#include "toricnn/optim.hpp"

namespace toricnn {

struct TrainingHyper {
    double eta0 = 1e-3;
    double lr_decay = 0.5;
    int patience = 3; // epochs without validation improvement before decaying
    int batch_size = 64;
    double val_fraction = 0.1;
    int epochs = 20;
    double min_lr = 1e-6;
};

struct TrainingRunConfig {
    char model = 'a'; // 'a': perfect measurements, 'b': measurement noise q
    int dim = 4;
    int train_side = 4;
    int hidden_channels = 15; // 15 for model (a), 20 for model (b)
    double p_lo = 0.03;
    double p_hi = 0.07;
    double q = 0.0;
    long samples = 200000;
    int conv3_layers = 1; // 2 = the wider-receptive-field variant (5^D)
    TrainingHyper hyper;
    uint64_t seed = 1;
};

// Compact sample: the (possibly corrupted) syndrome that the network sees,
// and the list of true errored faces. The target tensor carries 1/N on each
// errored face; zero-error draws are resampled during generation.
struct TrainingSample {
    BitField syndrome_bits;
    std::vector<int32_t> error_faces;
    double p_drawn = 0.0;

    Tensor input_tensor(const LatticeGeometry& geom) const;
    Tensor target_tensor(const LatticeGeometry& geom) const;
};

// Deterministic per (cfg.seed, sample index) regardless of worker count.
std::vector<TrainingSample> generate_dataset(const LatticeGeometry& geom,
                                             const TrainingRunConfig& cfg, long count,
                                             int workers = 1);

// Decoder architecture: one kernel-size-3^D layer followed by two 1^D
// layers, tanh hidden activations, linear scores under the softmax head.
Network build_decoder_network(int dim, int hidden_channels, uint64_t init_seed,
                              int conv3_layers = 1);

// Mean fused softmax/cross-entropy cost and mean gradients over the given
// sample indices. The parallel path accumulates per-sample gradients in
// worker-private buffers and reduces them in canonical sample order, so it
// is bit-identical to the serial path.
double batch_cost_and_grads(const Network& net, const LatticeGeometry& geom,
                            const std::vector<TrainingSample>& samples,
                            const std::vector<long>& indices, NetGrads& grads, bool parallel,
                            int workers);

struct TrainLogRow {
    int epoch;
    double train_cost;
    double val_cost;
    double lr;
    double seconds;
};

struct TrainResult {
    Network net; // best-validation parameters
    std::vector<TrainLogRow> log;
    double best_val_cost = 0.0;
    double uniform_baseline_cost = 0.0; // log(#face entries)
};

using TrainProgressFn = std::function<void(const TrainLogRow&)>;

// Full supervised run: dataset generation, Adam with patience-based
// learning-rate lowering, best-validation checkpointing. Throws on a
// non-finite cost.
TrainResult train(const TrainingRunConfig& cfg, int workers = 1, TrainProgressFn progress = {});

std::string training_log_csv(const std::vector<TrainLogRow>& log);

struct ValidationResult {
    double mean_cost = 0.0;
    double topk_hit_rate = 0.0;
};

// Mean cost plus the fraction of samples whose most-syndrome-supported true
// errored face appears among the top-N scores (N = true error count).
ValidationResult validate(const Network& net, const LatticeGeometry& geom,
                          const std::vector<TrainingSample>& samples, int workers = 1);

} // namespace toricnn
