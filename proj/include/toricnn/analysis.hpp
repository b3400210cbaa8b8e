#pragma once

#include <cstdint>
#include <vector>

#include "toricnn/decoder.hpp"
#include "toricnn/network.hpp"
#include "toricnn/rng.hpp"

namespace toricnn {

// ---- 1-nearest-neighbor toy experiment --------------------------------

struct ToyLatticeConfig {
    int side = 50;       // 2D lattice of side^2 plaquettes
    double p = 0.05;     // floor(p * side^2) plaquettes flipped, must be >= 1
    long db_size = 10000;
    uint64_t seed = 1;
};

struct ToyRepOutcome {
    long max_overlap;
    long weight_before;
    long weight_after; // after applying the best-overlap database entry
};

struct ToyOverlapStats {
    double mean_max_overlap = 0.0;
    double mean_overlap = 0.0; // over every (target, entry) pair seen
    double mean_weight_before = 0.0;
    double mean_weight_after = 0.0;
    std::vector<ToyRepOutcome> reps;
};

ToyOverlapStats nn_toy_overlap_experiment(const ToyLatticeConfig& cfg, int repetitions);

// ---- small valid-convolution stacks (1D/2D, kernel width 3) ------------

struct LocalNetSpec {
    int depth_m = 4;  // layers counted including the input; m-1 weight layers
    int input_n = 7;  // per-side width; must equal 2(m-1)+1
    int dims = 1;     // 1 or 2
    int channels = 1; // hidden channels
    bool shared = false; // convolutional (shared weights) vs locally connected
    Activation hidden_act = Activation::none; // output always passes through tanh in the cost
    double init_sigma = 0.1;
};

// Contracting stack without periodic wrap-around; no biases. Kept separate
// from the periodic decoder networks: these are the appendix toy models.
class LocalNet {
public:
    LocalNet(const LocalNetSpec& spec, Rng& rng);

    const LocalNetSpec& spec() const { return spec_; }

    // Forward to the single pre-tanh output value.
    double forward(const std::vector<double>& input) const;

    // Gradient of 0.5 * d_out^2-style losses: caller passes d(cost)/d(output).
    void backward(const std::vector<double>& input, double d_output);
    void sgd_update(double eta);
    void zero_grads();

    long n_weights() const;

private:
    struct Layer {
        int in_size;  // per-side grid width
        int out_size;
        int in_ch;
        int out_ch;
        std::vector<double> w;  // locally connected: [pos][k][ci][co]; shared: [k][ci][co]
        std::vector<double> gw;
    };
    double forward_impl(const std::vector<double>& input, std::vector<std::vector<double>>* acts) const;
    LocalNetSpec spec_;
    std::vector<Layer> layers_;
    mutable std::vector<std::vector<double>> scratch_;
};

// Number of connectivity paths from input position k to the output of a
// 1D kernel-width-3 stack with m layers; equals the coefficient of z^k in
// (1 + z + z^2)^(m-1).
long count_paths(int m, int n, int position);

struct VariancePoint {
    int position;
    double variance;
    long paths;
};

// Empirical Var(a_k) over random initializations of a linear stack;
// Observation: proportional to the path count.
std::vector<VariancePoint> variance_vs_paths_experiment(const LocalNetSpec& spec, int trials,
                                                        uint64_t seed);

struct AlignedRunOutcome {
    int run;
    bool converged;
    long steps;
    double final_cost;
    bool reversed_matches_center; // rounded tanh output equals the center bit on reversed inputs
    double aligned_accuracy;      // noisy variant: accuracy on aligned inputs
};

struct AlignedConfig {
    int input_n = 7;
    int channels = 10;
    bool noisy = false;   // zeros replaced by random +-1, relu hidden layers
    double eta0 = 0.05;
    double eta_decay = 0.999; // per step
    int batch = 100;
    double stop_cost = 0.02;
    long max_steps = 20000;
    uint64_t seed = 1;
};

// Trains y = x_center = x_corner = +-1 on a locally connected 2D stack and
// then probes inputs with the two bits reversed.
std::vector<AlignedRunOutcome> aligned_reversed_experiment(const AlignedConfig& cfg, int runs);

struct SensitivityPoint {
    int distance;
    double mean_abs_delta;
};

// Mean |change of the center face's pre-softmax score| when one input bit
// at the given L1 distance from the center site is flipped on top of a
// random reference syndrome; `reps` picks per distance.
std::vector<SensitivityPoint> sensitivity_vs_distance(const Network& net,
                                                      const LatticeGeometry& geom,
                                                      const std::vector<int>& distances, int reps,
                                                      double p_ref, uint64_t seed);

} // namespace toricnn
