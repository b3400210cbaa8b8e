#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "toricnn/code.hpp"
#include "toricnn/network.hpp"

namespace toricnn {

struct DecoderConfig {
    int flip_divisor = 50;      // x in m = max(1, floor(weight / x))
    long max_steps = 0;         // NN iteration budget; 0 = 4 * initial syndrome weight
    int stall_window = 8;       // steps without a new weight minimum before giving up
    bool use_fallback = true;   // parallel line decoder after the NN loop (error model (a))
    int line_sweep_budget = 32;
    bool threshold_flip = false;  // alternative rule: flip every face scoring above cutoff
    double flip_threshold = 0.0;  // cutoff on pre-softmax scores (threshold mode only)
    long noisy_round_budget = 32; // NN steps per round in error model (b)
};

enum class DecodeStatus : uint8_t { corrected_trivial = 0, logical_failure = 1, timeout = 2 };

struct DecodeOutcome {
    DecodeStatus status = DecodeStatus::corrected_trivial;
    long nn_steps = 0;
    int line_sweeps = 0;
    long residual_weight = 0;
    uint8_t class_bits = 0;
    long total_flips = 0;
};

struct DecodeTraceStep {
    long step;
    long weight_before;
    long flips;
};

// Syndrome bits as a (L,..,L,D) tensor of 0/1 values, edge channel = axis.
Tensor syndrome_to_tensor(const LatticeGeometry& geom, const BitField& syndrome_bits);

// Per-face score field (pre-softmax). The checkpoint must match the
// geometry's dimension and channel counts, and L must be >= the largest
// kernel side; a net trained at L_train evaluates at any such L.
Tensor nn_rank_faces(const Network& net, const LatticeGeometry& geom, const BitField& syndrome_bits);

// One flip round: selects max(1, floor(weight/x)) top-scoring faces (or all
// faces above the threshold in threshold mode), ties broken by smallest
// canonical face index. Flips are applied to `syndrome_bits` and appended
// to `flips`.
long nn_decode_step(const Network& net, const LatticeGeometry& geom, BitField& syndrome_bits,
                    const DecoderConfig& cfg, std::vector<long>& flips);

// Full decode for error model (a): iterate NN steps until the syndrome is
// empty, the weight stalls, or the budget runs out, then fall back to the
// parallel line decoder; the residual is classified by homology class.
DecodeOutcome nn_decode(const Network& net, const ErrorConfig& error, const DecoderConfig& cfg,
                        std::vector<DecodeTraceStep>* trace = nullptr);

// Greedy subroutine for syndromes consisting of a few parallel lines: pairs
// same-direction violated edges with equal coordinate along their own axis
// and moves them together one face flip at a time. Returns sweeps used.
int parallel_line_decode(const LatticeGeometry& geom, BitField& syndrome_bits, int sweep_budget,
                         std::vector<long>& flips);

// One DKLP sweep: a face is flipped when 3 or 4 of its boundary edges are
// violated, with probability 1/2 when exactly 2 are. Faces sharing an edge
// are never updated in the same substep; the schedule walks (face type,
// base-parity color) classes sequentially.
std::vector<long> dklp_step(const LatticeGeometry& geom, BitField& syndrome_bits, Rng& rng);

// One pass of Toom's rule over every 2D plane family of the lattice, in
// axis-pair order. Within a family the update is synchronous; `north` is
// the neighbor along the higher axis, `east` along the lower. Values are a
// +-1 field over the faces.
void toom_step(const LatticeGeometry& geom, std::vector<int8_t>& values);

struct NoisyRoundResult {
    long flips = 0;
    long nn_steps = 0;
};

// One error-correction round for error model (b): corrupt the tracked
// noiseless syndrome with q, run the budget-capped NN loop against the
// faulty copy (no parallel-line fallback), and apply every flip to the true
// state. `err` and `s_true` are updated in place.
NoisyRoundResult noisy_round_decode(const Network& net, ErrorConfig& err, Syndrome& s_true, double q,
                                    const DecoderConfig& cfg, Rng& rng,
                                    std::vector<DecodeTraceStep>* trace = nullptr);

} // namespace toricnn
