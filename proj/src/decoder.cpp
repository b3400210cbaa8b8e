#include "toricnn/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toricnn {

Tensor syndrome_to_tensor(const LatticeGeometry& geom, const BitField& syndrome_bits) {
    Tensor t(geom.dim(), geom.side(), geom.dim());
    const long n_sites = geom.n_sites();
    for (int d = 0; d < geom.dim(); ++d) {
        const long base = static_cast<long>(d) * n_sites;
        for (long s = 0; s < n_sites; ++s)
            t.v[static_cast<size_t>(s) * geom.dim() + d] = syndrome_bits.get(base + s) ? 1.0 : 0.0;
    }
    return t;
}

Tensor nn_rank_faces(const Network& net, const LatticeGeometry& geom, const BitField& syndrome_bits) {
    if (net.dim != geom.dim()) throw std::invalid_argument("checkpoint dimension does not match lattice");
    if (net.in_channels() != geom.dim() || net.out_channels() != geom.n_axis_pairs())
        throw std::invalid_argument("checkpoint channel shape does not match lattice");
    for (const auto& l : net.layers)
        if (geom.side() < l.spec.kernel_side)
            throw std::invalid_argument("lattice side smaller than kernel side");
    return network_forward(net, syndrome_to_tensor(geom, syndrome_bits));
}

namespace {

void apply_face_flip(const LatticeGeometry& geom, long face, BitField& syndrome_bits,
                     std::vector<long>& flips) {
    xor_face_boundary(geom, face, syndrome_bits);
    flips.push_back(face);
}

// Shared NN flip loop. Runs until the syndrome empties, no new weight
// minimum is seen for cfg.stall_window steps, or max_steps is reached.
long run_step_loop(const Network& net, const LatticeGeometry& geom, BitField& syndrome_bits,
                   long max_steps, const DecoderConfig& cfg, std::vector<long>& flips,
                   std::vector<DecodeTraceStep>* trace) {
    long steps = 0;
    long best_weight = static_cast<long>(syndrome_bits.count());
    long last_improvement = 0;
    while (steps < max_steps && syndrome_bits.any()) {
        if (steps - last_improvement >= cfg.stall_window) break;
        const long w_before = static_cast<long>(syndrome_bits.count());
        const long flipped = nn_decode_step(net, geom, syndrome_bits, cfg, flips);
        ++steps;
        if (trace) trace->push_back({steps, w_before, flipped});
        const long w_after = static_cast<long>(syndrome_bits.count());
        if (w_after < best_weight) {
            best_weight = w_after;
            last_improvement = steps;
        }
    }
    return steps;
}

} // namespace

long nn_decode_step(const Network& net, const LatticeGeometry& geom, BitField& syndrome_bits,
                    const DecoderConfig& cfg, std::vector<long>& flips) {
    const Tensor scores = nn_rank_faces(net, geom, syndrome_bits);
    const long n_sites = geom.n_sites();
    const int c2 = geom.n_axis_pairs();

    if (cfg.threshold_flip) {
        long flipped = 0;
        for (int c = 0; c < c2; ++c)
            for (long s = 0; s < n_sites; ++s)
                if (scores.v[static_cast<size_t>(s) * c2 + c] > cfg.flip_threshold) {
                    apply_face_flip(geom, geom.face_index(s, c), syndrome_bits, flips);
                    ++flipped;
                }
        return flipped;
    }

    const long weight = static_cast<long>(syndrome_bits.count());
    const long m = std::max<long>(1, weight / cfg.flip_divisor);

    // Rank faces by (score desc, canonical face index asc).
    std::vector<std::pair<double, long>> ranked;
    ranked.reserve(static_cast<size_t>(n_sites) * c2);
    for (int c = 0; c < c2; ++c)
        for (long s = 0; s < n_sites; ++s)
            ranked.emplace_back(-scores.v[static_cast<size_t>(s) * c2 + c], geom.face_index(s, c));
    const size_t k = std::min<size_t>(static_cast<size_t>(m), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
    for (size_t i = 0; i < k; ++i) apply_face_flip(geom, ranked[i].second, syndrome_bits, flips);
    return static_cast<long>(k);
}

DecodeOutcome nn_decode(const Network& net, const ErrorConfig& error, const DecoderConfig& cfg,
                        std::vector<DecodeTraceStep>* trace) {
    const LatticeGeometry& geom = *error.geom;
    Syndrome s = syndrome_of(error);
    if (!syndrome_is_valid(s)) throw std::invalid_argument("error model (a) requires a valid syndrome");

    DecodeOutcome out;
    std::vector<long> flips;
    const long w0 = static_cast<long>(s.weight());
    if (w0 > 0) {
        const long budget = cfg.max_steps > 0 ? cfg.max_steps : 4 * w0;
        out.nn_steps = run_step_loop(net, geom, s.bits, budget, cfg, flips, trace);
        if (s.bits.any() && cfg.use_fallback)
            out.line_sweeps = parallel_line_decode(geom, s.bits, cfg.line_sweep_budget, flips);
    }
    out.total_flips = static_cast<long>(flips.size());
    out.residual_weight = static_cast<long>(s.weight());
    if (out.residual_weight > 0) {
        out.status = DecodeStatus::timeout;
        return out;
    }
    ErrorConfig residual = apply_flips(error, flips);
    const LogicalClasses cls = logical_failure(residual);
    out.class_bits = cls.class_bits;
    out.status = cls.nontrivial ? DecodeStatus::logical_failure : DecodeStatus::corrected_trivial;
    return out;
}

int parallel_line_decode(const LatticeGeometry& geom, BitField& syndrome_bits, int sweep_budget,
                         std::vector<long>& flips) {
    const long n_sites = geom.n_sites();
    const int D = geom.dim();
    const int L = geom.side();
    int sweeps = 0;
    while (syndrome_bits.any() && sweeps < sweep_budget) {
        // Violated edges in canonical order = ordered by direction, then base.
        const std::vector<size_t> list = syndrome_bits.set_bits();
        bool changed = false;
        for (size_t ei : list) {
            const long e = static_cast<long>(ei);
            if (!syndrome_bits.get(e)) continue;
            const int d = static_cast<int>(e / n_sites);
            const long site = e % n_sites;
            const auto x = geom.site_coords(site);

            long best = -1;
            int best_dist = std::numeric_limits<int>::max();
            for (size_t fi : list) {
                const long e2 = static_cast<long>(fi);
                if (e2 == e || e2 / n_sites != d || !syndrome_bits.get(e2)) continue;
                const auto y = geom.site_coords(e2 % n_sites);
                if (y[d] != x[d]) continue;
                int dist = 0;
                for (int a = 0; a < D; ++a) {
                    if (a == d) continue;
                    const int delta = std::abs(y[a] - x[a]);
                    dist += std::min(delta, L - delta);
                }
                if (dist < best_dist) {
                    best_dist = dist;
                    best = e2;
                }
            }
            if (best < 0) continue;

            const auto y = geom.site_coords(best % n_sites);
            int move_axis = -1, step = 0;
            for (int a = 0; a < D; ++a) {
                if (a == d || y[a] == x[a]) continue;
                int delta = (y[a] - x[a]) % L;
                if (delta < 0) delta += L;
                // Shortest periodic direction; exact ties move positively.
                step = (delta <= L - delta) ? +1 : -1;
                move_axis = a;
                break;
            }
            if (move_axis < 0) continue;

            const int pr = geom.pair_rank(std::min(d, move_axis), std::max(d, move_axis));
            const long base = step > 0 ? site : geom.site_neighbor(site, move_axis, -1);
            apply_face_flip(geom, geom.face_index(base, pr), syndrome_bits, flips);
            changed = true;
        }
        ++sweeps;
        if (!changed) break;
    }
    return sweeps;
}

std::vector<long> dklp_step(const LatticeGeometry& geom, BitField& syndrome_bits, Rng& rng) {
    std::vector<long> flips;
    const long n_sites = geom.n_sites();
    long edges[4];
    std::vector<long> pending;
    for (int pr = 0; pr < geom.n_axis_pairs(); ++pr) {
        const auto [i, j] = geom.axis_pair(pr);
        for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj) {
                // Decisions for one color class come from the syndrome as it
                // stood at the start of the substep.
                pending.clear();
                for (long s = 0; s < n_sites; ++s) {
                    const auto c = geom.site_coords(s);
                    if ((c[i] & 1) != ci || (c[j] & 1) != cj) continue;
                    const long face = geom.face_index(s, pr);
                    geom.face_boundary_edges_flat(face, edges);
                    int violated = 0;
                    for (long e : edges) violated += syndrome_bits.get(e) ? 1 : 0;
                    if (violated >= 3 || (violated == 2 && rng.bernoulli(0.5))) pending.push_back(face);
                }
                for (long face : pending) apply_face_flip(geom, face, syndrome_bits, flips);
            }
    }
    return flips;
}

void toom_step(const LatticeGeometry& geom, std::vector<int8_t>& values) {
    if (static_cast<long>(values.size()) != geom.n_faces())
        throw std::invalid_argument("Toom field must cover every face");
    const long n_sites = geom.n_sites();
    std::vector<int8_t> fresh(static_cast<size_t>(n_sites));
    for (int pr = 0; pr < geom.n_axis_pairs(); ++pr) {
        const auto [east_axis, north_axis] = geom.axis_pair(pr);
        const long base = static_cast<long>(pr) * n_sites;
        for (long s = 0; s < n_sites; ++s) {
            const int8_t v = values[base + s];
            const int8_t north = values[base + geom.site_neighbor(s, north_axis, +1)];
            const int8_t east = values[base + geom.site_neighbor(s, east_axis, +1)];
            fresh[s] = (v != north && v != east) ? static_cast<int8_t>(-v) : v;
        }
        std::copy(fresh.begin(), fresh.end(), values.begin() + base);
    }
}

NoisyRoundResult noisy_round_decode(const Network& net, ErrorConfig& err, Syndrome& s_true, double q,
                                    const DecoderConfig& cfg, Rng& rng,
                                    std::vector<DecodeTraceStep>* trace) {
    const LatticeGeometry& geom = *err.geom;
    Syndrome faulty = corrupt_syndrome(s_true, q, rng);
    std::vector<long> flips;
    NoisyRoundResult res;
    res.nn_steps = run_step_loop(net, geom, faulty.bits, cfg.noisy_round_budget, cfg, flips, trace);
    for (long f : flips) {
        err.bits.toggle(f);
        xor_face_boundary(geom, f, s_true.bits);
    }
    res.flips = static_cast<long>(flips.size());
    return res;
}

} // namespace toricnn
