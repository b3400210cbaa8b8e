#pragma once

#include <optional>
#include <vector>

#include "toricnn/bitfield.hpp"
#include "toricnn/gf2.hpp"
#include "toricnn/lattice.hpp"
#include "toricnn/rng.hpp"

namespace toricnn {

// Z-error pattern over the faces (one CSS sector; the X / Z-check sector is
// identical under lattice duality).
struct ErrorConfig {
    const LatticeGeometry* geom = nullptr;
    BitField bits;

    explicit ErrorConfig(const LatticeGeometry& g) : geom(&g), bits(static_cast<size_t>(g.n_faces())) {}
};

// Violated X-checks over the edges.
struct Syndrome {
    const LatticeGeometry* geom = nullptr;
    BitField bits;

    explicit Syndrome(const LatticeGeometry& g) : geom(&g), bits(static_cast<size_t>(g.n_edges())) {}

    size_t weight() const { return bits.count(); }
};

struct NoiseModel {
    double p = 0.0; // per-qubit flip probability
    double q = 0.0; // per-measurement flip probability (0 for error model (a))
};

struct LogicalClasses {
    bool nontrivial = false;
    uint8_t class_bits = 0; // bit r set = overlap with the rank-r crossing sheet is odd
};

ErrorConfig sample_error(const LatticeGeometry& geom, double p, Rng& rng);

Syndrome syndrome_of(const ErrorConfig& error);

// Syndrome of a hypothetical error consisting of the given faces; used for
// incremental updates when the decoder flips qubits.
void xor_face_boundary(const LatticeGeometry& geom, long face, BitField& syndrome_bits);

bool syndrome_is_valid(const Syndrome& s);

ErrorConfig apply_flips(const ErrorConfig& error, const std::vector<long>& faces);

// Homology class of a residual operator with empty syndrome: for each axis
// pair (i,j), the parity of overlap with the dual sheet of (i,j)-type faces
// pinned at `offset` on axes i and j.
LogicalClasses logical_failure(const ErrorConfig& residual);
LogicalClasses logical_failure_at_offset(const ErrorConfig& residual, int offset);

// Rank of the vertex-dependency parity-check matrix of the syndrome code
// (rows = vertices, cols = edges). Equals L^D - 1.
long syndrome_code_rank(const LatticeGeometry& geom);

Syndrome corrupt_syndrome(const Syndrome& s, double q, Rng& rng);

// Minimum-weight decode by bounded exhaustive search; test oracle for tiny
// instances only (L = 2, w_max <= 3). Ties broken by canonical face order.
std::optional<ErrorConfig> exhaustive_oracle_decode(const LatticeGeometry& geom, const Syndrome& s,
                                                    int w_max);

// Stabilizer generator matrix: one row per cube, columns over faces.
Gf2Matrix cube_stabilizer_matrix(const LatticeGeometry& geom);

} // namespace toricnn
