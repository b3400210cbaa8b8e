#include "toricnn/code.hpp"

#include <stdexcept>

namespace toricnn {

ErrorConfig sample_error(const LatticeGeometry& geom, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("flip probability must be in [0,1]");
    ErrorConfig e(geom);
    const long n = geom.n_faces();
    for (long f = 0; f < n; ++f)
        if (rng.bernoulli(p)) e.bits.set(f, true);
    return e;
}

void xor_face_boundary(const LatticeGeometry& geom, long face, BitField& syndrome_bits) {
    long edges[4];
    geom.face_boundary_edges_flat(face, edges);
    for (long e : edges) syndrome_bits.toggle(e);
}

Syndrome syndrome_of(const ErrorConfig& error) {
    Syndrome s(*error.geom);
    error.bits.for_each_set([&](size_t f) { xor_face_boundary(*error.geom, static_cast<long>(f), s.bits); });
    return s;
}

bool syndrome_is_valid(const Syndrome& s) {
    const LatticeGeometry& g = *s.geom;
    long edges[8];
    for (long v = 0; v < g.n_sites(); ++v) {
        g.vertex_incident_edges_flat(v, edges);
        int parity = 0;
        for (int i = 0; i < 2 * g.dim(); ++i) parity ^= s.bits.get(edges[i]) ? 1 : 0;
        if (parity) return false;
    }
    return true;
}

ErrorConfig apply_flips(const ErrorConfig& error, const std::vector<long>& faces) {
    ErrorConfig out = error;
    for (long f : faces) {
        if (f < 0 || f >= error.geom->n_faces()) throw std::out_of_range("face index out of range");
        out.bits.toggle(f);
    }
    return out;
}

LogicalClasses logical_failure_at_offset(const ErrorConfig& residual, int offset) {
    const LatticeGeometry& g = *residual.geom;
    {
        Syndrome s = syndrome_of(residual);
        if (s.bits.any()) throw std::invalid_argument("logical_failure requires a zero syndrome");
    }
    LogicalClasses out;
    // The crossing operator for logical (i,j) is the dual sheet of
    // (i,j)-type faces with coordinates pinned on axes i and j; it meets
    // the primal (i,j) logical sheet in exactly one face.
    for (int r = 0; r < g.n_axis_pairs(); ++r) {
        const auto [i, j] = g.axis_pair(r);
        int parity = 0;
        CellIndex f;
        f.kind = CellKind::face;
        f.axes[0] = i;
        f.axes[1] = j;
        f.base = {0, 0, 0, 0};
        f.base[i] = offset % g.side();
        f.base[j] = offset % g.side();
        // Enumerate the free (non i,j) coordinates.
        std::array<int, 2> free_axes{-1, -1};
        int nf = 0;
        for (int a = 0; a < g.dim(); ++a)
            if (a != i && a != j) free_axes[nf++] = a;
        const int span0 = g.side();
        const int span1 = (nf == 2) ? g.side() : 1;
        for (int u = 0; u < span0; ++u)
            for (int v = 0; v < span1; ++v) {
                f.base[free_axes[0]] = u;
                if (nf == 2) f.base[free_axes[1]] = v;
                if (residual.bits.get(g.cell_to_index(f))) parity ^= 1;
            }
        if (parity) out.class_bits |= static_cast<uint8_t>(1u << r);
    }
    out.nontrivial = out.class_bits != 0;
    return out;
}

LogicalClasses logical_failure(const ErrorConfig& residual) {
    return logical_failure_at_offset(residual, 0);
}

long syndrome_code_rank(const LatticeGeometry& geom) {
    if (geom.dim() == 4 && geom.side() > 4)
        throw std::invalid_argument("syndrome_code_rank is limited to L <= 4 at D = 4");
    Gf2Matrix m(geom.n_sites(), geom.n_edges());
    std::vector<long> edges(2 * geom.dim());
    for (long v = 0; v < geom.n_sites(); ++v) {
        geom.vertex_incident_edges_flat(v, edges.data());
        for (long e : edges) m.set(v, e, true);
    }
    return m.rank();
}

Syndrome corrupt_syndrome(const Syndrome& s, double q, Rng& rng) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("measurement flip probability must be in [0,1]");
    Syndrome out = s;
    const long n = s.geom->n_edges();
    for (long e = 0; e < n; ++e)
        if (rng.bernoulli(q)) out.bits.toggle(e);
    return out;
}

std::optional<ErrorConfig> exhaustive_oracle_decode(const LatticeGeometry& geom, const Syndrome& s,
                                                    int w_max) {
    if (w_max > 3) throw std::invalid_argument("oracle weight bound must be <= 3");
    const long n = geom.n_faces();
    if (n > 128) throw std::invalid_argument("oracle limited to tiny lattices (L = 2)");

    if (!s.bits.any()) return ErrorConfig(geom);

    // Boundaries of single faces, reused across candidates.
    std::vector<BitField> bnd(n, BitField(static_cast<size_t>(geom.n_edges())));
    for (long f = 0; f < n; ++f) xor_face_boundary(geom, f, bnd[f]);

    auto make = [&](std::initializer_list<long> faces) {
        ErrorConfig e(geom);
        for (long f : faces) e.bits.set(f, true);
        return e;
    };

    for (long f = 0; f < n && w_max >= 1; ++f)
        if (bnd[f] == s.bits) return make({f});
    for (long f = 0; f < n && w_max >= 2; ++f)
        for (long g2 = f + 1; g2 < n; ++g2)
            if ((bnd[f] ^ bnd[g2]) == s.bits) return make({f, g2});
    for (long f = 0; f < n && w_max >= 3; ++f)
        for (long g2 = f + 1; g2 < n; ++g2) {
            const BitField two = bnd[f] ^ bnd[g2];
            for (long h = g2 + 1; h < n; ++h)
                if ((two ^ bnd[h]) == s.bits) return make({f, g2, h});
        }
    return std::nullopt;
}

Gf2Matrix cube_stabilizer_matrix(const LatticeGeometry& geom) {
    Gf2Matrix m(geom.n_cubes(), geom.n_faces());
    long faces[6];
    for (long c = 0; c < geom.n_cubes(); ++c) {
        geom.cube_incident_faces_flat(c, faces);
        for (long f : faces) m.set(c, f, true);
    }
    return m;
}

} // namespace toricnn
