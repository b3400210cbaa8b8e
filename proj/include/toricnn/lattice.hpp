#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace toricnn {

// Cell classes of the hypercubic complex. Qubits live on faces, X-checks on
// edges, Z-checks on cubes.
enum class CellKind : uint8_t { vertex = 0, edge = 1, face = 2, cube = 3 };

inline int cell_dim(CellKind k) { return static_cast<int>(k); }

// A k-cell keyed by its base vertex and the strictly increasing set of axes
// it extends along.
struct CellIndex {
    CellKind kind = CellKind::vertex;
    std::array<int, 4> base{0, 0, 0, 0};
    std::array<int, 3> axes{-1, -1, -1};

    bool operator==(const CellIndex&) const = default;
};

// Periodic hypercubic cell complex in D = 3 or 4 dimensions with side
// length L. Immutable after construction; incidence is computed from
// coordinates, with a per-site neighbor table as the hot-path cache.
class LatticeGeometry {
public:
    LatticeGeometry(int dim, int side);

    int dim() const { return dim_; }
    int side() const { return side_; }
    long n_sites() const { return n_sites_; }

    // binomial(D,k) * L^D
    long cell_count(int k) const;
    long n_edges() const { return cell_count(1); }
    long n_faces() const { return cell_count(2); }
    long n_cubes() const { return cell_count(3); }

    int n_axis_pairs() const { return static_cast<int>(pairs_.size()); }
    int n_axis_triples() const { return static_cast<int>(triples_.size()); }
    std::pair<int, int> axis_pair(int rank) const { return pairs_[rank]; }
    int pair_rank(int i, int j) const { return pair_rank_[i][j]; }
    const std::array<int, 3>& axis_triple(int rank) const { return triples_[rank]; }

    // Site (vertex) linear index: row-major over coordinates, last axis
    // fastest. All coordinates are reduced mod L.
    long site_index(const std::array<int, 4>& c) const;
    std::array<int, 4> site_coords(long site) const;
    long site_neighbor(long site, int axis, int step) const {
        return neighbor_[static_cast<size_t>(site) * 2 * dim_ + 2 * axis + (step > 0 ? 1 : 0)];
    }

    // Canonical linear cell indices: lexicographic over (axis subset rank,
    // base site). Faces of pair rank r occupy [r*L^D, (r+1)*L^D).
    long cell_to_index(const CellIndex& c) const;
    CellIndex cell_from_index(CellKind kind, long index) const;

    long edge_index(long site, int axis) const { return axis * n_sites_ + site; }
    long face_index(long site, int pair_rank) const { return pair_rank * n_sites_ + site; }
    long cube_index(long site, int triple_rank) const { return triple_rank * n_sites_ + site; }

    // Incidence operations. Each validates its argument and throws
    // std::out_of_range on an invalid index.
    std::vector<CellIndex> face_boundary_edges(const CellIndex& face) const;
    std::vector<CellIndex> edge_incident_faces(const CellIndex& edge) const;
    std::vector<CellIndex> cube_incident_faces(const CellIndex& cube) const;
    std::vector<CellIndex> vertex_incident_edges(const CellIndex& vertex) const;

    // Flat-index variants used by the simulation hot paths.
    void face_boundary_edges_flat(long face, long out[4]) const;
    void edge_incident_faces_flat(long edge, long* out) const; // 2(D-1) entries
    void cube_incident_faces_flat(long cube, long out[6]) const;
    void vertex_incident_edges_flat(long vertex, long* out) const; // 2D entries

    CellIndex shifted(const CellIndex& c, const std::array<int, 4>& t) const;

    void validate(const CellIndex& c) const;

private:
    int dim_;
    int side_;
    long n_sites_;
    std::array<long, 5> strides_{}; // strides_[a] = L^(D-1-a)
    std::vector<std::pair<int, int>> pairs_;
    std::vector<std::array<int, 3>> triples_;
    int pair_rank_[4][4] = {};
    int triple_rank_by_missing_[4] = {}; // D=4: triple rank by the absing axis
    std::vector<long> neighbor_;         // [site][2*axis + dir]
};

// One representative logical-operator sheet: all faces of type `plane`
// whose coordinates on the remaining axes equal `transverse`.
struct LogicalSheet {
    std::pair<int, int> plane;
    std::array<int, 4> transverse{0, 0, 0, 0}; // only non-plane axes are read

    std::vector<CellIndex> faces(const LatticeGeometry& geom) const;
};

// One sheet per axis pair, at transverse offset 0.
std::vector<LogicalSheet> logical_sheets(const LatticeGeometry& geom);

long binomial(int n, int k);

} // namespace toricnn
