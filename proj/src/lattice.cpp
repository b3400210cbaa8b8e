#include "toricnn/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace toricnn {

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

LatticeGeometry::LatticeGeometry(int dim, int side) : dim_(dim), side_(side) {
    if (dim != 3 && dim != 4) throw std::invalid_argument("lattice dimension must be 3 or 4");
    if (side < 2) throw std::invalid_argument("lattice side must be >= 2");
    n_sites_ = 1;
    for (int a = 0; a < dim_; ++a) n_sites_ *= side_;
    long s = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= side_;
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j) {
            pair_rank_[i][j] = static_cast<int>(pairs_.size());
            pairs_.emplace_back(i, j);
        }
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j)
            for (int k = j + 1; k < dim_; ++k) {
                if (dim_ == 4) triple_rank_by_missing_[6 - i - j - k] = static_cast<int>(triples_.size());
                triples_.push_back({i, j, k});
            }

    neighbor_.resize(static_cast<size_t>(n_sites_) * 2 * dim_);
    for (long v = 0; v < n_sites_; ++v) {
        auto c = site_coords(v);
        for (int a = 0; a < dim_; ++a) {
            auto cm = c, cp = c;
            cm[a] = (c[a] + side_ - 1) % side_;
            cp[a] = (c[a] + 1) % side_;
            neighbor_[static_cast<size_t>(v) * 2 * dim_ + 2 * a] = site_index(cm);
            neighbor_[static_cast<size_t>(v) * 2 * dim_ + 2 * a + 1] = site_index(cp);
        }
    }
}

long LatticeGeometry::cell_count(int k) const {
    return binomial(dim_, k) * n_sites_;
}

long LatticeGeometry::site_index(const std::array<int, 4>& c) const {
    long idx = 0;
    for (int a = 0; a < dim_; ++a) {
        int x = c[a] % side_;
        if (x < 0) x += side_;
        idx += x * strides_[a];
    }
    return idx;
}

std::array<int, 4> LatticeGeometry::site_coords(long site) const {
    std::array<int, 4> c{0, 0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        c[a] = static_cast<int>((site / strides_[a]) % side_);
    }
    return c;
}

void LatticeGeometry::validate(const CellIndex& c) const {
    const int k = cell_dim(c.kind);
    for (int a = 0; a < dim_; ++a)
        if (c.base[a] < 0 || c.base[a] >= side_) throw std::out_of_range("cell base coordinate out of range");
    for (int a = dim_; a < 4; ++a)
        if (c.base[a] != 0) throw std::out_of_range("cell base coordinate beyond lattice dimension");
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        if (c.axes[i] <= prev || c.axes[i] >= dim_) throw std::out_of_range("cell axes must be strictly increasing and < D");
        prev = c.axes[i];
    }
    for (int i = k; i < 3; ++i)
        if (c.axes[i] != -1) throw std::out_of_range("cell has too many axes for its kind");
}

long LatticeGeometry::cell_to_index(const CellIndex& c) const {
    validate(c);
    const long site = site_index(c.base);
    switch (c.kind) {
        case CellKind::vertex: return site;
        case CellKind::edge: return edge_index(site, c.axes[0]);
        case CellKind::face: return face_index(site, pair_rank_[c.axes[0]][c.axes[1]]);
        case CellKind::cube: {
            if (dim_ == 3) return site;
            return cube_index(site, triple_rank_by_missing_[6 - c.axes[0] - c.axes[1] - c.axes[2]]);
        }
    }
    throw std::out_of_range("bad cell kind");
}

CellIndex LatticeGeometry::cell_from_index(CellKind kind, long index) const {
    if (index < 0 || index >= cell_count(cell_dim(kind))) throw std::out_of_range("cell index out of range");
    CellIndex c;
    c.kind = kind;
    const long site = index % n_sites_;
    const int rank = static_cast<int>(index / n_sites_);
    c.base = site_coords(site);
    switch (kind) {
        case CellKind::vertex: break;
        case CellKind::edge: c.axes[0] = rank; break;
        case CellKind::face: {
            auto [i, j] = pairs_[rank];
            c.axes[0] = i;
            c.axes[1] = j;
            break;
        }
        case CellKind::cube: {
            const auto& t = triples_[rank];
            c.axes = t;
            break;
        }
    }
    return c;
}

std::vector<CellIndex> LatticeGeometry::face_boundary_edges(const CellIndex& face) const {
    if (face.kind != CellKind::face) throw std::out_of_range("expected a face index");
    validate(face);
    const int i = face.axes[0], j = face.axes[1];
    std::vector<CellIndex> out;
    out.reserve(4);
    auto push = [&](std::array<int, 4> base, int axis) {
        CellIndex e;
        e.kind = CellKind::edge;
        e.base = base;
        e.axes[0] = axis;
        out.push_back(e);
    };
    auto bj = face.base, bi = face.base;
    bj[j] = (face.base[j] + 1) % side_;
    bi[i] = (face.base[i] + 1) % side_;
    push(face.base, i);
    push(face.base, j);
    push(bj, i);
    push(bi, j);
    return out;
}

std::vector<CellIndex> LatticeGeometry::edge_incident_faces(const CellIndex& edge) const {
    if (edge.kind != CellKind::edge) throw std::out_of_range("expected an edge index");
    validate(edge);
    const int d = edge.axes[0];
    std::vector<CellIndex> out;
    out.reserve(2 * (dim_ - 1));
    for (int a = 0; a < dim_; ++a) {
        if (a == d) continue;
        CellIndex f;
        f.kind = CellKind::face;
        f.axes[0] = std::min(a, d);
        f.axes[1] = std::max(a, d);
        f.base = edge.base;
        out.push_back(f);
        f.base[a] = (edge.base[a] + side_ - 1) % side_;
        out.push_back(f);
    }
    return out;
}

std::vector<CellIndex> LatticeGeometry::cube_incident_faces(const CellIndex& cube) const {
    if (cube.kind != CellKind::cube) throw std::out_of_range("expected a cube index");
    validate(cube);
    const int i = cube.axes[0], j = cube.axes[1], k = cube.axes[2];
    std::vector<CellIndex> out;
    out.reserve(6);
    auto push = [&](int a, int b, int shift_axis) {
        CellIndex f;
        f.kind = CellKind::face;
        f.axes[0] = a;
        f.axes[1] = b;
        f.base = cube.base;
        out.push_back(f);
        f.base[shift_axis] = (cube.base[shift_axis] + 1) % side_;
        out.push_back(f);
    };
    push(i, j, k);
    push(i, k, j);
    push(j, k, i);
    return out;
}

std::vector<CellIndex> LatticeGeometry::vertex_incident_edges(const CellIndex& vertex) const {
    if (vertex.kind != CellKind::vertex) throw std::out_of_range("expected a vertex index");
    validate(vertex);
    std::vector<CellIndex> out;
    out.reserve(2 * dim_);
    for (int a = 0; a < dim_; ++a) {
        CellIndex e;
        e.kind = CellKind::edge;
        e.axes[0] = a;
        e.base = vertex.base;
        out.push_back(e);
        e.base[a] = (vertex.base[a] + side_ - 1) % side_;
        out.push_back(e);
    }
    return out;
}

void LatticeGeometry::face_boundary_edges_flat(long face, long out[4]) const {
    const long site = face % n_sites_;
    const auto [i, j] = pairs_[face / n_sites_];
    out[0] = edge_index(site, i);
    out[1] = edge_index(site, j);
    out[2] = edge_index(site_neighbor(site, j, +1), i);
    out[3] = edge_index(site_neighbor(site, i, +1), j);
}

void LatticeGeometry::edge_incident_faces_flat(long edge, long* out) const {
    const long site = edge % n_sites_;
    const int d = static_cast<int>(edge / n_sites_);
    int n = 0;
    for (int a = 0; a < dim_; ++a) {
        if (a == d) continue;
        const int pr = pair_rank_[std::min(a, d)][std::max(a, d)];
        out[n++] = face_index(site, pr);
        out[n++] = face_index(site_neighbor(site, a, -1), pr);
    }
}

void LatticeGeometry::cube_incident_faces_flat(long cube, long out[6]) const {
    const long site = cube % n_sites_;
    const auto& t = triples_[cube / n_sites_];
    const int i = t[0], j = t[1], k = t[2];
    out[0] = face_index(site, pair_rank_[i][j]);
    out[1] = face_index(site_neighbor(site, k, +1), pair_rank_[i][j]);
    out[2] = face_index(site, pair_rank_[i][k]);
    out[3] = face_index(site_neighbor(site, j, +1), pair_rank_[i][k]);
    out[4] = face_index(site, pair_rank_[j][k]);
    out[5] = face_index(site_neighbor(site, i, +1), pair_rank_[j][k]);
}

void LatticeGeometry::vertex_incident_edges_flat(long vertex, long* out) const {
    int n = 0;
    for (int a = 0; a < dim_; ++a) {
        out[n++] = edge_index(vertex, a);
        out[n++] = edge_index(site_neighbor(vertex, a, -1), a);
    }
}

CellIndex LatticeGeometry::shifted(const CellIndex& c, const std::array<int, 4>& t) const {
    CellIndex out = c;
    for (int a = 0; a < dim_; ++a) {
        int x = (c.base[a] + t[a]) % side_;
        if (x < 0) x += side_;
        out.base[a] = x;
    }
    return out;
}

std::vector<CellIndex> LogicalSheet::faces(const LatticeGeometry& geom) const {
    std::vector<CellIndex> out;
    const int i = plane.first, j = plane.second;
    CellIndex f;
    f.kind = CellKind::face;
    f.axes[0] = i;
    f.axes[1] = j;
    f.base = {0, 0, 0, 0};
    for (int a = 0; a < geom.dim(); ++a)
        if (a != i && a != j) f.base[a] = ((transverse[a] % geom.side()) + geom.side()) % geom.side();
    for (int u = 0; u < geom.side(); ++u)
        for (int v = 0; v < geom.side(); ++v) {
            f.base[i] = u;
            f.base[j] = v;
            out.push_back(f);
        }
    return out;
}

std::vector<LogicalSheet> logical_sheets(const LatticeGeometry& geom) {
    std::vector<LogicalSheet> out;
    for (int r = 0; r < geom.n_axis_pairs(); ++r) out.push_back({geom.axis_pair(r), {0, 0, 0, 0}});
    return out;
}

} // namespace toricnn
