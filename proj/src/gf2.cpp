#include "toricnn/gf2.hpp"

#include <stdexcept>

namespace toricnn {

Gf2Matrix::Gf2Matrix(long rows, long cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(static_cast<size_t>(rows) * wpr_, 0) {}

void Gf2Matrix::set(long r, long c, bool v) {
    const uint64_t mask = 1ULL << (c & 63);
    if (v)
        row(r)[c >> 6] |= mask;
    else
        row(r)[c >> 6] &= ~mask;
}

void Gf2Matrix::xor_rows(long dst, long src) {
    uint64_t* d = row(dst);
    const uint64_t* s = row(src);
    for (long w = 0; w < wpr_; ++w) d[w] ^= s[w];
}

namespace {

// Row-echelon elimination over a packed row-major buffer; returns rank.
long eliminate(std::vector<uint64_t>& m, long rows, long cols, long wpr) {
    long rank = 0;
    for (long c = 0; c < cols && rank < rows; ++c) {
        const long w = c >> 6;
        const uint64_t mask = 1ULL << (c & 63);
        long pivot = -1;
        for (long r = rank; r < rows; ++r) {
            if (m[r * wpr + w] & mask) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (long k = 0; k < wpr; ++k) std::swap(m[pivot * wpr + k], m[rank * wpr + k]);
        for (long r = 0; r < rows; ++r) {
            if (r != rank && (m[r * wpr + w] & mask))
                for (long k = 0; k < wpr; ++k) m[r * wpr + k] ^= m[rank * wpr + k];
        }
        ++rank;
    }
    return rank;
}

} // namespace

long Gf2Matrix::rank() const {
    auto copy = data_;
    return eliminate(copy, rows_, cols_, wpr_);
}

bool Gf2Matrix::in_row_space(const BitField& v) const {
    if (static_cast<long>(v.size()) != cols_) throw std::invalid_argument("vector length != matrix cols");
    auto copy = data_;
    const long r0 = eliminate(copy, rows_, cols_, wpr_);
    copy.resize(copy.size() + wpr_, 0);
    for (long c = 0; c < cols_; ++c)
        if (v.get(c)) copy[rows_ * wpr_ + (c >> 6)] |= 1ULL << (c & 63);
    const long r1 = eliminate(copy, rows_ + 1, cols_, wpr_);
    return r1 == r0;
}

} // namespace toricnn
