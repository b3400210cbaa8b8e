#pragma once

#include <cstdint>
#include <vector>

#include "toricnn/bitfield.hpp"

namespace toricnn {

// Dense GF(2) matrix with word-packed rows. Only what the rank checks and
// stabilizer-membership tests need: Gaussian elimination.
class Gf2Matrix {
public:
    Gf2Matrix(long rows, long cols);

    long rows() const { return rows_; }
    long cols() const { return cols_; }

    bool get(long r, long c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(long r, long c, bool v);

    void xor_rows(long dst, long src);

    long rank() const; // elimination on a copy

    // True iff v (length cols) lies in the row space.
    bool in_row_space(const BitField& v) const;

private:
    const uint64_t* row(long r) const { return data_.data() + r * wpr_; }
    uint64_t* row(long r) { return data_.data() + r * wpr_; }

    long rows_, cols_, wpr_;
    std::vector<uint64_t> data_;
};

} // namespace toricnn
