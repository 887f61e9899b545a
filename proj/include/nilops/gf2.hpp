#ifndef NILOPS_GF2_HPP
#define NILOPS_GF2_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilops/error.hpp"

namespace nilops::gf2 {

/// Dense GF(2) vector, bit-packed into 64-bit words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    static BitVec unit(std::size_t n, std::size_t i) {
        BitVec v(n);
        v.set(i, true);
        return v;
    }

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool b) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (b)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVec& operator^=(const BitVec& o) {
        for (std::size_t w = 0; w < words_.size(); ++w)
            words_[w] ^= o.words_[w];
        return *this;
    }

    friend BitVec operator^(BitVec a, const BitVec& b) {
        a ^= b;
        return a;
    }

    bool is_zero() const {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    std::size_t count() const;

    /// Index of the lowest set bit, or size() if zero.
    std::size_t lowest_set() const;

    bool operator==(const BitVec& o) const { return size_ == o.size_ && words_ == o.words_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }
    bool operator<(const BitVec& o) const {
        if (size_ != o.size_)
            return size_ < o.size_;
        return words_ < o.words_;
    }

    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t x = words_[w];
            while (x) {
                f(w * 64 + static_cast<std::size_t>(__builtin_ctzll(x)));
                x &= x - 1;
            }
        }
    }

    std::string to_string() const;  // e.g. "101"

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;

    friend class BitMatrix;
};

/// Dense GF(2) matrix, bit-packed by rows. All arithmetic is mod 2; the
/// packing is an implementation detail and never observable.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(const std::vector<BitVec>& rows, std::size_t cols);
    static BitMatrix from_cols(const std::vector<BitVec>& cols, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }

    void set(std::size_t r, std::size_t c, bool b) {
        const std::uint64_t mask = std::uint64_t{1} << (c & 63);
        if (b)
            data_[r * wpr_ + (c >> 6)] |= mask;
        else
            data_[r * wpr_ + (c >> 6)] &= ~mask;
    }

    BitVec row(std::size_t r) const;
    BitVec col(std::size_t c) const;
    void set_row(std::size_t r, const BitVec& v);

    /// dst ^= src, as rows.
    void xor_row(std::size_t dst, std::size_t src) {
        const std::uint64_t* s = &data_[src * wpr_];
        std::uint64_t* d = &data_[dst * wpr_];
        for (std::size_t w = 0; w < wpr_; ++w)
            d[w] ^= s[w];
    }

    void swap_rows(std::size_t a, std::size_t b);

    bool row_is_zero(std::size_t r) const;

    BitMatrix transposed() const;

    /// Matrix-vector product m * x  (x indexed by columns).
    BitVec apply(const BitVec& x) const;

    BitMatrix operator*(const BitMatrix& o) const;
    BitMatrix operator+(const BitMatrix& o) const;

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    bool is_zero() const;

    /// [this | right] side by side.
    BitMatrix augmented(const BitMatrix& right) const;
    /// this stacked on top of below.
    BitMatrix stacked(const BitMatrix& below) const;

    std::string to_string() const;

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> data_;

    friend struct RowReduceOps;
};

struct RowReduceResult {
    std::size_t rank = 0;
    BitMatrix reduced;  // reduced row-echelon form
    std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form over GF(2). Dispatches to the OpenMP kernel
/// for large inputs; the result is the canonical RREF either way.
RowReduceResult row_reduce(const BitMatrix& m);

/// Serial reference implementation, kept for testing and benchmarking.
RowReduceResult row_reduce_serial(const BitMatrix& m);

/// OpenMP elimination kernel (also correct for small inputs, just slower).
RowReduceResult row_reduce_parallel(const BitMatrix& m);

std::size_t rank(const BitMatrix& m);

/// Solve m * x = b. Empty optional when the system is inconsistent.
/// Throws Shape on dimension mismatch.
std::optional<BitVec> solve(const BitMatrix& m, const BitVec& b);

/// Basis of the null space {x : m * x = 0}.
std::vector<BitVec> kernel_basis(const BitMatrix& m);

/// Incrementally maintained row space in reduced echelon form.
class Span {
public:
    explicit Span(std::size_t ambient) : ambient_(ambient) {}

    std::size_t ambient() const { return ambient_; }
    std::size_t rank() const { return basis_.size(); }

    /// Reduce v against the basis; the residue is zero iff v is in the span.
    BitVec residue(BitVec v) const;
    bool contains(const BitVec& v) const { return residue(v).is_zero(); }

    /// Insert v; returns true when the rank grew.
    bool insert(BitVec v);

    /// Coefficients of v in the echelon basis. Throws Shape when v is not
    /// in the span. (Pivots are unique to their rows, so coefficient j is
    /// just bit pivot_j of v.)
    BitVec coordinates(const BitVec& v) const;

    /// Echelon basis rows (pivot-sorted; deterministic).
    const std::vector<BitVec>& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    bool operator==(const Span& o) const {
        return ambient_ == o.ambient_ && basis_ == o.basis_;
    }

private:
    std::size_t ambient_;
    std::vector<BitVec> basis_;
    std::vector<std::size_t> pivots_;
};

/// Basis of the intersection of two spans in a common ambient space.
std::vector<BitVec> span_intersection(const Span& a, const Span& b);

/// Graded GF(2) vector space on degrees [0, D] with optional basis labels.
struct GradedVectorSpace {
    std::vector<std::size_t> dims;  // index 0..D
    std::map<std::pair<int, std::size_t>, std::string> labels;

    GradedVectorSpace() = default;
    explicit GradedVectorSpace(std::vector<std::size_t> d) : dims(std::move(d)) {}

    int top_degree() const { return static_cast<int>(dims.size()) - 1; }

    std::size_t dim(int d) const {
        if (d < 0 || d > top_degree())
            return 0;
        return dims[static_cast<std::size_t>(d)];
    }

    std::string label(int d, std::size_t i) const;
    void validate() const;  // throws Validation on bad label coordinates
};

/// Degree-shifted graded linear map. A block is stored exactly for the
/// degrees d with dim_source(d) > 0 and 0 <= d+shift <= target top degree.
struct GradedLinearMap {
    GradedVectorSpace source;
    GradedVectorSpace target;
    int shift = 0;
    std::map<int, BitMatrix> blocks;

    const BitMatrix* block(int d) const {
        auto it = blocks.find(d);
        return it == blocks.end() ? nullptr : &it->second;
    }

    /// The block at degree d, materializing zeros where no block is stored.
    BitMatrix block_or_zero(int d) const;

    BitVec apply(int d, const BitVec& x) const;

    void validate() const;  // block-presence rule and shapes
};

/// Sub-quotient span(generators)/span(relations) of one degree slice,
/// with explicit projection and inclusion.
class Subquotient {
public:
    /// Throws Validation when a relation is outside the generator span.
    Subquotient(std::size_t ambient_dim, const std::vector<BitVec>& generators,
                const std::vector<BitVec>& relations);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return reps_.size(); }

    /// Representative (lift) of quotient basis element i.
    const BitVec& representative(std::size_t i) const { return reps_[i]; }

    /// Quotient coordinates of an ambient vector. Throws Shape when the
    /// vector is not in the generator span.
    BitVec project(const BitVec& ambient) const;

    /// Ambient representative of a quotient coordinate vector.
    BitVec include(const BitVec& coords) const;

    const Span& generator_span() const { return gens_; }
    const Span& relation_span() const { return rels_; }

private:
    std::size_t ambient_;
    Span gens_;
    Span rels_;
    std::vector<BitVec> reps_;
    // columns = [relation basis | representatives]; used to split a vector
    BitMatrix split_;
};

}  // namespace nilops::gf2

#endif
