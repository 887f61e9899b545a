#include "nilops/gf2.hpp"

#include <algorithm>
#include <sstream>

namespace nilops::gf2 {

std::size_t BitVec::count() const {
    std::size_t n = 0;
    for (auto w : words_)
        n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
}

std::size_t BitVec::lowest_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w])
            return w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w]));
    return size_;
}

std::string BitVec::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i))
            s[i] = '1';
    return s;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVec>& rows, std::size_t cols) {
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        m.set_row(r, rows[r]);
    return m;
}

BitMatrix BitMatrix::from_cols(const std::vector<BitVec>& cols, std::size_t rows) {
    BitMatrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].size() != rows)
            throw shape_error("from_cols: column length mismatch");
        cols[c].for_each_set([&](std::size_t r) { m.set(r, c, true); });
    }
    return m;
}

BitVec BitMatrix::row(std::size_t r) const {
    BitVec v(cols_);
    for (std::size_t w = 0; w < wpr_; ++w)
        v.words_[w] = data_[r * wpr_ + w];
    return v;
}

BitVec BitMatrix::col(std::size_t c) const {
    BitVec v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        if (get(r, c))
            v.set(r, true);
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVec& v) {
    if (v.size() != cols_)
        throw shape_error("set_row: length mismatch");
    for (std::size_t w = 0; w < wpr_; ++w)
        data_[r * wpr_ + w] = v.words_[w];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b)
        return;
    for (std::size_t w = 0; w < wpr_; ++w)
        std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
}

bool BitMatrix::row_is_zero(std::size_t r) const {
    for (std::size_t w = 0; w < wpr_; ++w)
        if (data_[r * wpr_ + w])
            return false;
    return true;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        row(r).for_each_set([&](std::size_t c) { t.set(c, r, true); });
    return t;
}

BitVec BitMatrix::apply(const BitVec& x) const {
    if (x.size() != cols_)
        throw shape_error("apply: vector length " + std::to_string(x.size()) +
                          " vs " + std::to_string(cols_) + " columns");
    BitVec y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < wpr_; ++w)
            acc ^= data_[r * wpr_ + w] & x.words_[w];
        if (__builtin_popcountll(acc) & 1)
            y.set(r, true);
    }
    return y;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
    if (cols_ != o.rows_)
        throw shape_error("matrix product shape mismatch");
    BitMatrix out(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        // out.row(r) = xor of o rows selected by bits of this row r
        row(r).for_each_set([&](std::size_t k) {
            for (std::size_t w = 0; w < o.wpr_; ++w)
                out.data_[r * out.wpr_ + w] ^= o.data_[k * o.wpr_ + w];
        });
    }
    return out;
}

BitMatrix BitMatrix::operator+(const BitMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw shape_error("matrix sum shape mismatch");
    BitMatrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i)
        out.data_[i] ^= o.data_[i];
    return out;
}

bool BitMatrix::is_zero() const {
    for (auto w : data_)
        if (w)
            return false;
    return true;
}

BitMatrix BitMatrix::augmented(const BitMatrix& right) const {
    if (rows_ != right.rows_)
        throw shape_error("augmented: row count mismatch");
    BitMatrix out(rows_, cols_ + right.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        row(r).for_each_set([&](std::size_t c) { out.set(r, c, true); });
        right.row(r).for_each_set([&](std::size_t c) { out.set(r, cols_ + c, true); });
    }
    return out;
}

BitMatrix BitMatrix::stacked(const BitMatrix& below) const {
    if (cols_ != below.cols_)
        throw shape_error("stacked: column count mismatch");
    BitMatrix out(rows_ + below.rows_, cols_);
    std::copy(data_.begin(), data_.end(), out.data_.begin());
    std::copy(below.data_.begin(), below.data_.end(), out.data_.begin() + static_cast<long>(rows_ * wpr_));
    return out;
}

std::string BitMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c)
            os << (get(r, c) ? '1' : '0');
        os << '\n';
    }
    return os.str();
}

namespace {

// Shared Gauss-Jordan skeleton. Eliminate() clears the pivot column from
// every other row; the two variants differ only in how that loop runs.
template <class EliminateFn>
RowReduceResult gauss_jordan(BitMatrix m, EliminateFn&& eliminate) {
    RowReduceResult res;
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (m.get(i, c)) {
                pivot = i;
                break;
            }
        }
        if (pivot == rows)
            continue;
        m.swap_rows(r, pivot);
        eliminate(m, r, c);
        res.pivot_cols.push_back(c);
        ++r;
    }
    res.rank = r;
    res.reduced = std::move(m);
    return res;
}

}  // namespace

RowReduceResult row_reduce_serial(const BitMatrix& m) {
    return gauss_jordan(m, [](BitMatrix& a, std::size_t r, std::size_t c) {
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != r && a.get(i, c))
                a.xor_row(i, r);
    });
}

RowReduceResult row_reduce_parallel(const BitMatrix& m) {
    return gauss_jordan(m, [](BitMatrix& a, std::size_t r, std::size_t c) {
        const long n = static_cast<long>(a.rows());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(i);
            if (row != r && a.get(row, c))
                a.xor_row(row, r);
        }
    });
}

RowReduceResult row_reduce(const BitMatrix& m) {
    // Row elimination is worth spreading across threads once the row count
    // and the packed row width are both nontrivial.
    if (m.rows() >= 256 && m.cols() >= 256)
        return row_reduce_parallel(m);
    return row_reduce_serial(m);
}

std::size_t rank(const BitMatrix& m) {
    return row_reduce(m).rank;
}

std::optional<BitVec> solve(const BitMatrix& m, const BitVec& b) {
    if (b.size() != m.rows())
        throw shape_error("solve: rhs length " + std::to_string(b.size()) +
                          " vs " + std::to_string(m.rows()) + " rows");
    BitMatrix aug = m.augmented(BitMatrix::from_cols({b}, m.rows()));
    RowReduceResult rr = row_reduce(aug);
    BitVec x(m.cols());
    for (std::size_t i = 0; i < rr.rank; ++i) {
        const std::size_t p = rr.pivot_cols[i];
        if (p == m.cols())
            return std::nullopt;  // pivot in the augmented column: inconsistent
        if (rr.reduced.get(i, m.cols()))
            x.set(p, true);
    }
    return x;
}

std::vector<BitVec> kernel_basis(const BitMatrix& m) {
    RowReduceResult rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : rr.pivot_cols)
        is_pivot[p] = true;
    std::vector<BitVec> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        BitVec v(m.cols());
        v.set(f, true);
        for (std::size_t i = 0; i < rr.rank; ++i)
            if (rr.reduced.get(i, f))
                v.set(rr.pivot_cols[i], true);
        out.push_back(std::move(v));
    }
    return out;
}

BitVec Span::residue(BitVec v) const {
    if (v.size() != ambient_)
        throw shape_error("Span::residue: length mismatch");
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (v.get(pivots_[i]))
            v ^= basis_[i];
    return v;
}

BitVec Span::coordinates(const BitVec& v) const {
    if (!contains(v))
        throw shape_error("Span::coordinates: vector not in span");
    BitVec c(basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (v.get(pivots_[i]))
            c.set(i, true);
    return c;
}

bool Span::insert(BitVec v) {
    v = residue(std::move(v));
    if (v.is_zero())
        return false;
    const std::size_t p = v.lowest_set();
    // keep existing rows reduced against the new one
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i].get(p))
            basis_[i] ^= v;
    const auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
    pivots_.insert(pivots_.begin() + pos, p);
    basis_.insert(basis_.begin() + pos, std::move(v));
    return true;
}

std::vector<BitVec> span_intersection(const Span& a, const Span& b) {
    if (a.ambient() != b.ambient())
        throw shape_error("span_intersection: ambient mismatch");
    // null vectors of [A | B] pair a combination in a with one in b
    std::vector<BitVec> cols = a.basis();
    cols.insert(cols.end(), b.basis().begin(), b.basis().end());
    if (cols.empty())
        return {};
    const BitMatrix m = BitMatrix::from_cols(cols, a.ambient());
    std::vector<BitVec> out;
    Span seen(a.ambient());
    for (const auto& null : kernel_basis(m)) {
        BitVec v(a.ambient());
        null.for_each_set([&](std::size_t j) {
            if (j < a.rank())
                v ^= a.basis()[j];
        });
        if (!v.is_zero() && seen.insert(v))
            out.push_back(std::move(v));
    }
    return out;
}

std::string GradedVectorSpace::label(int d, std::size_t i) const {
    auto it = labels.find({d, i});
    if (it != labels.end())
        return it->second;
    return "e" + std::to_string(i) + "@" + std::to_string(d);
}

void GradedVectorSpace::validate() const {
    for (const auto& [key, text] : labels) {
        const auto& [d, i] = key;
        if (d < 0 || d > top_degree() || i >= dim(d))
            throw validation_error("label '" + text + "' addresses missing basis element (degree " +
                                   std::to_string(d) + ", index " + std::to_string(i) + ")");
    }
}

BitMatrix GradedLinearMap::block_or_zero(int d) const {
    if (const BitMatrix* b = block(d))
        return *b;
    return BitMatrix(target.dim(d + shift), source.dim(d));
}

BitVec GradedLinearMap::apply(int d, const BitVec& x) const {
    if (x.size() != source.dim(d))
        throw shape_error("GradedLinearMap::apply: bad vector at degree " + std::to_string(d));
    if (const BitMatrix* b = block(d))
        return b->apply(x);
    return BitVec(target.dim(d + shift));
}

void GradedLinearMap::validate() const {
    for (int d = 0; d <= source.top_degree(); ++d) {
        const bool expected = source.dim(d) > 0 && d + shift >= 0 && d + shift <= target.top_degree();
        const BitMatrix* b = block(d);
        if (expected && !b)
            throw validation_error("missing block at degree " + std::to_string(d));
        if (b) {
            if (!expected)
                throw validation_error("unexpected block at degree " + std::to_string(d));
            if (b->rows() != target.dim(d + shift) || b->cols() != source.dim(d))
                throw validation_error("block shape mismatch at degree " + std::to_string(d));
        }
    }
    for (const auto& [d, b] : blocks)
        if (d < 0 || d > source.top_degree())
            throw validation_error("block outside source degrees: " + std::to_string(d));
}

Subquotient::Subquotient(std::size_t ambient_dim, const std::vector<BitVec>& generators,
                         const std::vector<BitVec>& relations)
    : ambient_(ambient_dim), gens_(ambient_dim), rels_(ambient_dim) {
    for (const auto& g : generators) {
        if (g.size() != ambient_)
            throw shape_error("subquotient: generator length mismatch");
        gens_.insert(g);
    }
    for (const auto& r : relations) {
        if (r.size() != ambient_)
            throw shape_error("subquotient: relation length mismatch");
        if (!gens_.contains(r))
            throw validation_error("subquotient relation outside the generator span");
        rels_.insert(r);
    }
    // complete the relation basis to a basis of the generator span;
    // the added generators are the chosen representatives
    Span scratch = rels_;
    for (const auto& g : gens_.basis())
        if (scratch.insert(g))
            reps_.push_back(g);
    // columns [relation basis | representatives]
    std::vector<BitVec> cols = rels_.basis();
    cols.insert(cols.end(), reps_.begin(), reps_.end());
    split_ = BitMatrix::from_cols(cols, ambient_);
}

BitVec Subquotient::project(const BitVec& ambient) const {
    if (ambient.size() != ambient_)
        throw shape_error("subquotient project: length mismatch");
    auto x = solve(split_, ambient);
    if (!x)
        throw shape_error("subquotient project: vector outside generator span");
    BitVec coords(reps_.size());
    for (std::size_t i = 0; i < reps_.size(); ++i)
        if (x->get(rels_.rank() + i))
            coords.set(i, true);
    return coords;
}

BitVec Subquotient::include(const BitVec& coords) const {
    if (coords.size() != reps_.size())
        throw shape_error("subquotient include: length mismatch");
    BitVec v(ambient_);
    coords.for_each_set([&](std::size_t i) { v ^= reps_[i]; });
    return v;
}

}  // namespace nilops::gf2
