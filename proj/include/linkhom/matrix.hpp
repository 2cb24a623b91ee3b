#ifndef LINKHOM_MATRIX_HPP
#define LINKHOM_MATRIX_HPP

/* Sparse exact integer matrices and Smith normal form.
 *
 * The homology engine only ever needs, per bidegree, the rank and the
 * invariant factors of small-but-sparse integer matrices, plus (for
 * induced maps and presented complexes) the change-of-basis transforms.
 * Pivoting prefers entries of minimal absolute value (almost always a
 * unit for these complexes) and sparse columns, which keeps coefficient
 * growth negligible in practice.
 */

#include "linkhom/ring.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace linkhom {

struct Triplet {
    int row, col;
    Int val;
};

class SparseMat {
  public:
    SparseMat(int rows = 0, int cols = 0) : rows_(rows), cols_(cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void add(int r, int c, const Int& v) {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) fail(Errc::internal, "matrix index out of range");
        if (v == 0) return;
        auto key = std::make_pair(c, r);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            entries_[key] = v;
        } else {
            it->second += v;
            if (it->second == 0) entries_.erase(it);
        }
    }

    Int get(int r, int c) const {
        auto it = entries_.find({c, r});
        return it == entries_.end() ? Int(0) : it->second;
    }

    size_t nnz() const { return entries_.size(); }

    /* Entries sorted by (col, row): the canonical export order. */
    std::vector<Triplet> triplets() const {
        std::vector<Triplet> out;
        out.reserve(entries_.size());
        for (const auto& [k, v] : entries_) out.push_back({k.second, k.first, v});
        return out;
    }

    bool operator==(const SparseMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

    std::vector<Int> apply(const std::vector<Int>& x) const {
        if ((int)x.size() != cols_) fail(Errc::internal, "apply: size mismatch");
        std::vector<Int> y(rows_, 0);
        for (const auto& [k, v] : entries_) y[k.second] += v * x[k.first];
        return y;
    }

    friend SparseMat operator*(const SparseMat& a, const SparseMat& b) {
        if (a.cols_ != b.rows_) fail(Errc::internal, "matrix product: size mismatch");
        SparseMat r(a.rows_, b.cols_);
        /* a indexed by (col,row) = (k, i); for each b entry (j, k). */
        for (const auto& [kb, vb] : b.entries_) {
            int j = kb.first, k = kb.second;
            auto lo = a.entries_.lower_bound({k, INT32_MIN});
            auto hi = a.entries_.upper_bound({k, INT32_MAX});
            for (auto it = lo; it != hi; ++it) r.add(it->first.second, j, it->second * vb);
        }
        return r;
    }

    friend SparseMat operator-(const SparseMat& a, const SparseMat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(Errc::internal, "matrix difference: size mismatch");
        SparseMat r = a;
        for (const auto& [k, v] : b.entries_) r.add(k.second, k.first, -v);
        return r;
    }

    bool is_zero() const { return entries_.empty(); }

    /* Horizontal concatenation [A | B]. */
    friend SparseMat hcat(const SparseMat& a, const SparseMat& b) {
        if (a.rows_ != b.rows_) fail(Errc::internal, "hcat: row mismatch");
        SparseMat r(a.rows_, a.cols_ + b.cols_);
        for (const auto& [k, v] : a.entries_) r.add(k.second, k.first, v);
        for (const auto& [k, v] : b.entries_) r.add(k.second, k.first + a.cols_, v);
        return r;
    }

  private:
    int rows_, cols_;
    std::map<std::pair<int, int>, Int> entries_; // (col,row) -> value
};

/* Dense matrix, used only for SNF transforms on small inputs. */
class DenseMat {
  public:
    DenseMat() = default;
    DenseMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, Int(0)) {}
    static DenseMat identity(int n) {
        DenseMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Int& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
    const Int& operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

    void row_add(int dst, int src, const Int& q) {
        for (int c = 0; c < cols_; ++c) (*this)(dst, c) += q * (*this)(src, c);
    }
    void col_add(int dst, int src, const Int& q) {
        for (int r = 0; r < rows_; ++r) (*this)(r, dst) += q * (*this)(r, src);
    }
    void row_swap(int r1, int r2) {
        for (int c = 0; c < cols_; ++c) std::swap((*this)(r1, c), (*this)(r2, c));
    }
    void col_swap(int c1, int c2) {
        for (int r = 0; r < rows_; ++r) std::swap((*this)(r, c1), (*this)(r, c2));
    }
    void row_negate(int r) {
        for (int c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
    }
    void col_negate(int c) {
        for (int r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
    }

    std::vector<Int> apply(const std::vector<Int>& x) const {
        if ((int)x.size() != cols_) fail(Errc::internal, "apply: size mismatch");
        std::vector<Int> y(rows_, 0);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                if (x[c] != 0) y[r] += (*this)(r, c) * x[c];
        return y;
    }

    friend DenseMat operator*(const DenseMat& a, const DenseMat& b) {
        if (a.cols_ != b.rows_) fail(Errc::internal, "dense product: size mismatch");
        DenseMat r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Int& v = a(i, k);
                if (v == 0) continue;
                for (int j = 0; j < b.cols_; ++j)
                    if (b(k, j) != 0) r(i, j) += v * b(k, j);
            }
        return r;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

/* D = U * A * V with U, V unimodular; diag is the invariant-factor chain
 * d_1 | d_2 | ... | d_rank, all positive. */
struct SmithDecomposition {
    int rows = 0, cols = 0;
    int rank = 0;
    std::vector<Int> diag;
    bool has_transforms = false;
    DenseMat U, Uinv, V, Vinv;

    std::vector<Int> torsion() const {
        std::vector<Int> t;
        for (const Int& d : diag)
            if (d > 1) t.push_back(d);
        return t;
    }
};

namespace detail {

class SmithWorker {
  public:
    SmithWorker(const SparseMat& a, bool transforms)
        : m_(a.rows()), n_(a.cols()), row_(a.rows()), colrows_(a.cols()), want_t_(transforms) {
        for (const auto& t : a.triplets()) {
            row_[t.row][t.col] = t.val;
            colrows_[t.col].insert(t.row);
        }
        if (want_t_) {
            U_ = DenseMat::identity(m_);
            Uinv_ = DenseMat::identity(m_);
            V_ = DenseMat::identity(n_);
            Vinv_ = DenseMat::identity(n_);
        }
    }

    SmithDecomposition run() {
        SmithDecomposition out;
        out.rows = m_;
        out.cols = n_;
        row_done_.assign(m_, false);
        col_done_.assign(n_, false);
        while (true) {
            auto piv = find_pivot();
            if (!piv) break;
            auto [r, c] = *piv;
            clean_pivot(r, c);
            enforce_divisibility(r, c);
            if (row_[r][c] < 0) row_negate(r);
            out.diag.push_back(row_[r].at(c));
            row_done_[r] = true;
            col_done_[c] = true;
            pivots_.push_back({r, c});
        }
        out.rank = (int)out.diag.size();
        if (want_t_) arrange_transforms(out);
        return out;
    }

  private:
    int m_, n_;
    std::vector<std::map<int, Int>> row_;
    std::vector<std::set<int>> colrows_;
    std::vector<bool> row_done_, col_done_;
    std::vector<std::pair<int, int>> pivots_;
    bool want_t_;
    DenseMat U_, Uinv_, V_, Vinv_;

    Int val(int r, int c) const {
        auto it = row_[r].find(c);
        return it == row_[r].end() ? Int(0) : it->second;
    }

    void set_val(int r, int c, const Int& v) {
        if (v == 0) {
            row_[r].erase(c);
            colrows_[c].erase(r);
        } else {
            row_[r][c] = v;
            colrows_[c].insert(r);
        }
    }

    void row_add(int dst, int src, const Int& q) { // row dst += q * row src
        if (q == 0) return;
        for (const auto& [c, v] : row_[src]) set_val(dst, c, val(dst, c) + q * v);
        if (want_t_) {
            U_.row_add(dst, src, q);
            Uinv_.col_add(src, dst, -q);
        }
    }

    void col_add(int dst, int src, const Int& q) { // col dst += q * col src
        if (q == 0) return;
        auto rows = colrows_[src]; // copy: set_val mutates
        for (int r : rows) set_val(r, dst, val(r, dst) + q * val(r, src));
        if (want_t_) {
            V_.col_add(dst, src, q);
            Vinv_.row_add(src, dst, -q);
        }
    }

    void row_negate(int r) {
        for (auto& [c, v] : row_[r]) v = -v;
        if (want_t_) {
            U_.row_negate(r);
            Uinv_.col_negate(r);
        }
    }

    /* Cheapest live column, then its smallest entry (by |value|, then by
     * row sparsity). */
    std::optional<std::pair<int, int>> find_pivot() const {
        int best_c = -1;
        size_t best_sz = SIZE_MAX;
        for (int c = 0; c < n_; ++c) {
            if (col_done_[c] || colrows_[c].empty()) continue;
            if (colrows_[c].size() < best_sz) {
                best_sz = colrows_[c].size();
                best_c = c;
            }
        }
        if (best_c < 0) return std::nullopt;
        int best_r = -1;
        Int best_abs;
        size_t best_rsz = SIZE_MAX;
        for (int r : colrows_[best_c]) {
            Int a = abs(val(r, best_c));
            if (best_r < 0 || a < best_abs || (a == best_abs && row_[r].size() < best_rsz)) {
                best_r = r;
                best_abs = a;
                best_rsz = row_[r].size();
            }
        }
        return std::make_pair(best_r, best_c);
    }

    /* Symmetric truncated-quotient reduction until row r and column c
     * hold nothing but the pivot.  The pivot value may shrink along the
     * way (Euclid); swaps keep it parked at (r, c).  Terminates because
     * every swap strictly decreases |pivot|. */
    void clean_pivot(int r, int c) {
        while (true) {
            while (colrows_[c].size() > 1) {
                int r2 = -1;
                for (int rr : colrows_[c])
                    if (rr != r) {
                        r2 = rr;
                        break;
                    }
                Int q = val(r2, c) / val(r, c); // truncated
                row_add(r2, r, -q);
                if (val(r2, c) != 0) swap_rows(r, r2); // remainder beats pivot
            }
            while (row_[r].size() > 1) {
                int c2 = -1;
                for (const auto& [cc, vv] : row_[r])
                    if (cc != c) {
                        c2 = cc;
                        break;
                    }
                Int q = val(r, c2) / val(r, c);
                col_add(c2, c, -q);
                if (val(r, c2) != 0) swap_cols(c, c2);
            }
            if (colrows_[c].size() <= 1 && row_[r].size() <= 1) return;
        }
    }

    void swap_rows(int r1, int r2) {
        if (r1 == r2) return;
        std::set<int> cols;
        for (const auto& [c, v] : row_[r1]) cols.insert(c);
        for (const auto& [c, v] : row_[r2]) cols.insert(c);
        std::swap(row_[r1], row_[r2]);
        for (int c : cols) {
            colrows_[c].erase(r1);
            colrows_[c].erase(r2);
            if (row_[r1].count(c)) colrows_[c].insert(r1);
            if (row_[r2].count(c)) colrows_[c].insert(r2);
        }
        if (want_t_) {
            U_.row_swap(r1, r2);
            Uinv_.col_swap(r1, r2);
        }
    }

    void swap_cols(int c1, int c2) {
        if (c1 == c2) return;
        std::set<int> all = colrows_[c1];
        for (int r : colrows_[c2]) all.insert(r);
        for (int r : all) {
            Int v1 = val(r, c1), v2 = val(r, c2);
            set_val(r, c1, v2);
            set_val(r, c2, v1);
        }
        if (want_t_) {
            V_.col_swap(c1, c2);
            Vinv_.row_swap(c1, c2);
        }
    }

    /* After (r,c) is isolated, make its value divide every remaining
     * entry: fold offending rows into r and re-clean. */
    void enforce_divisibility(int r, int c) {
        while (true) {
            Int p = row_[r].at(c);
            if (p == 1 || p == -1) return;
            int bad_row = -1;
            for (int rr = 0; rr < m_; ++rr) {
                if (row_done_[rr] || rr == r) continue;
                for (const auto& [cc, vv] : row_[rr]) {
                    if (col_done_[cc]) continue;
                    if (vv % p != 0) {
                        bad_row = rr;
                        break;
                    }
                }
                if (bad_row >= 0) break;
            }
            if (bad_row < 0) return;
            row_add(r, bad_row, 1);
            clean_pivot(r, c);
        }
    }

    /* Permute the pivots onto the leading diagonal so D really is
     * diag(d_1..d_r): row/col swaps into slot t for pivot t. */
    void arrange_transforms(SmithDecomposition& out) {
        for (int t = 0; t < (int)pivots_.size(); ++t) {
            auto [r, c] = pivots_[t];
            swap_rows(r, t);
            swap_cols(c, t);
            for (auto& pv : pivots_) {
                if (pv.first == t)
                    pv.first = r;
                else if (pv.first == r)
                    pv.first = t;
                if (pv.second == t)
                    pv.second = c;
                else if (pv.second == c)
                    pv.second = t;
            }
            pivots_[t] = {t, t};
        }
        /* Re-read the diagonal in order (values were recorded in pivot
         * discovery order, which the permutation preserved per slot). */
        out.diag.clear();
        for (int t = 0; t < (int)pivots_.size(); ++t) out.diag.push_back(row_[t].at(t));
        out.has_transforms = true;
        out.U = U_;
        out.Uinv = Uinv_;
        out.V = V_;
        out.Vinv = Vinv_;
    }
};

} // namespace detail

inline SmithDecomposition smith(const SparseMat& a, bool with_transforms = false) {
    detail::SmithWorker w(a, with_transforms);
    SmithDecomposition d = w.run();
    /* Invariant-factor chain sanity. */
    for (size_t i = 0; i + 1 < d.diag.size(); ++i)
        if (d.diag[i + 1] % d.diag[i] != 0) fail(Errc::internal, "smith: divisibility chain violated");
    return d;
}

/* Solve A x = b exactly; nullopt if no integer solution. */
inline std::optional<std::vector<Int>> solve(const SmithDecomposition& s, const std::vector<Int>& b) {
    if (!s.has_transforms) fail(Errc::internal, "solve needs transforms");
    std::vector<Int> u = s.U.apply(b);
    std::vector<Int> xp(s.cols, 0);
    for (int k = 0; k < (int)u.size(); ++k) {
        if (k < s.rank) {
            if (u[k] % s.diag[k] != 0) return std::nullopt;
            xp[k] = u[k] / s.diag[k];
        } else if (u[k] != 0) {
            return std::nullopt;
        }
    }
    return s.V.apply(xp);
}

/* Columns of V past the rank form a basis of ker A. */
inline std::vector<std::vector<Int>> kernel_basis(const SmithDecomposition& s) {
    if (!s.has_transforms) fail(Errc::internal, "kernel_basis needs transforms");
    std::vector<std::vector<Int>> out;
    for (int k = s.rank; k < s.cols; ++k) {
        std::vector<Int> v(s.cols);
        for (int r = 0; r < s.cols; ++r) v[r] = s.V(r, k);
        out.push_back(std::move(v));
    }
    return out;
}

/* Coordinates of a kernel vector in the kernel_basis above. */
inline std::vector<Int> kernel_coords(const SmithDecomposition& s, const std::vector<Int>& v) {
    if (!s.has_transforms) fail(Errc::internal, "kernel_coords needs transforms");
    std::vector<Int> w = s.Vinv.apply(v);
    for (int k = 0; k < s.rank; ++k)
        if (w[k] != 0) fail(Errc::internal, "kernel_coords: vector not in kernel");
    return std::vector<Int>(w.begin() + s.rank, w.end());
}

} // namespace linkhom

#endif
