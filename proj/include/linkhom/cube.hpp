#ifndef LINKHOM_CUBE_HPP
#define LINKHOM_CUBE_HPP

/* The resolution cube of a closed diagram and its assembly into a
 * bigraded chain complex.
 *
 * Gradings.  A state S (bitmask, bit a set = crossing a 1-smoothed) at
 * height h = popcount(S) contributes the tensor power A^{(x)circles}
 * shifted so that a monomial with X-set W and c-power p sits in
 *   i = h - x
 *   j = (#circles - 2|W| + 2p) + h - 2x + y
 * where x, y count negative/positive crossings.  The differential sums
 * the per-crossing saddle maps with sign (-1)^{#{b in S : b < a}}.
 *
 * Over Z[c] each (i,j) slice is still a finitely generated free abelian
 * group: the c-power of a basis vector is determined by its state and
 * X-set, so slicing by j expands the polynomial ring into integer
 * layers and multiplication by c becomes a degree-(0,2) chain map.
 */

#include "linkhom/algebra.hpp"
#include "linkhom/diagram.hpp"
#include "linkhom/matrix.hpp"

#include <bit>
#include <map>
#include <memory>
#include <vector>

namespace linkhom {

/* One cube edge, precompiled to circle positions: which tensor factors
 * the saddle consumes/produces and where the untouched factors go. */
struct EdgeMap {
    bool merge = false;
    int src_a = -1, src_b = -1; // factor positions in the source state
    int dst_a = -1, dst_b = -1; // factor positions in the target state
    std::vector<int8_t> carry;  // source factor position -> target position (-1 = consumed)
};

struct StateCube {
    Diagram diagram;
    Ring ring = Ring::Z;
    std::vector<Resolution> states;            // indexed by state mask
    std::vector<std::vector<EdgeMap>> edges;   // [state][crossing], valid when bit unset

    int n() const { return diagram.n(); }
};

inline StateCube build_cube(const Diagram& d, Ring ring) {
    if (!d.is_closed()) fail(Errc::domain, "build_cube needs a closed diagram");
    if (d.n() > 30) fail(Errc::domain, "diagram too large (max 30 crossings)");
    StateCube cube;
    cube.diagram = d;
    cube.ring = ring;
    const int n = d.n();
    const uint32_t total = 1u << n;
    cube.states.resize(total);
    for (uint32_t s = 0; s < total; ++s) cube.states[s] = d.resolve(s);

    cube.edges.resize(total);
    for (uint32_t s = 0; s < total; ++s) {
        cube.edges[s].resize(n);
        for (int a = 0; a < n; ++a) {
            if (s >> a & 1) continue;
            EdgeEvent ev = d.edge_event(s, a);
            const Resolution& src = cube.states[s];
            const Resolution& dst = cube.states[s | (1u << a)];
            EdgeMap em;
            em.merge = ev.merge;
            em.carry.assign(src.count(), -1);
            if (ev.merge) {
                em.src_a = src.index_of(ev.src1);
                em.src_b = src.index_of(ev.src2);
                em.dst_a = em.dst_b = dst.index_of(ev.dst1);
            } else {
                em.src_a = em.src_b = src.index_of(ev.src1);
                em.dst_a = dst.index_of(ev.dst1);
                em.dst_b = dst.index_of(ev.dst2);
            }
            for (int q = 0; q < src.count(); ++q) {
                long id = src.circles[q];
                if (ev.merge ? (id == ev.src1 || id == ev.src2) : (id == ev.src1)) continue;
                em.carry[q] = (int8_t)dst.index_of(id);
            }
            cube.edges[s][a] = std::move(em);
        }
    }
    return cube;
}

/* The standard sign assignment: edge (S, a) carries
 * (-1)^{#{b in S : b < a}}.  Opposite edges of every square then
 * anticommute. */
struct SignAssignment {
    int n = 0;
    int sign(uint32_t state, int a) const {
        return std::popcount(state & ((1u << a) - 1)) % 2 ? -1 : +1;
    }
    bool squares_anticommute() const {
        for (uint32_t s = 0; s < (1u << n); ++s)
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    if ((s >> a & 1) || (s >> b & 1)) continue;
                    int path1 = sign(s, a) * sign(s | (1u << a), b);
                    int path2 = sign(s, b) * sign(s | (1u << b), a);
                    if (path1 != -path2) return false;
                }
        return true;
    }
};

inline SignAssignment sign_assignment(int n) { return SignAssignment{n}; }

/* A basis vector of one (i,j) slice. */
struct ChainKey {
    uint32_t state;
    uint32_t xmask;
    int p;
    bool operator==(const ChainKey& o) const = default;
};

/* Reverse the low `width` bits: the basis sort key that realizes
 * lexicographic word order with factor 0 most significant and 1 < X. */
inline uint32_t bit_reverse(uint32_t v, int width) {
    uint32_t r = 0;
    for (int k = 0; k < width; ++k)
        if (v >> k & 1) r |= 1u << (width - 1 - k);
    return r;
}

class BigradedComplex {
  public:
    BigradedComplex() = default;
    BigradedComplex(std::shared_ptr<const StateCube> cube, SignAssignment sgn, int x, int y)
        : cube_(std::move(cube)), sign_(sgn), x_(x), y_(y) {
        const auto& st = cube_->states;
        jmin_ = INT32_MAX;
        jmax_z_ = INT32_MIN;
        for (uint32_t s = 0; s < st.size(); ++s) {
            int h = std::popcount(s);
            int shift = h - 2 * x_ + y_;
            jmin_ = std::min(jmin_, -st[s].count() + shift);
            jmax_z_ = std::max(jmax_z_, st[s].count() + shift);
        }
    }

    Ring ring() const { return cube_->ring; }
    const StateCube& cube() const { return *cube_; }
    int x() const { return x_; }
    int y() const { return y_; }
    int i_min() const { return -x_; }
    int i_max() const { return cube_->n() - x_; }

    /* j of the lowest-degree chain vector; over Z also the top. */
    int j_min() const { return jmin_; }
    int j_max_z() const { return jmax_z_; }

    /* Build the basis cache for every j in [jlo, jhi]; must be called
     * before basis()/differential(), after which those are read-only
     * and safe to use from several threads. */
    void prepare(int jlo, int jhi) {
        if (prepared_ && jlo >= jlo_ && jhi <= jhi_) return;
        basis_.clear();
        jlo_ = jlo;
        jhi_ = jhi;
        const auto& st = cube_->states;
        for (uint32_t s = 0; s < st.size(); ++s) {
            int h = std::popcount(s);
            int i = h - x_;
            int circ = st[s].count();
            int shift = h - 2 * x_ + y_;
            for (uint32_t rev = 0; rev < (1u << circ); ++rev) {
                uint32_t w = bit_reverse(rev, circ);
                int base = circ - 2 * std::popcount(w) + shift; // j at p = 0
                if (cube_->ring == Ring::Z) {
                    if (base >= jlo && base <= jhi) basis_[{i, base}].push_back({s, w, 0});
                } else {
                    for (int j = base; j <= jhi; j += 2)
                        if (j >= jlo) basis_[{i, j}].push_back({s, w, (j - base) / 2});
                }
            }
        }
        prepared_ = true;
    }

    bool prepared_for(int j) const { return prepared_ && j >= jlo_ && j <= jhi_; }

    const std::vector<ChainKey>& basis(int i, int j) const {
        if (!prepared_for(j)) fail(Errc::internal, "complex not prepared for this window");
        auto it = basis_.find({i, j});
        static const std::vector<ChainKey> empty;
        return it == basis_.end() ? empty : it->second;
    }

    int dim(int i, int j) const { return (int)basis(i, j).size(); }

    int index_of(int i, int j, const ChainKey& k) const {
        const auto& b = basis(i, j);
        for (int q = 0; q < (int)b.size(); ++q)
            if (b[q] == k) return q;
        fail(Errc::internal, "chain key not found in basis");
    }

    /* The differential block C^{i,j} -> C^{i+1,j}. */
    SparseMat differential(int i, int j) const {
        const auto& src = basis(i, j);
        const auto& dst = basis(i + 1, j);
        SparseMat mat((int)dst.size(), (int)src.size());
        if (src.empty() || dst.empty()) return mat;

        std::map<std::pair<uint32_t, uint32_t>, int> row;
        for (int r = 0; r < (int)dst.size(); ++r) row[{dst[r].state, dst[r].xmask}] = r;

        const int n = cube_->n();
        for (int col = 0; col < (int)src.size(); ++col) {
            const ChainKey& k = src[col];
            for (int a = 0; a < n; ++a) {
                if (k.state >> a & 1) continue;
                int eps = sign_.sign(k.state, a);
                const EdgeMap& em = cube_->edges[k.state][a];
                uint32_t base = 0;
                for (int q = 0; q < (int)em.carry.size(); ++q)
                    if (em.carry[q] >= 0 && mask_bit(k.xmask, q)) base |= 1u << em.carry[q];
                uint32_t tstate = k.state | (1u << a);
                if (em.merge) {
                    auto v = mult_value(mask_bit(k.xmask, em.src_a), mask_bit(k.xmask, em.src_b));
                    if (!v) continue;
                    uint32_t w = mask_set(base, em.dst_a, *v);
                    auto it = row.find({tstate, w});
                    if (it == row.end()) fail(Errc::internal, "differential target missing from basis");
                    mat.add(it->second, col, eps);
                } else {
                    for (const auto& t : comult_value(mask_bit(k.xmask, em.src_a), cube_->ring)) {
                        uint32_t w = mask_set(mask_set(base, em.dst_a, t.x1), em.dst_b, t.x2);
                        auto it = row.find({tstate, w});
                        if (it == row.end()) fail(Errc::internal, "differential target missing from basis");
                        mat.add(it->second, col, eps * t.coef);
                    }
                }
            }
        }
        return mat;
    }

    /* Multiplication by c as a chain map C^{i,j} -> C^{i,j+2}. */
    SparseMat c_map(int i, int j) const {
        if (cube_->ring != Ring::ZC) fail(Errc::domain, "c_map needs the Z[c] theory");
        const auto& src = basis(i, j);
        const auto& dst = basis(i, j + 2);
        SparseMat mat((int)dst.size(), (int)src.size());
        std::map<std::pair<uint32_t, uint32_t>, int> row;
        for (int r = 0; r < (int)dst.size(); ++r) row[{dst[r].state, dst[r].xmask}] = r;
        for (int col = 0; col < (int)src.size(); ++col) {
            auto it = row.find({src[col].state, src[col].xmask});
            if (it == row.end()) fail(Errc::internal, "c_map target missing from basis");
            mat.add(it->second, col, 1);
        }
        return mat;
    }

  private:
    std::shared_ptr<const StateCube> cube_;
    SignAssignment sign_;
    int x_ = 0, y_ = 0;
    int jmin_ = 0, jmax_z_ = 0;
    bool prepared_ = false;
    int jlo_ = 0, jhi_ = 0;
    std::map<std::pair<int, int>, std::vector<ChainKey>> basis_;
};

/* Assemble the cube into the shifted complex C = C_bar[x]{2x-y}; pass
 * x = y = 0 for the unnormalized complex of the bare cube. */
inline BigradedComplex assemble_complex(std::shared_ptr<const StateCube> cube, SignAssignment sgn, int x, int y) {
    return BigradedComplex(std::move(cube), sgn, x, y);
}

inline BigradedComplex assemble_complex(const Diagram& d, Ring ring) {
    auto cube = std::make_shared<StateCube>(build_cube(d, ring));
    return BigradedComplex(cube, sign_assignment(d.n()), d.x(), d.y());
}

/* --- twist-chain reduction --------------------------------------------- */

/* For a diagram that is one closed all-negative twist chain (the
 * standard (2,k) torus-link shape), the cube collapses to k+1 columns:
 *   col m < k:  A{k-1-2m}, col k: A(x)A{-k}, all inside C_bar[k]{2k};
 * the differentials alternate 0 and 2X, ending in the comultiplication.
 * This trades 2^k states for k+1 columns. */
class TwistReducedComplex {
  public:
    TwistReducedComplex(Ring ring, int k) : ring_(ring), k_(k) {
        if (k < 2) fail(Errc::domain, "twist chain needs at least 2 crossings");
    }

    Ring ring() const { return ring_; }
    int k() const { return k_; }
    int i_min() const { return -k_; }
    int i_max() const { return 0; }
    int j_min() const { return -3 * k_; } // the X generator of column 0
    int j_max_z() const { return 2 - k_; }

    void prepare(int jlo, int jhi) {
        jlo_ = jlo;
        jhi_ = jhi;
        prepared_ = true;
    }
    bool prepared_for(int j) const { return prepared_ && j >= jlo_ && j <= jhi_; }

    /* Keys: xmask over the column's factors plus c-power. */
    std::vector<ChainKey> basis(int i, int j) const {
        if (!prepared_for(j)) fail(Errc::internal, "complex not prepared for this window");
        std::vector<ChainKey> out;
        if (i < -k_ || i > 0) return out;
        int m = i + k_;
        int factors = (m == k_) ? 2 : 1;
        int shift = (m == k_) ? -k_ : (k_ - 1 - 2 * m);
        for (uint32_t rev = 0; rev < (1u << factors); ++rev) {
            uint32_t w = bit_reverse(rev, factors);
            int base = factors - 2 * std::popcount(w) - shift - 2 * k_; // j at p = 0
            if (ring_ == Ring::Z) {
                if (base == j) out.push_back({(uint32_t)m, w, 0});
            } else if (j >= base && (j - base) % 2 == 0) {
                out.push_back({(uint32_t)m, w, (j - base) / 2});
            }
        }
        return out;
    }

    int dim(int i, int j) const { return (int)basis(i, j).size(); }

    SparseMat differential(int i, int j) const {
        auto src = basis(i, j);
        auto dst = basis(i + 1, j);
        SparseMat mat((int)dst.size(), (int)src.size());
        if (src.empty() || dst.empty()) return mat;
        int m = i + k_;
        auto row_of = [&](uint32_t w, int p) -> int {
            for (int r = 0; r < (int)dst.size(); ++r)
                if (dst[r].xmask == w && dst[r].p == p) return r;
            return -1;
        };
        for (int col = 0; col < (int)src.size(); ++col) {
            const ChainKey& k = src[col];
            if (m <= k_ - 2) {
                /* 0 or 2X alternating: nonzero iff k - m is odd. */
                if ((k_ - m) % 2 == 0) continue;
                if (mask_bit(k.xmask, 0)) continue; // X * X = 0
                int r = row_of(1u, k.p);
                if (r < 0) fail(Errc::internal, "twist complex: target key missing");
                mat.add(r, col, 2);
            } else {
                /* saddle into A(x)A: the comultiplication. */
                for (const auto& t : comult_value(mask_bit(k.xmask, 0), ring_)) {
                    uint32_t w = (t.x1 ? 1u : 0u) | (t.x2 ? 2u : 0u);
                    int r = row_of(w, k.p + t.dp);
                    if (r < 0) fail(Errc::internal, "twist complex: target key missing");
                    mat.add(r, col, t.coef);
                }
            }
        }
        return mat;
    }

  private:
    Ring ring_;
    int k_;
    bool prepared_ = false;
    int jlo_ = 0, jhi_ = 0;
};

/* Validate that `chain` lists all crossings of a closed negative twist
 * chain in cyclic order and return the reduced complex. */
inline TwistReducedComplex twist_chain_reduce(const Diagram& d, const std::vector<int>& chain, Ring ring) {
    const int k = (int)chain.size();
    if (k != d.n()) fail(Errc::domain, "twist_chain_reduce: chain must cover every crossing");
    if (k < 2) fail(Errc::domain, "twist_chain_reduce: need at least 2 crossings");
    std::vector<bool> seen(d.n(), false);
    for (int c : chain) {
        if (c < 0 || c >= d.n() || seen[c]) fail(Errc::domain, "twist_chain_reduce: bad chain index");
        seen[c] = true;
    }
    for (int c : chain)
        if (d.crossings()[c].sign() != -1)
            fail(Errc::domain, "twist_chain_reduce: chain crossings must all be negative");
    /* consecutive crossings (cyclically) share exactly two arcs */
    for (int t = 0; t < k; ++t) {
        const auto& c1 = d.crossings()[chain[t]].port;
        const auto& c2 = d.crossings()[chain[(t + 1) % k]].port;
        int shared = 0;
        for (int a : c1)
            for (int b : c2)
                if (a == b) ++shared;
        if (shared < 2) fail(Errc::domain, "twist_chain_reduce: consecutive chain crossings must share two arcs");
    }
    if (d.x() != k || d.y() != 0) fail(Errc::domain, "twist_chain_reduce: diagram is not an all-negative chain");
    return TwistReducedComplex(ring, k);
}

} // namespace linkhom

#endif
