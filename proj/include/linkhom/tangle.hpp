#ifndef LINKHOM_TANGLE_HPP
#define LINKHOM_TANGLE_HPP

/* Invariants of 1-string tangles (diagrams with one open strand) with
 * coefficients in a graded module M over the base ring Z[c].
 *
 * M carries an action of X with deg X = -2, X.X = 0, and deg c = +2.
 * Each smoothing state of the tangle resolves into the open strand plus
 * closed circles, contributing the module factor M tensored with one
 * algebra factor per circle.  A circle merging into the strand acts by
 * 1.t -> t, X.t -> Xt; a circle splitting off the strand acts by
 * t -> X (x) t + 1 (x) Xt + cX (x) Xt.  The complex is graded like the
 * link case, with the module element's degree added to the circle word
 * degree, and the global shift [x]{2x - y}.
 *
 * Since every degree slice of the module is finitely generated and
 * presented, homology is computed per bidegree from the presentation:
 * cycles are chains whose differential lands in the relation span, and
 * they are reduced modulo boundaries and relations.
 */

#include "linkhom/cube.hpp"
#include "linkhom/diagram.hpp"
#include "linkhom/homology.hpp"
#include "linkhom/matrix.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace linkhom {

/* --- graded modules ------------------------------------------------------ */

struct GradedModule {
    std::vector<int> deg;                // degree of each generator
    std::vector<std::vector<Int>> xmat;  // X g_k = sum_j xmat[j][k] c^{e_jk} g_j
    struct Rel {
        int deg;
        std::vector<Int> coeffs; // sum_k coeffs[k] c^{(deg - deg_k)/2} g_k
    };
    std::vector<Rel> rels;

    int gens() const { return (int)deg.size(); }

    /* c-power forced by homogeneity for an X-action entry, or -1 if the
     * entry must vanish. */
    int xpow(int j, int k) const {
        int e = deg[k] - 2 - deg[j];
        return e >= 0 && e % 2 == 0 ? e / 2 : -1;
    }

    void validate() const {
        if (xmat.size() != deg.size()) fail(Errc::parse, "module: X matrix must be square (gens x gens)");
        for (int j = 0; j < gens(); ++j) {
            if ((int)xmat[j].size() != gens()) fail(Errc::parse, "module: X matrix must be square (gens x gens)");
            for (int k = 0; k < gens(); ++k)
                if (xmat[j][k] != 0 && xpow(j, k) < 0)
                    fail(Errc::parse, "module: X entry (" + std::to_string(j) + "," + std::to_string(k) +
                                          ") is not homogeneous of degree -2");
        }
        /* X.X = 0, required of any module over the circle algebra.  The
         * c-powers of a product are forced by the degrees, so the check
         * is a plain integer matrix square. */
        for (int j = 0; j < gens(); ++j)
            for (int k = 0; k < gens(); ++k) {
                Int s = 0;
                for (int l = 0; l < gens(); ++l)
                    if (xmat[j][l] != 0 && xmat[l][k] != 0) s += xmat[j][l] * xmat[l][k];
                if (s != 0) fail(Errc::parse, "module: X squared is not zero");
            }
        for (const auto& r : rels) {
            if ((int)r.coeffs.size() != gens()) fail(Errc::parse, "module: relation length must equal gens");
            for (int k = 0; k < gens(); ++k) {
                int f = r.deg - deg[k];
                if (r.coeffs[k] != 0 && (f < 0 || f % 2 != 0))
                    fail(Errc::parse, "module: relation is not homogeneous of its declared degree");
            }
        }
    }

    static GradedModule from_json(const nlohmann::json& j) {
        GradedModule m;
        if (!j.is_object() || !j.contains("gens")) fail(Errc::parse, "module: missing \"gens\"");
        for (const auto& g : j.at("gens")) {
            if (!g.contains("deg")) fail(Errc::parse, "module: each generator needs a \"deg\"");
            m.deg.push_back(g.at("deg").get<int>());
        }
        if (m.deg.empty()) fail(Errc::parse, "module: needs at least one generator");
        if (!j.contains("X")) fail(Errc::parse, "module: missing \"X\"");
        for (const auto& row : j.at("X")) {
            std::vector<Int> r;
            for (const auto& v : row) r.push_back(Int(v.get<long>()));
            m.xmat.push_back(std::move(r));
        }
        if (j.contains("relations"))
            for (const auto& rj : j.at("relations")) {
                Rel r;
                r.deg = rj.at("deg").get<int>();
                for (const auto& v : rj.at("coeffs")) r.coeffs.push_back(Int(v.get<long>()));
                m.rels.push_back(std::move(r));
            }
        m.validate();
        return m;
    }

    /* The free module on 1 (deg +1) and X (deg -1): the circle algebra
     * as a module over itself. */
    static GradedModule circle_algebra() {
        GradedModule m;
        m.deg = {1, -1};
        m.xmat = {{Int(0), Int(0)}, {Int(1), Int(0)}};
        return m;
    }
};

/* One degree slice of a module's c-tower expansion. */
struct ModuleSlice {
    std::vector<std::pair<int, int>> gens; // (generator, c power)
    int index_of(int k, int p) const {
        for (int t = 0; t < (int)gens.size(); ++t)
            if (gens[t] == std::make_pair(k, p)) return t;
        fail(Errc::internal, "module slice element missing");
    }
};

inline ModuleSlice module_slice(const GradedModule& m, int d) {
    ModuleSlice s;
    for (int k = 0; k < m.gens(); ++k) {
        int p2 = d - m.deg[k];
        if (p2 >= 0 && p2 % 2 == 0) s.gens.push_back({k, p2 / 2});
    }
    return s;
}

/* Relations of M in degree d, as columns over the slice basis. */
inline SparseMat module_rel_matrix(const GradedModule& m, int d) {
    ModuleSlice s = module_slice(m, d);
    std::vector<std::vector<std::pair<int, Int>>> cols;
    for (const auto& r : m.rels) {
        int pr2 = d - r.deg;
        if (pr2 < 0 || pr2 % 2 != 0) continue;
        std::vector<std::pair<int, Int>> col;
        for (int k = 0; k < m.gens(); ++k) {
            if (r.coeffs[k] == 0) continue;
            int p = pr2 / 2 + (r.deg - m.deg[k]) / 2;
            col.push_back({s.index_of(k, p), r.coeffs[k]});
        }
        cols.push_back(std::move(col));
    }
    SparseMat out((int)s.gens.size(), (int)cols.size());
    for (int c = 0; c < (int)cols.size(); ++c)
        for (const auto& [row, v] : cols[c]) out.add(row, c, v);
    return out;
}

/* The X action (times an integer scale) from degree d to degree d-2. */
inline SparseMat module_x_matrix(const GradedModule& m, int d, const Int& scale = 1) {
    ModuleSlice from = module_slice(m, d);
    ModuleSlice to = module_slice(m, d - 2);
    SparseMat out((int)to.gens.size(), (int)from.gens.size());
    for (int c = 0; c < (int)from.gens.size(); ++c) {
        auto [k, p] = from.gens[c];
        for (int j = 0; j < m.gens(); ++j) {
            if (m.xmat[j][k] == 0) continue;
            int e = m.xpow(j, k);
            out.add(to.index_of(j, p + e), c, scale * m.xmat[j][k]);
        }
    }
    return out;
}

/* The degree-d part of M, of M / 2XM, and of ker(2X), as abelian
 * groups.  These give module-level answers to compare with the tangle
 * complex, not a shortcut used by it. */
inline AbGroup module_group_at(const GradedModule& m, int d) {
    return presented_group(module_rel_matrix(m, d), (int)module_slice(m, d).gens.size());
}

inline AbGroup module_mod_2x_at(const GradedModule& m, int d) {
    SparseMat img = module_x_matrix(m, d + 2, 2);
    return presented_group(hcat(module_rel_matrix(m, d), img), (int)module_slice(m, d).gens.size());
}

inline AbGroup module_ker_2x_at(const GradedModule& m, int d) {
    SparseMat two_x = module_x_matrix(m, d, 2);
    SparseMat cyc = preimage_lattice(two_x, module_rel_matrix(m, d - 2));
    return subgroup_mod(cyc, module_rel_matrix(m, d));
}

/* --- the tangle complex --------------------------------------------------- */

class TangleComplex {
  public:
    struct Key {
        uint32_t state;
        uint32_t xmask; // over the closed circles of the state
        int gen;        // module generator
        int p;          // c power of the whole tensor
    };

    TangleComplex(const Diagram& d, GradedModule m) : d_(d), mod_(std::move(m)) {
        if (d_.open_arcs().size() != 2)
            fail(Errc::domain, "tangle complexes need exactly one open strand (two open arc labels)");
        if (d_.n() > 30) fail(Errc::domain, "diagram too large (max 30 crossings)");
        const int n = d_.n();
        const uint32_t total = 1u << n;
        res_.resize(total);
        strand_.resize(total);
        closed_.resize(total);
        int open1 = d_.open_arcs()[0], open2 = d_.open_arcs()[1];
        for (uint32_t s = 0; s < total; ++s) {
            res_[s] = d_.resolve(s);
            strand_[s] = res_[s].circle_of_arc(open1);
            if (res_[s].circle_of_arc(open2) != strand_[s])
                fail(Errc::internal, "open endpoints land on different strands (is the diagram planar?)");
            for (long id : res_[s].circles)
                if (id != strand_[s]) closed_[s].push_back(id);
        }
        edges_.resize(total);
        for (uint32_t s = 0; s < total; ++s) {
            edges_[s].resize(n);
            for (int a = 0; a < n; ++a) {
                if (s >> a & 1) continue;
                edges_[s][a] = make_edge(s, a);
            }
        }
        jmin_ = INT32_MAX;
        int mindeg = *std::min_element(mod_.deg.begin(), mod_.deg.end());
        for (uint32_t s = 0; s < total; ++s) {
            int h = std::popcount(s);
            jmin_ = std::min(jmin_, -(int)closed_[s].size() + mindeg + h - 2 * d_.x() + d_.y());
        }
    }

    const Diagram& diagram() const { return d_; }
    const GradedModule& module() const { return mod_; }
    int i_min() const { return -d_.x(); }
    int i_max() const { return d_.n() - d_.x(); }
    int j_min() const { return jmin_; }

    void prepare(int jlo, int jhi) {
        if (prepared_ && jlo >= jlo_ && jhi <= jhi_) return;
        basis_.clear();
        rels_.clear();
        jlo_ = jlo;
        jhi_ = jhi;
        const uint32_t total = 1u << d_.n();
        for (uint32_t s = 0; s < total; ++s) {
            int h = std::popcount(s);
            int i = h - d_.x();
            int circ = (int)closed_[s].size();
            int shift = h - 2 * d_.x() + d_.y();
            for (uint32_t rev = 0; rev < (1u << circ); ++rev) {
                uint32_t w = bit_reverse(rev, circ);
                int wordpart = circ - 2 * std::popcount(w) + shift;
                for (int k = 0; k < mod_.gens(); ++k) {
                    int base = wordpart + mod_.deg[k];
                    for (int j = base; j <= jhi; j += 2)
                        if (j >= jlo) basis_[{i, j}].push_back({s, w, k, (j - base) / 2});
                }
                for (int r = 0; r < (int)mod_.rels.size(); ++r) {
                    int base = wordpart + mod_.rels[r].deg;
                    for (int j = base; j <= jhi; j += 2)
                        if (j >= jlo) rels_[{i, j}].push_back({s, w, r, (j - base) / 2});
                }
            }
        }
        verify_x_preserves_relations();
        prepared_ = true;
    }

    const std::vector<Key>& basis(int i, int j) const {
        if (!(prepared_ && j >= jlo_ && j <= jhi_)) fail(Errc::internal, "tangle complex not prepared here");
        auto it = basis_.find({i, j});
        static const std::vector<Key> empty;
        return it == basis_.end() ? empty : it->second;
    }

    int dim(int i, int j) const { return (int)basis(i, j).size(); }

    /* Relation columns of the (i,j) slice, over the basis there. */
    SparseMat rel_matrix(int i, int j) const {
        const auto& b = basis(i, j);
        auto rows = row_lookup(b);
        auto it = rels_.find({i, j});
        int ncols = it == rels_.end() ? 0 : (int)it->second.size();
        SparseMat out((int)b.size(), ncols);
        if (!ncols) return out;
        for (int c = 0; c < ncols; ++c) {
            const RelKey& rk = it->second[c];
            const auto& rel = mod_.rels[rk.rel];
            for (int k = 0; k < mod_.gens(); ++k) {
                if (rel.coeffs[k] == 0) continue;
                int p = rk.p + (rel.deg - mod_.deg[k]) / 2;
                out.add(find_row(rows, rk.state, rk.xmask, k, p), c, rel.coeffs[k]);
            }
        }
        return out;
    }

    SparseMat differential(int i, int j) const {
        const auto& from = basis(i, j);
        const auto& to = basis(i + 1, j);
        SparseMat out((int)to.size(), (int)from.size());
        if (from.empty() || to.empty()) return out;
        auto rows = row_lookup(to);
        SignAssignment sgn{d_.n()};
        for (int col = 0; col < (int)from.size(); ++col) {
            const Key& k = from[col];
            for (int a = 0; a < d_.n(); ++a) {
                if (k.state >> a & 1) continue;
                Int sign = sgn.sign(k.state, a);
                uint32_t ts = k.state | (1u << a);
                const TEdge& e = edges_[k.state][a];
                uint32_t base = 0;
                for (int q = 0; q < (int)e.carry.size(); ++q)
                    if (e.carry[q] >= 0 && mask_bit(k.xmask, q)) base |= 1u << e.carry[q];
                switch (e.kind) {
                case TEdge::circles_merge: {
                    auto v = mult_value(mask_bit(k.xmask, e.src_a), mask_bit(k.xmask, e.src_b));
                    if (!v) break;
                    out.add(find_row(rows, ts, mask_set(base, e.dst_a, *v), k.gen, k.p), col, sign);
                    break;
                }
                case TEdge::circle_split: {
                    for (const auto& t : comult_value(mask_bit(k.xmask, e.src_a), Ring::ZC))
                        out.add(find_row(rows, ts, mask_set(mask_set(base, e.dst_a, t.x1), e.dst_b, t.x2),
                                         k.gen, k.p + t.dp),
                                col, sign * t.coef);
                    break;
                }
                case TEdge::circle_into_strand: {
                    if (!mask_bit(k.xmask, e.src_a)) {
                        out.add(find_row(rows, ts, base, k.gen, k.p), col, sign);
                    } else {
                        for (int g = 0; g < mod_.gens(); ++g) {
                            if (mod_.xmat[g][k.gen] == 0) continue;
                            int e2 = mod_.xpow(g, k.gen);
                            out.add(find_row(rows, ts, base, g, k.p + e2), col, sign * mod_.xmat[g][k.gen]);
                        }
                    }
                    break;
                }
                case TEdge::strand_split: {
                    /* t -> X (x) t + 1 (x) Xt + cX (x) Xt */
                    out.add(find_row(rows, ts, mask_set(base, e.dst_a, true), k.gen, k.p), col, sign);
                    for (int g = 0; g < mod_.gens(); ++g) {
                        if (mod_.xmat[g][k.gen] == 0) continue;
                        int e2 = mod_.xpow(g, k.gen);
                        Int cf = sign * mod_.xmat[g][k.gen];
                        out.add(find_row(rows, ts, mask_set(base, e.dst_a, false), g, k.p + e2), col, cf);
                        out.add(find_row(rows, ts, mask_set(base, e.dst_a, true), g, k.p + e2 + 1), col, cf);
                    }
                    break;
                }
                }
            }
        }
        return out;
    }

    /* Homology of the presented complex at one bidegree. */
    AbGroup homology_at(int i, int j) const {
        SparseMat cycles = preimage_lattice(differential(i, j), rel_matrix(i + 1, j));
        return subgroup_mod(cycles, hcat(differential(i - 1, j), rel_matrix(i, j)));
    }

  private:
    struct TEdge {
        enum Kind { circles_merge, circle_split, circle_into_strand, strand_split } kind = circles_merge;
        int src_a = -1, src_b = -1; // closed-circle positions in the source state
        int dst_a = -1, dst_b = -1; // closed-circle positions in the target state
        std::vector<int8_t> carry;  // source closed position -> target position (-1 = consumed)
    };
    struct RelKey {
        uint32_t state;
        uint32_t xmask;
        int rel;
        int p;
    };

    int closed_pos(uint32_t s, long id) const {
        const auto& v = closed_[s];
        auto it = std::lower_bound(v.begin(), v.end(), id);
        if (it == v.end() || *it != id) fail(Errc::internal, "circle id not among closed circles");
        return (int)(it - v.begin());
    }

    TEdge make_edge(uint32_t s, int a) const {
        EdgeEvent ev = d_.edge_event(s, a);
        uint32_t t = s | (1u << a);
        TEdge e;
        long consumed1 = -1, consumed2 = -1;
        if (ev.merge) {
            bool strand = ev.src1 == strand_[s] || ev.src2 == strand_[s];
            if (strand) {
                e.kind = TEdge::circle_into_strand;
                long circle = ev.src1 == strand_[s] ? ev.src2 : ev.src1;
                e.src_a = closed_pos(s, circle);
                consumed1 = circle;
                consumed2 = strand_[s];
            } else {
                e.kind = TEdge::circles_merge;
                e.src_a = closed_pos(s, ev.src1);
                e.src_b = closed_pos(s, ev.src2);
                e.dst_a = closed_pos(t, ev.dst1);
                consumed1 = ev.src1;
                consumed2 = ev.src2;
            }
        } else {
            if (ev.src1 == strand_[s]) {
                e.kind = TEdge::strand_split;
                long circle = ev.dst1 == strand_[t] ? ev.dst2 : ev.dst1;
                e.dst_a = closed_pos(t, circle);
                consumed1 = strand_[s];
            } else {
                e.kind = TEdge::circle_split;
                e.src_a = closed_pos(s, ev.src1);
                e.dst_a = closed_pos(t, ev.dst1);
                e.dst_b = closed_pos(t, ev.dst2);
                consumed1 = ev.src1;
            }
        }
        e.carry.assign(closed_[s].size(), -1);
        for (int q = 0; q < (int)closed_[s].size(); ++q) {
            long id = closed_[s][q];
            if (id == consumed1 || id == consumed2) continue;
            e.carry[q] = (int8_t)closed_pos(t, id);
        }
        return e;
    }

    using RowMap = std::map<std::tuple<uint32_t, uint32_t, int>, std::pair<int, int>>;
    static RowMap row_lookup(const std::vector<Key>& b) {
        RowMap rows;
        for (int r = 0; r < (int)b.size(); ++r) rows[{b[r].state, b[r].xmask, b[r].gen}] = {r, b[r].p};
        return rows;
    }
    static int find_row(const RowMap& rows, uint32_t s, uint32_t w, int gen, int p) {
        auto it = rows.find({s, w, gen});
        if (it == rows.end()) fail(Errc::internal, "tangle differential target missing from basis");
        if (it->second.second != p) fail(Errc::internal, "tangle differential lands in the wrong c-layer");
        return it->second.first;
    }

    /* For the quotient by relations to be a complex of modules, X must
     * map each degree's relation span into the one two lower.  Checked
     * over every module degree the prepared window can touch. */
    void verify_x_preserves_relations() const {
        if (mod_.rels.empty()) return;
        int mindeg = *std::min_element(mod_.deg.begin(), mod_.deg.end());
        for (int dd = mindeg; dd <= jhi_ - (jmin_ - mindeg) + 2; ++dd) {
            SparseMat rcur = module_rel_matrix(mod_, dd);
            if (rcur.cols() == 0) continue;
            SparseMat xr = module_x_matrix(mod_, dd) * rcur;
            SparseMat rlow = module_rel_matrix(mod_, dd - 2);
            SmithDecomposition s = smith(rlow, true);
            for (int c = 0; c < xr.cols(); ++c) {
                std::vector<Int> col(xr.rows(), 0);
                for (const auto& t : xr.triplets())
                    if (t.col == c) col[t.row] = t.val;
                bool zero = std::all_of(col.begin(), col.end(), [](const Int& v) { return v == 0; });
                if (!zero && !solve(s, col))
                    fail(Errc::domain, "module: X does not preserve the relation submodule");
            }
        }
    }

    Diagram d_;
    GradedModule mod_;
    std::vector<Resolution> res_;
    std::vector<long> strand_;
    std::vector<std::vector<long>> closed_;
    std::vector<std::vector<TEdge>> edges_;
    std::map<std::pair<int, int>, std::vector<Key>> basis_;
    std::map<std::pair<int, int>, std::vector<RelKey>> rels_;
    int jmin_ = 0;
    int jlo_ = 0, jhi_ = 0;
    bool prepared_ = false;
};

inline std::pair<int, int> default_window_tangle(const Diagram& d, const GradedModule& m) {
    TangleComplex cx(d, m);
    int spread = *std::max_element(m.deg.begin(), m.deg.end()) - *std::min_element(m.deg.begin(), m.deg.end());
    return {cx.j_min(), cx.j_min() + 2 * d.n() + 8 + spread};
}

inline BigradedGroups tangle_homology(const Diagram& d, const GradedModule& m, int jlo, int jhi) {
    TangleComplex cx(d, m);
    if (jlo > cx.j_min()) fail(Errc::domain, "window would hide low-degree tangle generators");
    cx.prepare(jlo, jhi);
    BigradedGroups out;
    out.ring = Ring::ZC;
    out.jlo = jlo;
    out.jhi = jhi;
    for (int i = cx.i_min(); i <= cx.i_max(); ++i)
        for (int j = jlo; j <= jhi; ++j) {
            if (cx.dim(i, j) == 0) continue;
            AbGroup g = cx.homology_at(i, j);
            if (!g.trivial()) out.groups[{i, j}] = std::move(g);
        }
    return out;
}

} // namespace linkhom

#endif
