#ifndef LINKHOM_COBORDISM_HPP
#define LINKHOM_COBORDISM_HPP

/* Movies (sequences of elementary cobordisms and Reidemeister moves)
 * and the chain maps they induce between the assembled complexes.
 *
 * Additions append their new crossings at the end of the crossing list;
 * removals may target any adjacent pair (R2) or any position (R1), and
 * the sign twists below are position-general.  Every elementary chain
 * map preserves i; births and deaths shift j by +1, fusions by -1, so a
 * movie's total j-shift equals the Euler characteristic of its surface.
 *
 * Free loops are addressed by negative ids -1..-L (sorted first among
 * the circles).  Loop identity across a move is positional bookkeeping,
 * fixed per case below; arc-backed circles are matched by id (their
 * minimal arc label) except where a move renames arcs, in which case a
 * surviving representative arc is used instead.
 *
 * Reidemeister chain maps on free-loop strands are not supported (fuse
 * the loop to a strand first), and fusions that force a component
 * orientation reversal are rejected, since the two complexes would not
 * share their (i,j) lattice.  R3 moves have no chain-level support and
 * are reported as unsupported.
 */

#include "linkhom/algebra.hpp"
#include "linkhom/cube.hpp"
#include "linkhom/diagram.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace linkhom {

/* --- undoing Reidemeister patterns -------------------------------------- */

struct CurlInfo {
    CurlKind kind;
    int inflow, outflow, loop;
};

inline CurlInfo curl_info(const Crossing& c) {
    CurlKind kind = classify_curl(c); // throws if not a curl
    auto same = [&](int i, int j) { return c.port[i] == c.port[j]; };
    if (same(2, 3)) return {kind, c.port[0], c.port[1], c.port[2]}; // X(a,b,l,l)
    if (same(0, 1)) return {kind, c.port[3], c.port[2], c.port[0]}; // X(l,l,b,a)
    if (same(1, 2)) return {kind, c.port[0], c.port[3], c.port[1]}; // X(a,l,l,b)
    return {kind, c.port[1], c.port[2], c.port[0]};                 // X(l,b,a,l)
}

/* Delete a curl crossing, rejoining the strand. */
inline Diagram undo_r1(const Diagram& d, int crossing) {
    if (crossing < 0 || crossing >= d.n()) fail(Errc::domain, "undo_r1: crossing index out of range");
    CurlInfo ci = curl_info(d.crossings()[crossing]);
    std::vector<Crossing> cr;
    for (int k = 0; k < d.n(); ++k)
        if (k != crossing) cr.push_back(d.crossings()[k]);
    int loops = d.free_loops();
    if (ci.inflow == ci.outflow) {
        ++loops; // the curl was a standalone unknot component
    } else {
        /* outflow's other endpoint becomes inflow */
        for (auto& c : cr)
            for (auto& a : c.port)
                if (a == ci.outflow) a = ci.inflow;
    }
    return Diagram(std::move(cr), loops);
}

struct BigonInfo {
    int a1, a2, b1, b2;      // strand entry/exit labels (over-strand a)
    int mid_over, mid_under; // bigon arcs
};

/* Validate an adjacent bigon pair c1 = X(b1,m_a,m_b,a1),
 * c2 = X(m_b,m_a,b2,a2) and report its labels. */
inline BigonInfo bigon_info(const Diagram& d, int k1, int k2) {
    if (k1 < 0 || k2 >= d.n() || k2 != k1 + 1)
        fail(Errc::unsupported, "removable bigons must be adjacent crossings (k, k+1)");
    const auto& c1 = d.crossings()[k1].port;
    const auto& c2 = d.crossings()[k2].port;
    if (c1[1] != c2[1] || c1[2] != c2[0])
        fail(Errc::unsupported, "crossings do not form a removable bigon in canonical position");
    BigonInfo bi{c1[3], c2[3], c1[0], c2[2], c1[1], c1[2]};
    /* the bigon arcs must be confined to these two crossings */
    int occ_ma = 0, occ_mb = 0;
    for (const auto& c : d.crossings())
        for (int a : c.port) {
            if (a == bi.mid_over) ++occ_ma;
            if (a == bi.mid_under) ++occ_mb;
        }
    if (occ_ma != 2 || occ_mb != 2) fail(Errc::unsupported, "bigon arcs escape the bigon");
    return bi;
}

inline Diagram undo_r2(const Diagram& d, int k1, int k2) {
    BigonInfo bi = bigon_info(d, k1, k2);
    std::vector<Crossing> cr;
    for (int k = 0; k < d.n(); ++k)
        if (k != k1 && k != k2) cr.push_back(d.crossings()[k]);
    int loops = d.free_loops();
    auto rejoin = [&](int entry, int exit) {
        if (entry == exit) {
            ++loops; // the strand lived entirely in the bigon
            return;
        }
        for (auto& c : cr)
            for (auto& a : c.port)
                if (a == exit) a = entry;
    };
    rejoin(bi.a1, bi.a2);
    rejoin(bi.b1, bi.b2);
    return Diagram(std::move(cr), loops);
}

/* --- movie moves --------------------------------------------------------- */

struct MoveStep {
    enum Kind { birth, death, fusion, r1_add, r1_remove, r2_add, r2_remove } kind = birth;
    int a = 0, b = 0; // death: loop id; fusion: strands; r1_add: arc;
                      // r1_remove: crossing; r2_add: over/under; r2_remove: crossings
    CurlKind curl = CurlKind::left;
};

inline MoveStep parse_move(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("op")) fail(Errc::parse, "move: expected {\"op\": ...}");
    std::string op = j.at("op").get<std::string>();
    MoveStep m{};
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field)) fail(Errc::parse, "move '" + op + "': missing \"" + field + "\"");
        return j.at(field);
    };
    if (op == "birth") {
        m.kind = MoveStep::birth;
    } else if (op == "death") {
        m.kind = MoveStep::death;
        m.a = need("loop").get<int>();
    } else if (op == "fusion") {
        m.kind = MoveStep::fusion;
        const auto& arcs = need("arcs");
        if (!arcs.is_array() || arcs.size() != 2) fail(Errc::parse, "fusion: \"arcs\" must be [a,b]");
        m.a = arcs[0].get<int>();
        m.b = arcs[1].get<int>();
    } else if (op == "r1_add") {
        m.kind = MoveStep::r1_add;
        m.a = need("arc").get<int>();
        std::string kind = need("kind").get<std::string>();
        if (kind != "left" && kind != "right") fail(Errc::parse, "r1_add: kind must be left or right");
        m.curl = kind == "left" ? CurlKind::left : CurlKind::right;
    } else if (op == "r1_remove") {
        m.kind = MoveStep::r1_remove;
        m.a = need("crossing").get<int>();
    } else if (op == "r2_add") {
        m.kind = MoveStep::r2_add;
        m.a = need("over").get<int>();
        m.b = need("under").get<int>();
    } else if (op == "r2_remove") {
        m.kind = MoveStep::r2_remove;
        const auto& cs = need("crossings");
        if (!cs.is_array() || cs.size() != 2) fail(Errc::parse, "r2_remove: \"crossings\" must be [i,j]");
        m.a = cs[0].get<int>();
        m.b = cs[1].get<int>();
    } else {
        fail(Errc::unsupported, "movie move '" + op + "' has no chain-level support");
    }
    return m;
}

struct AppliedMove {
    MoveStep step;
    Diagram src, tgt;
    int crossing = -1, crossing2 = -1; // new or removed crossing indices
    CurlInfo curl{CurlKind::left, -1, -1, -1};
    BigonInfo bigon{-1, -1, -1, -1, -1, -1};
};

namespace detail {

inline void check_strand(const Diagram& d, int s, const char* what) {
    if (s > 0) {
        if (!std::binary_search(d.arcs().begin(), d.arcs().end(), s))
            fail(Errc::domain, std::string(what) + ": arc " + std::to_string(s) + " not in diagram");
    } else if (s < 0) {
        if (-s > d.free_loops()) fail(Errc::domain, std::string(what) + ": no free loop " + std::to_string(s));
    } else {
        fail(Errc::parse, std::string(what) + ": strand 0 is neither an arc nor a loop");
    }
}

} // namespace detail

inline AppliedMove apply_move(const Diagram& d, const MoveStep& m) {
    AppliedMove out;
    out.step = m;
    out.src = d;
    switch (m.kind) {
    case MoveStep::birth:
        out.tgt = Diagram(d.crossings(), d.free_loops() + 1);
        return out;
    case MoveStep::death:
        if (m.a >= 0 || -m.a > d.free_loops()) fail(Errc::domain, "death: no such free loop");
        out.tgt = Diagram(d.crossings(), d.free_loops() - 1);
        return out;
    case MoveStep::fusion: {
        detail::check_strand(d, m.a, "fusion");
        detail::check_strand(d, m.b, "fusion");
        std::vector<Crossing> cr = d.crossings();
        int loops = d.free_loops();
        if (m.a > 0 && m.b > 0 && m.a != m.b) {
            /* swap the incoming endpoints: each strand continues into
             * the other's second half */
            auto ea = detail::find_endpoint(cr, m.a, true);
            auto eb = detail::find_endpoint(cr, m.b, true);
            cr[ea.first].port[ea.second] = m.b;
            cr[eb.first].port[eb.second] = m.a;
        } else if (m.a > 0 && m.b > 0) {
            ++loops; // self-saddle pinches off a free loop
        } else if (m.a < 0 && m.b < 0 && m.a == m.b) {
            ++loops; // a loop splits in two
        } else {
            --loops; // loop + loop or loop + arc merge
        }
        out.tgt = Diagram(std::move(cr), loops);
        if (out.tgt.x() != d.x() || out.tgt.y() != d.y())
            fail(Errc::unsupported, "fusion reverses a component orientation (crossing signs change)");
        return out;
    }
    case MoveStep::r1_add: {
        if (m.a < 0) fail(Errc::unsupported, "r1 on a free loop has no chain-level support");
        R1Result r = apply_r1(d, m.a, m.curl);
        out.tgt = r.diagram;
        out.crossing = r.crossing;
        out.curl = curl_info(out.tgt.crossings()[r.crossing]);
        return out;
    }
    case MoveStep::r1_remove: {
        if (m.a < 0 || m.a >= d.n()) fail(Errc::domain, "r1_remove: crossing out of range");
        out.curl = curl_info(d.crossings()[m.a]); // validates the pattern
        if (out.curl.inflow == out.curl.outflow)
            fail(Errc::unsupported, "curl is a standalone unknot; remove it with a death");
        out.tgt = undo_r1(d, m.a);
        out.crossing = m.a;
        return out;
    }
    case MoveStep::r2_add: {
        if (m.a < 0 || m.b < 0) fail(Errc::unsupported, "r2 on a free loop has no chain-level support");
        R2Result r = apply_r2(d, m.a, m.b);
        out.tgt = r.diagram;
        out.crossing = r.c_first;
        out.crossing2 = r.c_second;
        out.bigon = bigon_info(out.tgt, r.c_first, r.c_second);
        return out;
    }
    case MoveStep::r2_remove: {
        out.bigon = bigon_info(d, m.a, m.b); // validates
        if (out.bigon.a1 == out.bigon.a2 || out.bigon.b1 == out.bigon.b2)
            fail(Errc::unsupported, "bigon strand is a closed loop; no chain-level support");
        out.tgt = undo_r2(d, m.a, m.b);
        out.crossing = m.a;
        out.crossing2 = m.b;
        return out;
    }
    }
    fail(Errc::internal, "unreachable move kind");
}

/* --- chain maps ---------------------------------------------------------- */

struct ChainMap {
    std::shared_ptr<BigradedComplex> src, tgt;
    int dj = 0;
    std::function<SparseMat(int, int)> block; // C_src^{i,j} -> C_tgt^{i,j+dj}

    /* f d = d f on every bidegree of the window. */
    bool commutes(int jlo, int jhi) const {
        src->prepare(jlo, jhi);
        tgt->prepare(jlo, jhi);
        for (int i = src->i_min() - 1; i <= src->i_max(); ++i)
            for (int j = jlo; j <= jhi; ++j) {
                if (j + dj > jhi || j + dj < jlo) continue;
                if (src->dim(i, j) == 0) continue;
                SparseMat lhs = tgt->differential(i, j + dj) * block(i, j);
                SparseMat rhs = block(i + 1, j) * src->differential(i, j);
                if (!(lhs - rhs).is_zero()) return false;
            }
        return true;
    }
};

namespace detail {

struct RuleTerm {
    uint32_t state;
    uint32_t xmask;
    int p;
    Int coef;
};

using Rule = std::function<void(const ChainKey&, std::vector<RuleTerm>&)>;

/* Assemble the block matrix of a key-level rule at one bidegree. */
inline SparseMat rule_block(const BigradedComplex& src, const BigradedComplex& tgt, int i, int j, int dj,
                            const Rule& rule) {
    const auto& sb = src.basis(i, j);
    const auto& tb = tgt.basis(i, j + dj);
    SparseMat mat((int)tb.size(), (int)sb.size());
    if (sb.empty()) return mat;
    std::map<std::pair<uint32_t, uint32_t>, std::pair<int, int>> rows; // -> (row, p)
    for (int r = 0; r < (int)tb.size(); ++r) rows[{tb[r].state, tb[r].xmask}] = {r, tb[r].p};
    std::vector<RuleTerm> terms;
    for (int col = 0; col < (int)sb.size(); ++col) {
        terms.clear();
        rule(sb[col], terms);
        for (const auto& t : terms) {
            if (t.coef == 0) continue;
            auto it = rows.find({t.state, t.xmask});
            if (it == rows.end()) fail(Errc::internal, "chain map target key missing from basis");
            if (it->second.second != t.p) fail(Errc::internal, "chain map lands in the wrong c-layer");
            mat.add(it->second.first, col, t.coef);
        }
    }
    return mat;
}

/* Transport a source X-mask through a positional carry table. */
inline uint32_t carry_mask(uint32_t x, const std::vector<int>& carry) {
    uint32_t out = 0;
    for (int q = 0; q < (int)carry.size(); ++q)
        if (carry[q] >= 0 && mask_bit(x, q)) out |= 1u << carry[q];
    return out;
}

} // namespace detail

/* Build the chain map of one applied move between assembled complexes.
 * src must be the complex of mv.src and tgt of mv.tgt, over one ring. */
inline ChainMap elementary_chain_map(std::shared_ptr<BigradedComplex> src, std::shared_ptr<BigradedComplex> tgt,
                                     const AppliedMove& mv) {
    ChainMap cm;
    cm.src = src;
    cm.tgt = tgt;
    const Ring ring = src->ring();

    switch (mv.step.kind) {
    case MoveStep::birth: {
        cm.dj = +1;
        /* the new loop has the most negative id: factor position 0 */
        detail::Rule rule = [src](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            std::vector<int> carry(rs.count());
            for (int q = 0; q < rs.count(); ++q) carry[q] = q + 1;
            out.push_back({k.state, detail::carry_mask(k.xmask, carry), k.p, 1});
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, +1, rule); };
        return cm;
    }
    case MoveStep::death: {
        cm.dj = +1;
        const int q = mv.src.free_loops() + mv.step.a; // position of loop -k is L-k
        detail::Rule rule = [src, q, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            std::vector<int> carry(rs.count());
            for (int t = 0; t < rs.count(); ++t) carry[t] = t < q ? t : (t == q ? -1 : t - 1);
            uint32_t base = detail::carry_mask(k.xmask, carry);
            for (const auto& ct : counit_value(mask_bit(k.xmask, q), ring))
                out.push_back({k.state, base, k.p + ct.dp, ct.coef});
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, +1, rule); };
        return cm;
    }
    case MoveStep::fusion: {
        cm.dj = -1;
        const int u = mv.step.a, v = mv.step.b;
        const int L = mv.src.free_loops();
        detail::Rule rule = [src, tgt, u, v, L, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            const Resolution& rt = tgt->cube().states[k.state];
            auto arc_pos = [](const Resolution& r, int arc) { return r.index_of(r.circle_of_arc(arc)); };

            std::vector<int> carry(rs.count(), -1);
            bool is_merge;
            int sa = -1, sb = -1; // consumed source factor(s)
            int ta = -1, tb = -1; // produced target factor(s)
            if (u > 0 && v > 0 && u != v && rs.circle_of_arc(u) != rs.circle_of_arc(v)) {
                is_merge = true;
                sa = arc_pos(rs, u);
                sb = arc_pos(rs, v);
                ta = arc_pos(rt, u);
                for (int t = 0; t < rs.count(); ++t)
                    if (t != sa && t != sb) carry[t] = rt.index_of(rs.circles[t]);
            } else if (u > 0 && v > 0 && u != v) {
                is_merge = false; // same circle: the saddle splits it
                sa = arc_pos(rs, u);
                ta = arc_pos(rt, u);
                tb = arc_pos(rt, v);
                if (ta == tb) fail(Errc::internal, "fusion split produced one circle");
                for (int t = 0; t < rs.count(); ++t)
                    if (t != sa) carry[t] = rt.index_of(rs.circles[t]);
            } else if (u > 0 && v > 0) {
                is_merge = false; // self-saddle: splits off loop -(L+1), at position 0
                sa = arc_pos(rs, u);
                ta = arc_pos(rt, u);
                tb = 0;
                for (int t = 0; t < rs.count(); ++t)
                    if (t != sa) carry[t] = rt.index_of(rs.circles[t]);
            } else if (u < 0 && v < 0 && u == v) {
                is_merge = false; // a loop splits: children at positions 0 and 1
                sa = L + u;
                ta = 0;
                tb = 1;
                for (int t = 0; t < rs.count(); ++t) {
                    if (t == sa) continue;
                    if (t < L)
                        carry[t] = (t < sa ? t : t - 1) + 2; // other loops follow the children
                    else
                        carry[t] = rt.index_of(rs.circles[t]);
                }
            } else if (u < 0 && v < 0) {
                is_merge = true; // two loops merge into the loop at position 0
                sa = L + u;
                sb = L + v;
                ta = 0;
                for (int t = 0; t < rs.count(); ++t) {
                    if (t == sa || t == sb) continue;
                    if (t < L) {
                        int below = (t > sa ? 1 : 0) + (t > sb ? 1 : 0);
                        carry[t] = t - below + 1;
                    } else {
                        carry[t] = rt.index_of(rs.circles[t]);
                    }
                }
            } else {
                is_merge = true; // arc + loop merge into the arc's circle
                int arc = u > 0 ? u : v;
                int lp = u > 0 ? v : u;
                sa = arc_pos(rs, arc);
                sb = L + lp;
                ta = arc_pos(rt, arc);
                for (int t = 0; t < rs.count(); ++t) {
                    if (t == sa || t == sb) continue;
                    if (t < L)
                        carry[t] = t < sb ? t : t - 1;
                    else
                        carry[t] = rt.index_of(rs.circles[t]);
                }
            }

            uint32_t base = detail::carry_mask(k.xmask, carry);
            if (is_merge) {
                auto mval = mult_value(mask_bit(k.xmask, sa), mask_bit(k.xmask, sb));
                if (!mval) return;
                out.push_back({k.state, mask_set(base, ta, *mval), k.p, 1});
            } else {
                for (const auto& t : comult_value(mask_bit(k.xmask, sa), ring))
                    out.push_back({k.state, mask_set(mask_set(base, ta, t.x1), tb, t.x2), k.p + t.dp, t.coef});
            }
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, -1, rule); };
        return cm;
    }
    case MoveStep::r1_add:
    case MoveStep::r1_remove:
    case MoveStep::r2_add:
    case MoveStep::r2_remove:
        break; // below
    }

    /* Reidemeister chain maps; all preserve (i,j). */
    cm.dj = 0;
    const int K = mv.crossing;
    const CurlInfo ci = mv.curl;

    if (mv.step.kind == MoveStep::r1_add && ci.kind == CurlKind::left) {
        /* z on the strand circle s maps to the 0-face, where the small
         * loop is a separate circle:
         *   1_s -> 1_s (x) X_l - X_s (x) 1_l + c X_s (x) X_l,   X_s -> X_s (x) X_l */
        detail::Rule rule = [src, tgt, ci, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            uint32_t tstate = k.state; // new top bit stays 0
            const Resolution& rt = tgt->cube().states[tstate];
            int sa = rs.index_of(rs.circle_of_arc(ci.inflow));
            int ta = rt.index_of(rt.circle_of_arc(ci.inflow));
            int tl = rt.index_of(rt.circle_of_arc(ci.loop));
            std::vector<int> carry(rs.count(), -1);
            for (int t = 0; t < rs.count(); ++t)
                if (t != sa) carry[t] = rt.index_of(rs.circles[t]);
            uint32_t base = detail::carry_mask(k.xmask, carry);
            if (mask_bit(k.xmask, sa)) {
                out.push_back({tstate, mask_set(mask_set(base, ta, true), tl, true), k.p, 1});
            } else {
                out.push_back({tstate, mask_set(mask_set(base, ta, false), tl, true), k.p, 1});
                out.push_back({tstate, mask_set(mask_set(base, ta, true), tl, false), k.p, -1});
                if (ring == Ring::ZC)
                    out.push_back({tstate, mask_set(mask_set(base, ta, true), tl, true), k.p + 1, 1});
            }
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    if (mv.step.kind == MoveStep::r1_remove && ci.kind == CurlKind::left) {
        /* projection: w (x) 1_l -> 0,  w (x) X_l -> (1 - cX) w.  The
         * surviving 0-face has bit K clear, so dropping it flips no edge
         * signs and no twist appears. */
        detail::Rule rule = [src, tgt, K, ci, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            if (k.state >> K & 1) return; // the 1-face maps to zero
            const Resolution& rs = src->cube().states[k.state];
            uint32_t tstate = mask_remove(k.state, K);
            const Resolution& rt = tgt->cube().states[tstate];
            int sl = rs.index_of(rs.circle_of_arc(ci.loop));
            int sa = rs.index_of(rs.circle_of_arc(ci.inflow));
            int ta = rt.index_of(rt.circle_of_arc(ci.inflow));
            if (!mask_bit(k.xmask, sl)) return;
            std::vector<int> carry(rs.count(), -1);
            for (int t = 0; t < rs.count(); ++t)
                if (t != sa && t != sl) carry[t] = rt.index_of(rs.circles[t]);
            uint32_t base = detail::carry_mask(k.xmask, carry);
            bool w = mask_bit(k.xmask, sa);
            out.push_back({tstate, mask_set(base, ta, w), k.p, 1});
            if (ring == Ring::ZC && !w)
                out.push_back({tstate, mask_set(base, ta, true), k.p + 1, -1});
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    if (mv.step.kind == MoveStep::r1_add && ci.kind == CurlKind::right) {
        /* z -> (1 - 2cX) z (x) 1_l on the 1-face.  The new crossing sits
         * last, so setting its bit changes no edge sign below it and no
         * twist is needed. */
        detail::Rule rule = [src, tgt, K, ci, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            uint32_t tstate = k.state | (1u << K);
            const Resolution& rt = tgt->cube().states[tstate];
            int sa = rs.index_of(rs.circle_of_arc(ci.inflow));
            int ta = rt.index_of(rt.circle_of_arc(ci.inflow));
            int tl = rt.index_of(rt.circle_of_arc(ci.loop));
            std::vector<int> carry(rs.count(), -1);
            for (int t = 0; t < rs.count(); ++t)
                if (t != sa) carry[t] = rt.index_of(rs.circles[t]);
            uint32_t base = detail::carry_mask(k.xmask, carry);
            bool w = mask_bit(k.xmask, sa);
            out.push_back({tstate, mask_set(mask_set(base, ta, w), tl, false), k.p, 1});
            if (ring == Ring::ZC && !w)
                out.push_back({tstate, mask_set(mask_set(base, ta, true), tl, false), k.p + 1, -2});
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    if (mv.step.kind == MoveStep::r1_remove && ci.kind == CurlKind::right) {
        /* w (x) 1_l -> (1 + 2cX) w,  w (x) X_l -> -X w, twisted by
         * tw = (-1)^{#{set bits above K}} (removing bit K flips the edge
         * signs at the crossings after it). */
        detail::Rule rule = [src, tgt, K, ci, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            if (!(k.state >> K & 1)) return; // the 0-face maps to zero
            const Resolution& rs = src->cube().states[k.state];
            uint32_t tstate = mask_remove(k.state, K);
            const Resolution& rt = tgt->cube().states[tstate];
            int sl = rs.index_of(rs.circle_of_arc(ci.loop));
            int sa = rs.index_of(rs.circle_of_arc(ci.inflow));
            int ta = rt.index_of(rt.circle_of_arc(ci.inflow));
            std::vector<int> carry(rs.count(), -1);
            for (int t = 0; t < rs.count(); ++t)
                if (t != sa && t != sl) carry[t] = rt.index_of(rs.circles[t]);
            uint32_t base = detail::carry_mask(k.xmask, carry);
            int tw = std::popcount(k.state >> (K + 1)) % 2 ? -1 : 1;
            bool w = mask_bit(k.xmask, sa);
            if (!mask_bit(k.xmask, sl)) {
                out.push_back({tstate, mask_set(base, ta, w), k.p, tw});
                if (ring == Ring::ZC && !w)
                    out.push_back({tstate, mask_set(base, ta, true), k.p + 1, 2 * tw});
            } else if (!w) {
                out.push_back({tstate, mask_set(base, ta, true), k.p, -tw});
            } // X (x) X -> 0
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    if (mv.step.kind == MoveStep::r2_add) {
        const int K1 = mv.crossing, K2 = mv.crossing2;
        const BigonInfo bi = mv.bigon;
        /* g(z) = z at the (0,1)-face + (saddle z, middle 1) at (1,0);
         * both new crossings sit last, so no sign twist appears. */
        detail::Rule rule = [src, tgt, K1, K2, bi, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            const Resolution& rs = src->cube().states[k.state];
            {
                uint32_t tstate = k.state | (1u << K2);
                const Resolution& rt = tgt->cube().states[tstate];
                std::vector<int> carry(rs.count(), -1);
                for (int t = 0; t < rs.count(); ++t) carry[t] = rt.index_of(rs.circles[t]);
                out.push_back({tstate, detail::carry_mask(k.xmask, carry), k.p, 1});
            }
            {
                uint32_t tstate = k.state | (1u << K1);
                const Resolution& rt = tgt->cube().states[tstate];
                long cu = rs.circle_of_arc(bi.a1), cv = rs.circle_of_arc(bi.b1);
                int sa = rs.index_of(cu);
                std::vector<int> carry(rs.count(), -1);
                if (cu != cv) { // the saddle merges the two strand circles
                    int sb = rs.index_of(cv);
                    int ta = rt.index_of(rt.circle_of_arc(bi.a1));
                    for (int t = 0; t < rs.count(); ++t)
                        if (t != sa && t != sb) carry[t] = rt.index_of(rs.circles[t]);
                    uint32_t base = detail::carry_mask(k.xmask, carry);
                    auto mval = mult_value(mask_bit(k.xmask, sa), mask_bit(k.xmask, sb));
                    if (mval) out.push_back({tstate, mask_set(base, ta, *mval), k.p, 1});
                } else { // one circle splits into the two turnback circles
                    int ta = rt.index_of(rt.circle_of_arc(bi.a1));
                    int tb = rt.index_of(rt.circle_of_arc(bi.b2));
                    if (ta == tb) fail(Errc::internal, "r2 saddle split produced one circle");
                    for (int t = 0; t < rs.count(); ++t)
                        if (t != sa) carry[t] = rt.index_of(rs.circles[t]);
                    uint32_t base = detail::carry_mask(k.xmask, carry);
                    for (const auto& t : comult_value(mask_bit(k.xmask, sa), ring))
                        out.push_back({tstate, mask_set(mask_set(base, ta, t.x1), tb, t.x2), k.p + t.dp, t.coef});
                }
                /* the middle circle carries 1: its bit stays clear */
            }
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    if (mv.step.kind == MoveStep::r2_remove) {
        const int K1 = mv.crossing, K2 = mv.crossing2;
        const BigonInfo bi = mv.bigon;
        /* p(w) = tw * [ transport(w at (0,1))
        *               - saddle_2(project_middle(w at (1,0))) ]
         * with tw = (-1)^{#{set bits above K2}}.  project_middle kills
         * (middle = 1), and sends w (x) X_m to (1 - cX_C) w on the
         * (0,0)-face, whose threading circle C picks up the correction. */
        detail::Rule rule = [src, tgt, K1, K2, bi, ring](const ChainKey& k, std::vector<detail::RuleTerm>& out) {
            bool b1 = k.state >> K1 & 1, b2 = k.state >> K2 & 1;
            if (b1 == b2) return; // (0,0) and (1,1) faces map to zero
            uint32_t rest = mask_remove(mask_remove(k.state, K2), K1);
            int tw = std::popcount(k.state >> (K2 + 1)) % 2 ? -1 : 1;
            const Resolution& rs = src->cube().states[k.state];
            const Resolution& rt = tgt->cube().states[rest];
            /* transport into the target diagram: circles through the
             * bigon are matched by the surviving arcs a1/b1 (a2 and b2
             * get renamed by the rejoin), all others by id */
            auto to_target = [&](const Resolution& from, int t) -> int {
                long id = from.circles[t];
                if (id >= 0 && id == from.circle_of_arc(bi.a1)) return rt.index_of(rt.circle_of_arc(bi.a1));
                if (id >= 0 && id == from.circle_of_arc(bi.b1)) return rt.index_of(rt.circle_of_arc(bi.b1));
                return rt.index_of(id);
            };
            if (!b1) {
                /* (0,1)-face: plain transport */
                std::vector<int> carry(rs.count(), -1);
                for (int t = 0; t < rs.count(); ++t) carry[t] = to_target(rs, t);
                out.push_back({rest, detail::carry_mask(k.xmask, carry), k.p, tw});
                return;
            }
            /* (1,0)-face */
            int sm = rs.index_of(rs.circle_of_arc(bi.mid_over));
            if (!mask_bit(k.xmask, sm)) return; // middle carries 1: projected out
            uint32_t s00 = k.state & ~(1u << K1);
            const Resolution& r00 = src->cube().states[s00];
            std::vector<int> carry(rs.count(), -1); // (1,0) -> (0,0): states of one diagram, match by id
            for (int t = 0; t < rs.count(); ++t)
                if (t != sm) carry[t] = r00.index_of(rs.circles[t]);
            int ca = r00.index_of(r00.circle_of_arc(bi.a1));
            struct Partial {
                uint32_t mask;
                int p;
                Int coef;
            };
            std::vector<Partial> parts;
            uint32_t base00 = detail::carry_mask(k.xmask, carry);
            parts.push_back({base00, k.p, 1});
            if (ring == Ring::ZC && !mask_bit(base00, ca))
                parts.push_back({mask_set(base00, ca, true), k.p + 1, -1});
            /* saddle (0,0) -> (0,1) at the second crossing, then into the target */
            const EdgeMap& em = src->cube().edges[s00][K2];
            uint32_t s01 = s00 | (1u << K2);
            const Resolution& r01 = src->cube().states[s01];
            std::vector<int> to_rest(r01.count(), -1);
            for (int t = 0; t < r01.count(); ++t) to_rest[t] = to_target(r01, t);
            auto emit = [&](uint32_t w01, int p, const Int& coef) {
                uint32_t wr = 0;
                for (int t = 0; t < (int)to_rest.size(); ++t)
                    if (mask_bit(w01, t)) wr |= 1u << to_rest[t];
                out.push_back({rest, wr, p, -tw * coef});
            };
            for (const auto& part : parts) {
                uint32_t w01 = 0;
                for (int t = 0; t < (int)em.carry.size(); ++t)
                    if (em.carry[t] >= 0 && mask_bit(part.mask, t)) w01 |= 1u << em.carry[t];
                if (em.merge) {
                    auto mval = mult_value(mask_bit(part.mask, em.src_a), mask_bit(part.mask, em.src_b));
                    if (!mval) continue;
                    emit(mask_set(w01, em.dst_a, *mval), part.p, part.coef);
                } else {
                    for (const auto& t2 : comult_value(mask_bit(part.mask, em.src_a), ring))
                        emit(mask_set(mask_set(w01, em.dst_a, t2.x1), em.dst_b, t2.x2), part.p + t2.dp,
                             part.coef * t2.coef);
                }
            }
        };
        cm.block = [src, tgt, rule](int i, int j) { return detail::rule_block(*src, *tgt, i, j, 0, rule); };
        return cm;
    }
    fail(Errc::internal, "unhandled move kind in elementary_chain_map");
}

/* --- movies --------------------------------------------------------------- */

struct Movie {
    Diagram initial;
    std::vector<nlohmann::json> moves;

    static Movie from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("initial")) fail(Errc::parse, "movie: missing \"initial\"");
        Movie m;
        const auto& init = j.at("initial");
        if (init.is_string()) {
            m.initial = Diagram::parse_pd(init.get<std::string>());
        } else if (init.is_object() && init.value("crossings", nlohmann::json::array()).empty() &&
                   init.value("free_loops", 0) == 0) {
            m.initial = Diagram(); // movies may start from the empty diagram
        } else {
            m.initial = Diagram::from_json(init);
        }
        if (j.contains("moves")) {
            if (!j.at("moves").is_array()) fail(Errc::parse, "movie: \"moves\" must be an array");
            for (const auto& mv : j.at("moves")) m.moves.push_back(mv);
        }
        return m;
    }
};

struct MovieMap {
    std::vector<Diagram> frames; // length = moves + 1
    std::vector<ChainMap> steps; // one per move
    std::shared_ptr<BigradedComplex> src, tgt;
    int dj = 0;          // = Euler characteristic of the movie's surface
    int vlo = 0, vhi = 0; // j window every frame complex is prepared over

    SparseMat block(int i, int j) const {
        if (steps.empty()) {
            int d = (int)src->basis(i, j).size();
            SparseMat m(d, d);
            for (int r = 0; r < d; ++r) m.add(r, r, 1);
            return m;
        }
        SparseMat m = steps[0].block(i, j);
        int shift = steps[0].dj;
        for (size_t t = 1; t < steps.size(); ++t) {
            m = steps[t].block(i, j + shift) * m;
            shift += steps[t].dj;
        }
        return m;
    }

    bool commutes(int jlo, int jhi) const {
        for (const auto& s : steps)
            if (!s.commutes(jlo, jhi)) return false;
        return true;
    }
};

/* Run a movie and build its composite chain map.  With verify set, each
 * step is checked to commute with the differentials over a window
 * containing every finite degree (ring Z) or the default report window
 * (ring Z[c], where the towers repeat with period 2 in j). */
inline MovieMap movie_map(const Movie& movie, Ring ring, bool verify = true) {
    MovieMap out;
    out.frames.push_back(movie.initial);
    std::vector<AppliedMove> applied;
    for (const auto& mj : movie.moves) {
        MoveStep step = parse_move(mj);
        AppliedMove am = apply_move(out.frames.back(), step);
        out.frames.push_back(am.tgt);
        applied.push_back(std::move(am));
    }
    std::vector<std::shared_ptr<BigradedComplex>> cxs;
    for (const auto& f : out.frames)
        cxs.push_back(std::make_shared<BigradedComplex>(assemble_complex(f, ring)));
    for (size_t t = 0; t < applied.size(); ++t) {
        out.steps.push_back(elementary_chain_map(cxs[t], cxs[t + 1], applied[t]));
        out.dj += out.steps.back().dj;
    }
    out.src = cxs.front();
    out.tgt = cxs.back();

    int jlo = 0, jhi = 0;
    for (const auto& cx : cxs) {
        jlo = std::min(jlo, cx->j_min() - 1);
        jhi = std::max(jhi, ring == Ring::Z ? cx->j_max_z() + 1 : cx->j_min() + 2 * cx->cube().n() + 9);
    }
    out.vlo = jlo;
    out.vhi = jhi;
    if (verify) {
        for (const auto& s : out.steps)
            if (!s.commutes(jlo, jhi)) fail(Errc::internal, "movie chain map does not commute with d");
    } else {
        for (const auto& cx : cxs) cx->prepare(jlo, jhi);
    }
    return out;
}

/* The value of a movie from the empty diagram to the empty diagram: the
 * (0,0) block is 1x1 and represents multiplication by n c^{dj/2}.
 * Returns the pair (coefficient n, c power dj/2). */
inline std::pair<Int, int> closed_movie_value(const MovieMap& mm) {
    if (mm.frames.front().n() != 0 || mm.frames.front().free_loops() != 0 || mm.frames.back().n() != 0 ||
        mm.frames.back().free_loops() != 0)
        fail(Errc::domain, "closed_movie_value needs an empty-to-empty movie");
    if (mm.dj % 2 != 0) fail(Errc::internal, "closed surface with odd degree shift");
    /* the degree walks through the partial sums of the step shifts */
    int lo = 0, hi = 0, run = 0;
    for (const auto& s : mm.steps) {
        run += s.dj;
        lo = std::min(lo, run);
        hi = std::max(hi, run);
    }
    mm.src->prepare(lo, hi);
    for (const auto& s : mm.steps) {
        s.src->prepare(lo, hi);
        s.tgt->prepare(lo, hi);
    }
    SparseMat b = mm.block(0, 0);
    if (b.cols() != 1 || b.rows() > 1) fail(Errc::internal, "empty-diagram slice is not one-dimensional");
    /* a 0-row block is the zero map: the target slice vanishes, which is
     * how every surface with negative Euler characteristic evaluates */
    Int v = 0;
    for (const auto& t : b.triplets()) v = t.val;
    return {v, mm.dj / 2};
}

} // namespace linkhom

#endif
