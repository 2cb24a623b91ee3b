#ifndef LINKHOM_DIAGRAM_HPP
#define LINKHOM_DIAGRAM_HPP

/* Planar link/tangle diagrams in PD notation, resolutions of crossings,
 * and the diagram-level moves every other module builds on.
 *
 * Conventions (fixed once, used consistently everywhere):
 *  - A crossing X(a,b,c,d) lists the four arc labels counterclockwise
 *    starting from the incoming under-strand: the under-strand runs
 *    a -> c.  The over-strand runs d -> b or b -> d; which one is
 *    determined by global orientation consistency.
 *  - sign(+1) iff the over-strand enters at position 3 (runs d -> b).
 *    x = #negative crossings, y = #positive crossings.
 *  - 0-smoothing joins ports (0,1) and (2,3); 1-smoothing joins (0,3)
 *    and (1,2).  This is independent of orientation.
 *  - A resolution state is a bitmask over crossing indices; bit k set
 *    means crossing k is 1-smoothed.
 *  - Circles are identified by their smallest arc label; free loops
 *    (crossing-less unknot components) get negative ids -1, -2, ...
 *    Circle lists are always sorted ascending by id, which fixes the
 *    tensor-factor order of every chain group.
 */

#include "linkhom/ring.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace linkhom {

struct Crossing {
    std::array<int, 4> port{}; // arc labels, CCW from incoming under-strand
    bool over_in_at_3 = true;  // orientation of the over-strand; true <=> sign +1

    int sign() const { return over_in_at_3 ? +1 : -1; }
    bool operator==(const Crossing& o) const { return port == o.port; }
};

/* Connectivity of one resolution state. */
struct Resolution {
    std::vector<long> circles;          // sorted circle ids (loops negative, first)
    std::map<int, long> arc_circle;     // arc label -> circle id

    int count() const { return (int)circles.size(); }
    int index_of(long id) const {
        auto it = std::lower_bound(circles.begin(), circles.end(), id);
        if (it == circles.end() || *it != id) fail(Errc::internal, "circle id not in state");
        return (int)(it - circles.begin());
    }
    long circle_of_arc(int arc) const {
        auto it = arc_circle.find(arc);
        if (it == arc_circle.end()) fail(Errc::domain, "arc not in diagram");
        return it->second;
    }
};

/* What happens along a cube edge: resolving one extra crossing either
 * merges two circles or splits one. */
struct EdgeEvent {
    bool merge = false;
    long src1 = 0, src2 = 0; // merge: the two merged ids; split: src1 == src2
    long dst1 = 0, dst2 = 0; // merge: dst1 == dst2; split: the two result ids
};

class Diagram;
namespace detail {
void finalize(Diagram& d);
}

class Diagram {
  public:
    Diagram() = default;
    Diagram(std::vector<Crossing> crossings, int free_loops) : cr_(std::move(crossings)), loops_(free_loops) {
        detail::finalize(*this);
    }

    static Diagram parse_pd(const std::string& text);
    static Diagram parse_braid(const std::vector<int>& word, int strands);
    static Diagram from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    std::string pd_string() const;

    int n() const { return (int)cr_.size(); }
    int free_loops() const { return loops_; }
    const std::vector<Crossing>& crossings() const { return cr_; }
    const std::vector<int>& arcs() const { return arcs_; }
    bool is_closed() const { return open_arcs_.empty(); }
    const std::vector<int>& open_arcs() const { return open_arcs_; }

    int x() const { return x_; } // negative crossings
    int y() const { return y_; } // positive crossings
    int writhe() const { return y_ - x_; }

    /* Number of link components (oriented strands + free loops). */
    int components() const { return (int)component_reps_.size() + loops_; }
    const std::vector<int>& component_reps() const { return component_reps_; }
    int component_of_arc(int arc) const {
        auto it = arc_component_.find(arc);
        if (it == arc_component_.end()) fail(Errc::domain, "arc not in diagram");
        return it->second;
    }

    Resolution resolve(uint32_t state) const;
    EdgeEvent edge_event(uint32_t state, int crossing) const;

    Diagram mirrored() const;

    bool is_plus_adequate() const;
    bool is_minus_adequate() const;

  private:
    std::vector<Crossing> cr_;
    int loops_ = 0;
    int x_ = 0, y_ = 0;
    std::vector<int> arcs_;
    std::vector<int> open_arcs_;              // labels occurring once (tangle ends)
    std::map<int, int> arc_component_;        // arc -> component representative
    std::vector<int> component_reps_;

    friend void detail::finalize(Diagram&);
    friend Diagram disjoint_union(const Diagram&, const Diagram&);
    friend Diagram connected_sum(const Diagram&, const Diagram&, int, int);
};

namespace detail {

/* In the resolved state, ports are joined in pairs. */
inline std::array<std::pair<int, int>, 2> joined_ports(bool one_smoothing) {
    if (!one_smoothing) return {{{0, 1}, {2, 3}}};
    return {{{0, 3}, {1, 2}}};
}

struct UnionFind {
    std::map<int, int> parent;
    int find(int a) {
        auto it = parent.find(a);
        if (it == parent.end()) {
            parent[a] = a;
            return a;
        }
        int root = a;
        while (parent[root] != root) root = parent[root];
        while (parent[a] != root) {
            int nxt = parent[a];
            parent[a] = root;
            a = nxt;
        }
        return root;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[b] = a; // keep the smallest label as representative
    }
};

/* Direction of each port: true = strand exits the crossing here.
 * Position 0 is always entering (under in), position 2 always exiting.
 * Positions 1 and 3 depend on the over-strand orientation flag. */
inline bool port_is_out(const Crossing& c, int pos) {
    switch (pos) {
    case 0: return false;
    case 2: return true;
    case 1: return c.over_in_at_3;
    default: return !c.over_in_at_3;
    }
}

/* Infer over-strand orientations, count signs, and trace components.
 * Each arc must leave one endpoint and enter the other; that constraint
 * propagates the per-crossing flags.  Components that never pass under
 * anything are unconstrained and take the default flag (documented). */
inline void finalize(Diagram& d) {
    auto& cr = d.cr_;
    std::map<int, std::vector<std::pair<int, int>>> occ; // arc -> (crossing, pos)
    for (int i = 0; i < (int)cr.size(); ++i)
        for (int p = 0; p < 4; ++p) {
            if (cr[i].port[p] < 1) fail(Errc::parse, "arc labels must be positive integers");
            occ[cr[i].port[p]].push_back({i, p});
        }

    d.arcs_.clear();
    d.open_arcs_.clear();
    for (auto& [arc, places] : occ) {
        d.arcs_.push_back(arc);
        if (places.size() == 1) {
            d.open_arcs_.push_back(arc);
        } else if (places.size() != 2) {
            fail(Errc::parse, "arc " + std::to_string(arc) + " occurs " + std::to_string(places.size()) +
                                  " times (each label must appear once or twice)");
        }
    }

    /* 2-SAT-free propagation: state of flag i known/unknown; constraints
     * come from arcs whose two endpoints include positions 1 or 3. */
    std::vector<int> flag(cr.size(), -1); // -1 unknown, 0 false, 1 true
    auto dir_known = [&](int i, int p) { return p == 0 || p == 2 || flag[i] != -1; };
    auto dir_out = [&](int i, int p) {
        Crossing tmp = cr[i];
        tmp.over_in_at_3 = (flag[i] == 1);
        return port_is_out(tmp, p);
    };

    bool progress = true;
    while (true) {
        progress = false;
        for (auto& [arc, places] : occ) {
            if (places.size() != 2) continue;
            auto [i1, p1] = places[0];
            auto [i2, p2] = places[1];
            bool k1 = dir_known(i1, p1), k2 = dir_known(i2, p2);
            if (k1 && k2) {
                if (dir_out(i1, p1) == dir_out(i2, p2))
                    fail(Errc::parse, "orientation inconsistency at arc " + std::to_string(arc));
            } else if (k1 != k2) {
                int iu = k1 ? i2 : i1;
                int pu = k1 ? p2 : p1;
                bool need_out = !(k1 ? dir_out(i1, p1) : dir_out(i2, p2));
                /* pos 1 exits iff flag, pos 3 exits iff !flag */
                flag[iu] = (pu == 1) == need_out ? 1 : 0;
                progress = true;
            }
        }
        if (!progress) {
            /* Fix one unknown flag (everywhere-over component) and retry. */
            bool fixed = false;
            for (size_t i = 0; i < flag.size(); ++i)
                if (flag[i] == -1) {
                    flag[i] = 1;
                    fixed = true;
                    break;
                }
            if (!fixed) break;
        }
    }

    d.x_ = d.y_ = 0;
    for (size_t i = 0; i < cr.size(); ++i) {
        cr[i].over_in_at_3 = (flag[i] == 1);
        (cr[i].sign() > 0 ? d.y_ : d.x_)++;
    }

    /* Oriented components: under-in joins under-out, over-in joins over-out. */
    UnionFind comp;
    for (auto& c : cr) {
        comp.unite(c.port[0], c.port[2]);
        if (c.over_in_at_3)
            comp.unite(c.port[3], c.port[1]);
        else
            comp.unite(c.port[1], c.port[3]);
    }
    d.arc_component_.clear();
    std::set<int> reps;
    for (int a : d.arcs_) {
        int r = comp.find(a);
        d.arc_component_[a] = r;
        reps.insert(r);
    }
    d.component_reps_.assign(reps.begin(), reps.end());
}

} // namespace detail

inline Resolution Diagram::resolve(uint32_t state) const {
    if (n() > 30) fail(Errc::domain, "diagram too large (max 30 crossings)");
    detail::UnionFind uf;
    for (int a : arcs_) uf.find(a);
    for (int i = 0; i < n(); ++i)
        for (auto [p, q] : detail::joined_ports(state >> i & 1)) uf.unite(cr_[i].port[p], cr_[i].port[q]);

    Resolution res;
    std::set<long> ids;
    for (int a : arcs_) {
        long id = uf.find(a);
        res.arc_circle[a] = id;
        ids.insert(id);
    }
    for (int k = 1; k <= loops_; ++k) ids.insert(-k);
    res.circles.assign(ids.begin(), ids.end());
    return res;
}

inline EdgeEvent Diagram::edge_event(uint32_t state, int crossing) const {
    if (crossing < 0 || crossing >= n()) fail(Errc::domain, "crossing index out of range");
    if (state >> crossing & 1) fail(Errc::domain, "edge_event: crossing already 1-smoothed");
    Resolution lo = resolve(state);
    Resolution hi = resolve(state | (1u << crossing));
    const auto& c = cr_[crossing];

    EdgeEvent ev;
    long a0 = lo.circle_of_arc(c.port[0]);
    long a2 = lo.circle_of_arc(c.port[2]);
    if (a0 != a2) {
        ev.merge = true;
        ev.src1 = std::min(a0, a2);
        ev.src2 = std::max(a0, a2);
        ev.dst1 = ev.dst2 = hi.circle_of_arc(c.port[0]);
    } else {
        ev.merge = false;
        ev.src1 = ev.src2 = a0;
        long b0 = hi.circle_of_arc(c.port[0]);
        long b1 = hi.circle_of_arc(c.port[1]);
        if (b0 == b1) fail(Errc::internal, "edge event: split produced one circle");
        ev.dst1 = std::min(b0, b1);
        ev.dst2 = std::max(b0, b1);
    }
    return ev;
}

inline Diagram Diagram::mirrored() const {
    /* Swapping every crossing exchanges the roles of the two smoothings
     * and flips all signs.  In tuple terms the ports rotate one step:
     * the old over-strand becomes the under-strand. */
    std::vector<Crossing> out;
    out.reserve(cr_.size());
    for (const auto& c : cr_) {
        Crossing m;
        if (c.over_in_at_3) {
            /* over ran port3 -> port1; it becomes the under-strand */
            m.port = {c.port[3], c.port[0], c.port[1], c.port[2]};
        } else {
            m.port = {c.port[1], c.port[2], c.port[3], c.port[0]};
        }
        out.push_back(m);
    }
    return Diagram(std::move(out), loops_);
}

/* --- parsing ---------------------------------------------------------- */

inline Diagram Diagram::parse_pd(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text)
        if (!std::isspace((unsigned char)ch)) s.push_back(ch);

    size_t pos = 0;
    bool wrapped = false;
    if (s.rfind("PD[", 0) == 0) {
        wrapped = true;
        pos = 3;
    }
    std::vector<Crossing> cr;
    while (pos < s.size() && s[pos] != ']') {
        if (s[pos] == ',') {
            ++pos;
            continue;
        }
        if (s.compare(pos, 2, "X(") != 0) fail(Errc::parse, "expected X( at position " + std::to_string(pos));
        pos += 2;
        Crossing c;
        for (int k = 0; k < 4; ++k) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            if (start == pos) fail(Errc::parse, "expected arc label in X(...)");
            c.port[k] = std::stoi(s.substr(start, pos - start));
            if (k < 3) {
                if (pos >= s.size() || s[pos] != ',') fail(Errc::parse, "expected , in X(...)");
                ++pos;
            }
        }
        if (pos >= s.size() || s[pos] != ')') fail(Errc::parse, "expected ) closing X(");
        ++pos;
        cr.push_back(c);
    }
    if (wrapped) {
        if (pos >= s.size() || s[pos] != ']') fail(Errc::parse, "expected ] closing PD[");
        ++pos;
    }
    if (pos != s.size()) fail(Errc::parse, "trailing characters after PD expression");
    if (cr.empty()) fail(Errc::parse, "PD expression has no crossings");
    return Diagram(std::move(cr), 0);
}

inline Diagram Diagram::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("crossings")) fail(Errc::parse, "diagram json: missing \"crossings\"");
    std::vector<Crossing> cr;
    for (const auto& t : j.at("crossings")) {
        if (!t.is_array() || t.size() != 4) fail(Errc::parse, "diagram json: each crossing is [a,b,c,d]");
        Crossing c;
        for (int k = 0; k < 4; ++k) c.port[k] = t[k].get<int>();
        cr.push_back(c);
    }
    int loops = j.value("free_loops", 0);
    if (loops < 0) fail(Errc::parse, "diagram json: free_loops must be >= 0");
    if (cr.empty() && loops == 0) fail(Errc::parse, "diagram json: empty diagram");
    return Diagram(std::move(cr), loops);
}

inline nlohmann::json Diagram::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cr_) arr.push_back({c.port[0], c.port[1], c.port[2], c.port[3]});
    return {{"crossings", arr}, {"free_loops", loops_}};
}

inline std::string Diagram::pd_string() const {
    std::ostringstream out;
    out << "PD[";
    for (int i = 0; i < n(); ++i) {
        if (i) out << ",";
        out << "X(" << cr_[i].port[0] << "," << cr_[i].port[1] << "," << cr_[i].port[2] << "," << cr_[i].port[3]
            << ")";
    }
    out << "]";
    if (loops_) out << " + " << loops_ << " loop(s)";
    return out.str();
}

/* Braid words: letter +g crosses strands g and g+1 with the left strand
 * passing over (an x-type, negative crossing under our sign rule);
 * letter -g is its inverse.  Strands run downward and the closure joins
 * each bottom end back to its top.  Untouched strands close into free
 * loops. */
inline Diagram Diagram::parse_braid(const std::vector<int>& word, int strands) {
    if (strands < 1) fail(Errc::parse, "braid: need at least one strand");
    for (int g : word)
        if (g == 0 || std::abs(g) >= strands) fail(Errc::parse, "braid letter out of range: " + std::to_string(g));

    std::vector<int> cur(strands + 1);
    std::iota(cur.begin(), cur.end(), 0);
    int next = strands + 1;
    std::vector<Crossing> cr;
    std::set<int> touched;
    for (int g : word) {
        int p = std::abs(g);
        int L = cur[p], R = cur[p + 1];
        int nl = next++, nr = next++;
        Crossing c;
        if (g > 0)
            c.port = {R, L, nl, nr}; // left over right: under-strand R -> nl
        else
            c.port = {L, nl, nr, R}; // right over left: under-strand L -> nr
        cr.push_back(c);
        touched.insert(p);
        touched.insert(p + 1);
        cur[p] = nl;
        cur[p + 1] = nr;
    }

    int loops = 0;
    std::map<int, int> rename;
    for (int t = 1; t <= strands; ++t) {
        if (!touched.count(t)) {
            ++loops;
            continue;
        }
        rename[cur[t]] = t; // close bottom label back to the top label
    }
    for (auto& c : cr)
        for (auto& a : c.port) {
            auto it = rename.find(a);
            if (it != rename.end()) a = it->second;
        }

    /* Compact labels to 1..m preserving order. */
    std::set<int> used;
    for (auto& c : cr)
        for (int a : c.port) used.insert(a);
    std::map<int, int> compact;
    int k = 1;
    for (int a : used) compact[a] = k++;
    for (auto& c : cr)
        for (auto& a : c.port) a = compact[a];

    if (cr.empty() && loops == 0) fail(Errc::parse, "braid: empty word on zero strands");
    return Diagram(std::move(cr), loops);
}

inline std::vector<int> parse_braid_word(const std::string& text) {
    std::vector<int> word;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        try {
            word.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            fail(Errc::parse, "braid word: bad letter '" + tok + "'");
        }
    }
    return word;
}

/* --- diagram surgery --------------------------------------------------- */

namespace detail {

inline int max_arc(const Diagram& d) {
    int m = 0;
    for (int a : d.arcs()) m = std::max(m, a);
    return m;
}

/* Find the occurrence of an arc at its entering (incoming=true) or
 * exiting endpoint. */
inline std::pair<int, int> find_endpoint(const std::vector<Crossing>& cr, int from, bool incoming) {
    for (int i = 0; i < (int)cr.size(); ++i)
        for (int p = 0; p < 4; ++p)
            if (cr[i].port[p] == from && port_is_out(cr[i], p) != incoming) return {i, p};
    fail(Errc::domain, "arc " + std::to_string(from) + " has no " + (incoming ? "incoming" : "outgoing") + " endpoint");
}

inline void rewrite_port(std::vector<Crossing>& cr, int from, bool incoming, int to) {
    auto [i, p] = find_endpoint(cr, from, incoming);
    cr[i].port[p] = to;
}

} // namespace detail

inline Diagram disjoint_union(const Diagram& d1, const Diagram& d2) {
    int off = detail::max_arc(d1);
    std::vector<Crossing> cr = d1.crossings();
    for (Crossing c : d2.crossings()) {
        for (auto& a : c.port) a += off;
        cr.push_back(c);
    }
    return Diagram(std::move(cr), d1.free_loops() + d2.free_loops());
}

/* Join two diagrams along chosen arcs: cut arc1 in d1 and arc2 in d2 and
 * cross-connect respecting orientations. */
inline Diagram connected_sum(const Diagram& d1, const Diagram& d2, int arc1, int arc2) {
    if (!std::binary_search(d1.arcs().begin(), d1.arcs().end(), arc1))
        fail(Errc::domain, "connected_sum: arc not in first diagram");
    if (!std::binary_search(d2.arcs().begin(), d2.arcs().end(), arc2))
        fail(Errc::domain, "connected_sum: arc not in second diagram");
    if (!d1.is_closed() || !d2.is_closed()) fail(Errc::domain, "connected_sum needs closed diagrams");

    int off = detail::max_arc(d1);
    std::vector<Crossing> cr = d1.crossings();
    for (Crossing c : d2.crossings()) {
        for (auto& a : c.port) a += off;
        cr.push_back(c);
    }
    int b = arc2 + off;
    /* arc1's outgoing half now flows into arc2's incoming half and vice
     * versa: rewrite the incoming endpoint of each to the other label.
     * Locate both endpoints before writing so the rewrites cannot
     * capture each other. */
    auto e1 = detail::find_endpoint(cr, arc1, true);
    auto e2 = detail::find_endpoint(cr, b, true);
    cr[e1.first].port[e1.second] = b;
    cr[e2.first].port[e2.second] = arc1;
    return Diagram(std::move(cr), d1.free_loops() + d2.free_loops());
}

/* Reverse the orientation of one link component (named by its
 * representative arc).  Under-passages of the component rotate their
 * tuple by two positions; returns the new diagram and the integer l
 * with x(new) = x(old) - 2l. */
inline std::pair<Diagram, int> reverse_component(const Diagram& d, int comp_arc) {
    if (!d.is_closed()) fail(Errc::domain, "reverse_component needs a closed diagram");
    int rep = d.component_of_arc(comp_arc);
    std::vector<Crossing> cr = d.crossings();
    for (auto& c : cr) {
        if (d.component_of_arc(c.port[0]) == rep) {
            c.port = {c.port[2], c.port[3], c.port[0], c.port[1]};
        }
    }
    Diagram out(std::move(cr), d.free_loops());
    int twol = d.x() - out.x();
    if (twol % 2 != 0 || out.y() - d.y() != twol)
        fail(Errc::internal, "reverse_component: crossing counts did not shift by 2l");
    return {out, twol / 2};
}

enum class CurlKind { left, right }; // left: 0-smoothing splits off the loop (y+1); right: x+1

struct R1Result {
    Diagram diagram;
    int crossing;   // index of the new crossing (appended last)
    int loop_arc;   // label of the small loop
    CurlKind kind;
};

/* Insert a curl on an arc, or on a free loop (loop = negative id -k). */
inline R1Result apply_r1(const Diagram& d, int arc, CurlKind kind) {
    std::vector<Crossing> cr = d.crossings();
    int loops = d.free_loops();
    int base = detail::max_arc(d);
    Crossing c;
    if (arc < 0) {
        int k = -arc;
        if (k < 1 || k > loops) fail(Errc::domain, "apply_r1: no such free loop");
        --loops;
        int a = base + 1, l = base + 2;
        c.port = kind == CurlKind::left ? std::array<int, 4>{a, a, l, l} : std::array<int, 4>{a, l, l, a};
        cr.push_back(c);
        int idx = (int)cr.size() - 1;
        return {Diagram(std::move(cr), loops), idx, l, kind};
    }
    if (!std::binary_search(d.arcs().begin(), d.arcs().end(), arc)) fail(Errc::domain, "apply_r1: arc not in diagram");
    int b = base + 1, l = base + 2;
    /* The strand a..b with the loop l: left curl X(a,b,l,l) is positive
     * with the 0-smoothing splitting l off; right curl X(a,l,l,b) is
     * negative with the 1-smoothing splitting l off. */
    c.port = kind == CurlKind::left ? std::array<int, 4>{arc, b, l, l} : std::array<int, 4>{arc, l, l, b};
    detail::rewrite_port(cr, arc, true, b);
    cr.push_back(c);
    int idx = (int)cr.size() - 1;
    return {Diagram(std::move(cr), loops), idx, l, kind};
}

/* Recognize a curl crossing (for movie validation): a crossing with a
 * repeated label is a curl; the repeated positions determine the kind. */
inline CurlKind classify_curl(const Crossing& c) {
    auto same = [&](int i, int j) { return c.port[i] == c.port[j]; };
    if (same(2, 3) || same(0, 1)) return CurlKind::left;
    if (same(1, 2) || same(0, 3)) return CurlKind::right;
    fail(Errc::unsupported, "crossing is not a curl");
}

struct R2Result {
    Diagram diagram;
    int c_first;  // crossing with the strands-picture as its (0,*) face
    int c_second;
    int mid_over, mid_under; // bigon arc labels (over-strand's middle, under's)
};

/* Push arc `over` across arc `under` (both must be distinct arcs or free
 * loops given as negative ids), appending a positive and a negative
 * crossing.  The (0,1) face of the pair reproduces the original circles. */
inline R2Result apply_r2(const Diagram& d, int over, int under) {
    if (over == under && over >= 0) fail(Errc::domain, "apply_r2: need two distinct strands");
    std::vector<Crossing> cr = d.crossings();
    int loops = d.free_loops();
    int next = detail::max_arc(d) + 1;

    /* Each strand contributes: entry label, middle label, exit label.
     * A free loop uses one wrap label for both entry and exit. */
    auto make_strand = [&](int s) -> std::array<int, 3> {
        if (s < 0) {
            int k = -s;
            if (k < 1 || k > loops) fail(Errc::domain, "apply_r2: no such free loop");
            --loops;
            int wrap = next++, mid = next++;
            return {wrap, mid, wrap};
        }
        if (!std::binary_search(d.arcs().begin(), d.arcs().end(), s))
            fail(Errc::domain, "apply_r2: arc not in diagram");
        int mid = next++, exit = next++;
        detail::rewrite_port(cr, s, true, exit);
        return {s, mid, exit};
    };
    auto a = make_strand(over);  // a1, m_a, a2
    auto b = make_strand(under); // b1, m_b, b2

    Crossing c1, c2;
    c1.port = {b[0], a[1], b[1], a[0]}; // positive: over runs a1 -> m_a
    c2.port = {b[1], a[1], b[2], a[2]}; // negative: over runs m_a -> a2
    cr.push_back(c1);
    cr.push_back(c2);
    int nfirst = (int)cr.size() - 2;
    return {Diagram(std::move(cr), loops), nfirst, nfirst + 1, a[1], b[1]};
}

/* --- adequacy ---------------------------------------------------------- */

inline bool Diagram::is_plus_adequate() const {
    if (!is_closed()) fail(Errc::domain, "adequacy needs a closed diagram");
    uint32_t all = n() >= 32 ? ~0u : (1u << n()) - 1;
    int base = resolve(all).count();
    for (int a = 0; a < n(); ++a)
        if (resolve(all & ~(1u << a)).count() != base - 1) return false;
    return true;
}

inline bool Diagram::is_minus_adequate() const {
    if (!is_closed()) fail(Errc::domain, "adequacy needs a closed diagram");
    int base = resolve(0).count();
    for (int a = 0; a < n(); ++a)
        if (resolve(1u << a).count() != base - 1) return false;
    return true;
}

} // namespace linkhom

#endif
