#ifndef LINKHOM_FIXTURES_HPP
#define LINKHOM_FIXTURES_HPP

/* The shipped fixture set: a couple dozen small diagrams built from PD
 * codes, braid closures, sums and unions, plus invariance pairs, skein
 * triples, movie scripts, and coefficient modules.  The CLI's
 * `check --all`, the unit tests, and the acceptance runner all draw
 * from this one list so they cannot drift apart.
 */

#include "linkhom/cobordism.hpp"
#include "linkhom/diagram.hpp"
#include "linkhom/invariants.hpp"

#include <string>
#include <vector>

namespace linkhom::fixtures {

struct NamedDiagram {
    std::string name;
    Diagram d;
};

/* Diagrams with at most 8 crossings.  Braid letters: +g crosses strands
 * g, g+1 with the left strand passing over (a negative crossing for the
 * standard orientation), -g the reverse. */
inline const std::vector<NamedDiagram>& diagrams() {
    static const std::vector<NamedDiagram> all = [] {
        std::vector<NamedDiagram> v;
        auto pd = [](const char* s) { return Diagram::parse_pd(s); };
        auto br = [](std::vector<int> w, int s) { return Diagram::parse_braid(w, s); };

        Diagram unknot0 = br({}, 1);
        Diagram lcurl = pd("PD[X(1,1,2,2)]");
        Diagram rcurl = pd("PD[X(1,2,2,1)]");
        Diagram tref_br = br({1, 1, 1}, 2);
        Diagram tref_pd = pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]");
        Diagram tref_mir = br({-1, -1, -1}, 2);
        Diagram fig8_pd = pd("PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]");
        Diagram fig8_br = br({1, -2, 1, -2}, 3);
        Diagram hopf_l = br({1, 1}, 2);
        Diagram hopf_r = br({-1, -1}, 2);

        v.push_back({"unknot_0", unknot0});
        v.push_back({"unknot_lcurl", lcurl});
        v.push_back({"unknot_rcurl", rcurl});
        v.push_back({"unknot_r2", apply_r2(lcurl, 1, 2).diagram});
        v.push_back({"trefoil_left_braid", tref_br});
        v.push_back({"trefoil_left_pd", tref_pd});
        v.push_back({"trefoil_left_r1", apply_r1(tref_pd, 1, CurlKind::right).diagram});
        v.push_back({"trefoil_right_braid", tref_mir});
        v.push_back({"fig8_pd", fig8_pd});
        v.push_back({"fig8_braid", fig8_br});
        v.push_back({"fig8_r2", apply_r2(fig8_br, 4, 5).diagram});
        v.push_back({"hopf_left", hopf_l});
        v.push_back({"hopf_right", hopf_r});
        v.push_back({"t2_4", br({1, 1, 1, 1}, 2)});
        v.push_back({"t2_5", br({1, 1, 1, 1, 1}, 2)});
        v.push_back({"t2_6", br({1, 1, 1, 1, 1, 1}, 2)});
        v.push_back({"t2_7", br({1, 1, 1, 1, 1, 1, 1}, 2)});
        v.push_back({"unlink2", br({}, 2)});
        v.push_back({"unlink2_crossed", br({1, -1}, 2)});
        v.push_back({"borromean_braid", br({1, -2, 1, -2, 1, -2}, 3)});
        v.push_back({"tref_fig8_sum", connected_sum(tref_pd, fig8_pd, 1, 1)});
        v.push_back({"hopf_tref_sum", connected_sum(hopf_l, tref_br, 1, 1)});
        v.push_back({"tref_tref_union", disjoint_union(tref_br, tref_mir)});
        v.push_back({"t2_5_unknot_union", disjoint_union(br({1, 1, 1, 1, 1}, 2), unknot0)});
        return v;
    }();
    return all;
}

inline const Diagram& get(const std::string& name) {
    for (const auto& nd : diagrams())
        if (nd.name == name) return nd.d;
    fail(Errc::domain, "unknown fixture: " + name);
}

/* Larger diagrams for timing runs, kept out of the main list. */
inline Diagram perf_9() { return Diagram::parse_braid({1, -2, 1, -2, 1, -2, 1, -2, 1}, 3); }
inline Diagram perf_10() { return Diagram::parse_braid({1, -2, 1, -2, 1, -2, 1, -2, 1, -2}, 3); }

/* Pairs of distinct diagrams presenting the same oriented link. */
struct InvariancePair {
    std::string name;
    Diagram a, b;
};
inline std::vector<InvariancePair> invariance_pairs() {
    return {
        {"unknot curls", get("unknot_lcurl"), get("unknot_rcurl")},
        {"unknot r2 slide", get("unknot_r2"), get("unknot_0")},
        {"trefoil braid vs pd", get("trefoil_left_braid"), get("trefoil_left_pd")},
        {"trefoil r1 kink", get("trefoil_left_pd"), get("trefoil_left_r1")},
        {"fig8 pd vs braid", get("fig8_pd"), get("fig8_braid")},
        {"fig8 r2 slide", get("fig8_braid"), get("fig8_r2")},
        {"unlink braids", get("unlink2"), get("unlink2_crossed")},
    };
}

/* Skein triples (L+, L-, L0): identical diagrams except at one site,
 * carrying a positive crossing, a negative crossing, and the oriented
 * smoothing. */
struct SkeinTriple {
    std::string name;
    Diagram pos, neg, smooth;
};
inline std::vector<SkeinTriple> skein_triples() {
    auto br = [](std::vector<int> w, int s) { return Diagram::parse_braid(w, s); };
    return {
        {"two strands", br({-1}, 2), br({1}, 2), br({}, 2)},
        {"hopf site", br({1, -1}, 2), br({1, 1}, 2), br({1}, 2)},
        {"trefoil site", br({1, 1, -1}, 2), br({1, 1, 1}, 2), br({1, 1}, 2)},
    };
}

/* Movie scripts (documented in the README; also shipped as files). */
inline const char* sphere_movie_json() {
    return R"({"initial":{"crossings":[],"free_loops":0},"moves":[{"op":"birth"},{"op":"death","loop":-1}]})";
}
inline const char* torus_movie_json() {
    return R"({"initial":{"crossings":[],"free_loops":0},"moves":[{"op":"birth"},{"op":"fusion","arcs":[-1,-1]},{"op":"fusion","arcs":[-1,-2]},{"op":"death","loop":-1}]})";
}
inline const char* genus2_movie_json() {
    return R"({"initial":{"crossings":[],"free_loops":0},"moves":[{"op":"birth"},{"op":"fusion","arcs":[-1,-1]},{"op":"fusion","arcs":[-1,-2]},{"op":"fusion","arcs":[-1,-1]},{"op":"fusion","arcs":[-1,-2]},{"op":"death","loop":-1}]})";
}
inline const char* trefoil_r1_movie_json() {
    return R"({"initial":"PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]","moves":[{"op":"r1_add","arc":1,"kind":"right"},{"op":"r1_remove","crossing":3}]})";
}
inline const char* hopf_r2_movie_json() {
    return R"({"initial":"PD[X(2,1,3,4),X(4,3,1,2)]","moves":[{"op":"r2_add","over":3,"under":4},{"op":"r2_remove","crossings":[2,3]}]})";
}
inline const char* hopf_sphere_movie_json() {
    return R"({"initial":"PD[X(2,1,3,4),X(4,3,1,2)]","moves":[{"op":"birth"},{"op":"death","loop":-1}]})";
}

/* Coefficient modules for the tangle theory (also shipped as files). */
inline const char* module_a_json() {
    return R"({"gens":[{"deg":1},{"deg":-1}],"X":[[0,0],[1,0]],"relations":[]})";
}
inline const char* module_a_c0_json() {
    return R"({"gens":[{"deg":1},{"deg":-1}],"X":[[0,0],[1,0]],"relations":[{"deg":3,"coeffs":[1,0]},{"deg":1,"coeffs":[0,1]}]})";
}
inline const char* module_2tor_json() {
    return R"({"gens":[{"deg":1},{"deg":-1}],"X":[[0,0],[1,0]],"relations":[{"deg":1,"coeffs":[2,0]},{"deg":-1,"coeffs":[0,2]}]})";
}

/* The left trefoil cut open along one arc: a 1-string tangle. */
inline const char* trefoil_tangle_pd() { return "PD[X(1,4,2,5),X(3,6,4,7),X(5,2,6,3)]"; }

/* The full structural property suite over the fixture set: the checks
 * that must hold for every diagram, plus the pairwise ones on chosen
 * pairs.  Deterministic order. */
inline std::vector<PropertyReport> property_suite() {
    std::vector<PropertyReport> out;
    auto tag = [](PropertyReport r, const std::string& which) {
        r.name += ":" + which;
        return r;
    };
    for (const auto& nd : diagrams()) {
        out.push_back(tag(check_d2(nd.d, Ring::Z), nd.name));
        out.push_back(tag(check_d2(nd.d, Ring::ZC), nd.name));
        out.push_back(tag(check_euler_c0(nd.d), nd.name));
        out.push_back(tag(check_euler_zc(nd.d), nd.name));
        out.push_back(tag(check_mirror(nd.d), nd.name));
        out.push_back(tag(check_parity(nd.d), nd.name));
    }
    const char* kpairs[5][2] = {{"unknot_lcurl", "unknot_rcurl"},
                                {"trefoil_left_braid", "hopf_left"},
                                {"fig8_pd", "unknot_lcurl"},
                                {"trefoil_left_pd", "trefoil_right_braid"},
                                {"hopf_left", "hopf_right"}};
    for (auto& p : kpairs)
        out.push_back(tag(check_kunneth(get(p[0]), get(p[1])), std::string(p[0]) + "+" + p[1]));
    for (const char* name : {"hopf_left", "borromean_braid", "unlink2_crossed"}) {
        const Diagram& d = get(name);
        out.push_back(tag(check_orientation_reversal(d, d.component_reps().at(1)), name));
    }
    for (const char* name : {"hopf_left", "trefoil_left_braid", "t2_4", "t2_5", "t2_6", "t2_7"}) {
        out.push_back(tag(check_adequacy_bound(get(name)), name));
        out.push_back(tag(check_ss_degeneration(get(name)), name));
    }
    out.push_back(tag(check_connected_sum_ranks(get("trefoil_left_braid"), get("fig8_pd"), 1, 1),
                      "trefoil_left_braid+fig8_pd"));
    out.push_back(
        tag(check_connected_sum_ranks(get("hopf_left"), get("trefoil_left_braid"), 1, 1), "hopf_left+trefoil"));
    return out;
}

/* CSV rows (name,pd) for every fixture expressible as a bare PD code. */
inline std::string knots_csv() {
    std::string out = "name,pd\n";
    for (const auto& nd : diagrams()) {
        if (nd.d.free_loops() > 0) continue; // free loops have no PD notation
        out += nd.name + "," + nd.d.pd_string() + "\n";
    }
    return out;
}

} // namespace linkhom::fixtures

#endif
