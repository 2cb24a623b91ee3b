#ifndef LINKHOM_HOMOLOGY_HPP
#define LINKHOM_HOMOLOGY_HPP

/* Bigraded homology of the assembled complexes, induced maps, and the
 * helpers for presented (not necessarily free) chain groups.
 *
 * Everything is exact: ranks and invariant factors come from Smith
 * normal form over Z.  A complex type CX must provide
 *   ring(), i_min(), i_max(), j_min(), prepare(jlo,jhi),
 *   basis(i,j) (ordered keys), dim(i,j), differential(i,j)
 * which both BigradedComplex and TwistReducedComplex do.
 */

#include "linkhom/cube.hpp"
#include "linkhom/laurent.hpp"
#include "linkhom/matrix.hpp"

#include <json.hpp>

#include <atomic>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace linkhom {

struct AbGroup {
    int rank = 0;
    std::vector<Int> torsion; // invariant factors > 1, divisibility chain

    bool trivial() const { return rank == 0 && torsion.empty(); }
    bool operator==(const AbGroup&) const = default;

    std::string str() const {
        if (trivial()) return "0";
        std::ostringstream out;
        bool first = true;
        if (rank > 0) {
            out << "Z";
            if (rank > 1) out << "^" << rank;
            first = false;
        }
        for (const Int& d : torsion) {
            if (!first) out << "+";
            out << "Z/" << d.get_str();
            first = false;
        }
        return out.str();
    }
};

/* Z^gens / colspan(rel). */
inline AbGroup presented_group(const SparseMat& rel, int gens) {
    if (rel.rows() != gens) fail(Errc::internal, "presented_group: ambient mismatch");
    SmithDecomposition s = smith(rel);
    AbGroup g;
    g.rank = gens - s.rank;
    g.torsion = s.torsion();
    return g;
}

/* Columns generating the lattice { v : A v in colspan(B) }. */
inline SparseMat preimage_lattice(const SparseMat& a, const SparseMat& b) {
    if (a.rows() != b.rows()) fail(Errc::internal, "preimage_lattice: row mismatch");
    SmithDecomposition s = smith(hcat(a, b), true);
    auto kb = kernel_basis(s);
    SparseMat out(a.cols(), (int)kb.size());
    for (int c = 0; c < (int)kb.size(); ++c)
        for (int r = 0; r < a.cols(); ++r) out.add(r, c, kb[c][r]);
    return out;
}

/* The group generated by the columns of P inside Z^n / colspan(R),
 * i.e. (colspan(P) + colspan(R)) / colspan(R). */
inline AbGroup subgroup_mod(const SparseMat& p, const SparseMat& r) {
    return presented_group(preimage_lattice(p, r), p.cols());
}

/* --- homology of free complexes ---------------------------------------- */

template <class CX> AbGroup homology_at(const CX& cx, int i, int j) {
    SmithDecomposition s_out = smith(cx.differential(i, j));
    SmithDecomposition s_in = smith(cx.differential(i - 1, j));
    AbGroup g;
    g.rank = cx.dim(i, j) - s_out.rank - s_in.rank;
    if (g.rank < 0) fail(Errc::internal, "negative homology rank");
    g.torsion = s_in.torsion();
    return g;
}

struct BigradedGroups {
    Ring ring = Ring::Z;
    int jlo = 0, jhi = 0;
    std::map<std::pair<int, int>, AbGroup> groups; // nontrivial entries only

    const AbGroup& at(int i, int j) const {
        static const AbGroup zero;
        auto it = groups.find({i, j});
        return it == groups.end() ? zero : it->second;
    }

    bool operator==(const BigradedGroups& o) const { return groups == o.groups; }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [ij, g] : groups) {
            nlohmann::json t;
            for (const Int& d : g.torsion) t.push_back(d.get_str());
            arr.push_back({{"i", ij.first}, {"j", ij.second}, {"rank", g.rank}, {"torsion", t}});
        }
        return arr;
    }

    /* Free-part Poincare polynomial, sum of rank * t^i q^j. */
    std::string poincare() const {
        std::ostringstream out;
        bool first = true;
        for (const auto& [ij, g] : groups) {
            if (g.rank == 0) continue;
            if (!first) out << " + ";
            first = false;
            if (g.rank != 1) out << g.rank << "*";
            bool needs_sep = false;
            if (ij.first != 0) {
                out << "t^" << ij.first;
                needs_sep = true;
            }
            if (ij.second != 0) {
                if (needs_sep) out << "*";
                out << "q^" << ij.second;
                needs_sep = true;
            }
            if (!needs_sep) out << "1";
        }
        if (first) out << "0";
        return out.str();
    }

    /* Graded Euler characteristic sum (-1)^i q^j rank as a Laurent
     * polynomial (free parts only; correct over Z where torsion cancels
     * in ranks, and the right notion over Z[c] per (i,j) slice). */
    Laurent euler() const {
        Laurent e;
        for (const auto& [ij, g] : groups) {
            Int coef = (ij.first % 2 == 0) ? g.rank : -g.rank;
            e.add_term(coef, ij.second);
        }
        return e;
    }
};

/* Compute every H^{i,j} with j in [jlo, jhi].  jobs > 1 distributes the
 * per-bidegree Smith computations over worker threads. */
template <class CX> BigradedGroups all_homology(CX& cx, int jlo, int jhi, int jobs = 1) {
    cx.prepare(jlo, jhi);
    BigradedGroups out;
    out.ring = cx.ring();
    out.jlo = jlo;
    out.jhi = jhi;

    struct Task {
        int i, j;
        int rank = 0;
        std::vector<Int> tors;
        bool nontrivial = false;
    };
    std::vector<Task> tasks;
    for (int i = cx.i_min() - 1; i <= cx.i_max(); ++i)
        for (int j = jlo; j <= jhi; ++j)
            if (cx.dim(i, j) > 0 && cx.dim(i + 1, j) > 0) tasks.push_back({i, j});

    auto run_task = [&](Task& t) {
        SmithDecomposition s = smith(cx.differential(t.i, t.j));
        t.rank = s.rank;
        t.tors = s.torsion();
        t.nontrivial = true;
    };

    if (jobs <= 1 || tasks.size() < 2) {
        for (auto& t : tasks) run_task(t);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(jobs);
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                try {
                    while (true) {
                        size_t k = next.fetch_add(1);
                        if (k >= tasks.size()) break;
                        run_task(tasks[k]);
                    }
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    std::map<std::pair<int, int>, Task*> by_ij;
    for (auto& t : tasks) by_ij[{t.i, t.j}] = &t;
    auto rank_of = [&](int i, int j) -> int {
        auto it = by_ij.find({i, j});
        return it == by_ij.end() ? 0 : it->second->rank;
    };
    auto tors_of = [&](int i, int j) -> std::vector<Int> {
        auto it = by_ij.find({i, j});
        return it == by_ij.end() ? std::vector<Int>{} : it->second->tors;
    };

    for (int i = cx.i_min(); i <= cx.i_max(); ++i)
        for (int j = jlo; j <= jhi; ++j) {
            int d = cx.dim(i, j);
            if (d == 0) continue;
            AbGroup g;
            g.rank = d - rank_of(i, j) - rank_of(i - 1, j);
            if (g.rank < 0) fail(Errc::internal, "negative homology rank");
            g.torsion = tors_of(i - 1, j);
            if (!g.trivial()) out.groups[{i, j}] = g;
        }
    return out;
}

/* --- induced maps on homology ------------------------------------------ */

/* Homology at one bidegree as a presented abelian group: generators are
 * a kernel basis of the outgoing differential, relations the incoming
 * boundaries in those coordinates. */
struct HomPresentation {
    int gens = 0;
    SparseMat rel{0, 0};
    SmithDecomposition s_out; // of d^i, with transforms (for coordinates)
    std::vector<std::vector<Int>> kbasis;

    AbGroup group() const { return presented_group(rel, gens); }
};

template <class CX> HomPresentation hom_presentation(const CX& cx, int i, int j) {
    HomPresentation h;
    SparseMat dout = cx.differential(i, j);
    h.s_out = smith(dout, true);
    h.kbasis = kernel_basis(h.s_out);
    h.gens = (int)h.kbasis.size();

    SparseMat din = cx.differential(i - 1, j);
    h.rel = SparseMat(h.gens, din.cols());
    for (int c = 0; c < din.cols(); ++c) {
        std::vector<Int> col(din.rows(), 0);
        for (const auto& t : din.triplets())
            if (t.col == c) col[t.row] = t.val;
        std::vector<Int> coords = kernel_coords(h.s_out, col);
        for (int r = 0; r < h.gens; ++r) h.rel.add(r, c, coords[r]);
    }
    return h;
}

/* A map between presented groups, with its kernel/cokernel groups. */
struct InducedMap {
    AbGroup src, dst;
    AbGroup kernel, cokernel;

    bool injective() const { return kernel.trivial(); }
    bool surjective() const { return cokernel.trivial(); }
    bool iso() const { return injective() && surjective(); }
};

/* Build the induced map on homology of a chain-level block F that sends
 * (i,j) of src to the presented bidegree of dst. */
inline InducedMap induced_map(const HomPresentation& hsrc, const HomPresentation& hdst, const SparseMat& f) {
    SparseMat m(hdst.gens, hsrc.gens);
    for (int g = 0; g < hsrc.gens; ++g) {
        std::vector<Int> img = f.apply(hsrc.kbasis[g]);
        std::vector<Int> coords = kernel_coords(hdst.s_out, img); // fails if img is not a cycle
        for (int r = 0; r < hdst.gens; ++r) m.add(r, g, coords[r]);
    }
    InducedMap out;
    out.src = hsrc.group();
    out.dst = hdst.group();
    out.cokernel = presented_group(hcat(m, hdst.rel), hdst.gens);
    out.kernel = subgroup_mod(preimage_lattice(m, hdst.rel), hsrc.rel);
    return out;
}

/* Multiplication by c on H^{i,j} -> H^{i,j+2} over Z[c]. */
inline InducedMap c_action(BigradedComplex& cx, int i, int j, int jlo, int jhi) {
    if (cx.ring() != Ring::ZC) fail(Errc::domain, "c_action needs the Z[c] theory");
    if (j < jlo || j + 2 > jhi) fail(Errc::domain, "c_action: bidegrees outside window");
    cx.prepare(jlo, jhi);
    HomPresentation hs = hom_presentation(cx, i, j);
    HomPresentation hd = hom_presentation(cx, i, j + 2);
    return induced_map(hs, hd, cx.c_map(i, j));
}

} // namespace linkhom

#endif
