#include "doctest.h"

#include <linkhom/fixtures.hpp>
#include <linkhom/homology.hpp>
#include <linkhom/invariants.hpp>

#include "expected_tables.hpp"

using namespace linkhom;

namespace {

AbGroup Z(int rank = 1) { return AbGroup{rank, {}}; }
AbGroup Z2() { return AbGroup{0, {Int(2)}}; }
AbGroup Z_plus_Z2(int rank = 1) { return AbGroup{rank, {Int(2)}}; }

const Diagram& fx(const char* name) { return fixtures::get(name); }

} // namespace

TEST_CASE("unknot homology") {
    SUBCASE("c = 0: Z at (0,-1) and (0,1)") {
        BigradedGroups h = homology_z(fx("unknot_0"));
        BigradedGroups want;
        want.groups[{0, -1}] = Z();
        want.groups[{0, 1}] = Z();
        CHECK(h == want);
    }
    SUBCASE("Z[c]: rank 1 at j=-1, rank 2 towers above") {
        auto [jlo, jhi] = default_window_zc(fx("unknot_0"));
        CHECK(jlo == -1);
        CHECK(jhi == 7);
        BigradedGroups h = homology_zc(fx("unknot_0"), jlo, jhi);
        BigradedGroups want;
        want.groups[{0, -1}] = Z(1);
        for (int j = 1; j <= 7; j += 2) want.groups[{0, j}] = Z(2);
        CHECK(h == want);
    }
}

TEST_CASE("two-component unlink homology, c = 0") {
    BigradedGroups h = homology_z(fx("unlink2"));
    BigradedGroups want;
    want.groups[{0, -2}] = Z(1);
    want.groups[{0, 0}] = Z(2);
    want.groups[{0, 2}] = Z(1);
    CHECK(h == want);

    // The crossed presentation (one +, one - crossing) agrees.
    CHECK(homology_z(fx("unlink2_crossed")) == want);
}

TEST_CASE("hopf link homology, c = 0, both chiralities") {
    BigradedGroups left = homology_z(fx("hopf_left"));
    BigradedGroups want;
    want.groups[{0, 0}] = Z();
    want.groups[{0, -2}] = Z();
    want.groups[{-2, -4}] = Z();
    want.groups[{-2, -6}] = Z();
    CHECK(left == want);
    CHECK(left == expected::t2k_z(2));

    BigradedGroups right = homology_z(fx("hopf_right"));
    BigradedGroups wantr;
    wantr.groups[{0, 0}] = Z();
    wantr.groups[{0, 2}] = Z();
    wantr.groups[{2, 4}] = Z();
    wantr.groups[{2, 6}] = Z();
    CHECK(right == wantr);
}

TEST_CASE("trefoil homology, c = 0, both chiralities") {
    BigradedGroups left = homology_z(fx("trefoil_left_braid"));
    BigradedGroups want;
    want.groups[{0, -1}] = Z();
    want.groups[{0, -3}] = Z();
    want.groups[{-2, -5}] = Z();
    want.groups[{-2, -7}] = Z2();
    want.groups[{-3, -9}] = Z();
    CHECK(left == want);
    CHECK(left == expected::t2k_z(3));

    // The same link from an explicit crossing list.
    CHECK(homology_z(fx("trefoil_left_pd")) == want);

    BigradedGroups right = homology_z(fx("trefoil_right_braid"));
    BigradedGroups wantr;
    wantr.groups[{0, 1}] = Z();
    wantr.groups[{0, 3}] = Z();
    wantr.groups[{2, 5}] = Z();
    wantr.groups[{3, 7}] = Z2();
    wantr.groups[{3, 9}] = Z();
    CHECK(right == wantr);
}

TEST_CASE("trefoil homology over Z[c]") {
    const Diagram& d = fx("trefoil_left_braid");
    auto [jlo, jhi] = default_window_zc(d);
    CHECK(jlo == -9);
    CHECK(jhi == 5);
    BigradedGroups h = homology_zc(d, jlo, jhi);

    // Spot values straight from the module description
    // H^0 = R{3}+R{1}, H^{-2} = (R/2R){7}+R{5}, H^{-3} = R{9}.
    CHECK(h.at(0, -3) == Z(1));
    CHECK(h.at(0, -1) == Z(2));
    CHECK(h.at(-1, -5) == AbGroup{});
    CHECK(h.at(-2, -7) == Z2());
    CHECK(h.at(-2, -5) == Z_plus_Z2());
    CHECK(h.at(-3, -9) == Z(1));
    CHECK(h.at(-3, -7) == Z(1));

    // Full window against the tower expansion.
    CHECK(h == expected::t2k_zc(3, jlo, jhi));
}

TEST_CASE("torus link tables for k up to 5") {
    for (int k = 2; k <= 5; ++k) {
        CAPTURE(k);
        std::vector<int> word(k, 1);
        Diagram d = Diagram::parse_braid(word, 2);
        CHECK(homology_z(d) == expected::t2k_z(k));
    }
    // One Z[c] instance beyond the trefoil.
    Diagram t4 = Diagram::parse_braid({1, 1, 1, 1}, 2);
    auto [jlo, jhi] = default_window_zc(t4);
    CHECK(homology_zc(t4, jlo, jhi) == expected::t2k_zc(4, jlo, jhi));
}

TEST_CASE("window validation for the Z[c] theory") {
    const Diagram& d = fx("trefoil_left_braid");
    try {
        homology_zc(d, -7, 5); // j_min is -9; starting above it loses towers
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == Errc::domain);
    }
}

TEST_CASE("worker threads do not change the answer") {
    const Diagram& d = fx("trefoil_left_braid");
    auto [jlo, jhi] = default_window_zc(d);
    BigradedComplex c1 = assemble_complex(d, Ring::ZC);
    BigradedComplex c3 = assemble_complex(d, Ring::ZC);
    CHECK(all_homology(c1, jlo, jhi, 1) == all_homology(c3, jlo, jhi, 3));
}

TEST_CASE("homology presentations agree with the group computation") {
    const Diagram& d = fx("trefoil_left_braid");
    BigradedComplex cx = assemble_complex(d, Ring::ZC);
    cx.prepare(-9, 5);
    CHECK(hom_presentation(cx, -2, -7).group() == Z2());
    CHECK(hom_presentation(cx, 0, -3).group() == Z(1));
    CHECK(hom_presentation(cx, -1, -5).group() == AbGroup{});

    // The identity chain map induces an isomorphism.
    HomPresentation hp = hom_presentation(cx, -2, -7);
    int n = cx.dim(-2, -7);
    SparseMat id(n, n);
    for (int k = 0; k < n; ++k) id.add(k, k, 1);
    InducedMap m = induced_map(hp, hp, id);
    CHECK(m.iso());
    CHECK(m.src == Z2());
}

TEST_CASE("multiplication by c on homology") {
    SUBCASE("unknot: injection of the X tower into rank 2") {
        BigradedComplex cx = assemble_complex(fx("unknot_0"), Ring::ZC);
        InducedMap m = c_action(cx, 0, -1, -1, 7);
        CHECK(m.src == Z(1));
        CHECK(m.dst == Z(2));
        CHECK(m.injective());
        CHECK_FALSE(m.surjective());
        CHECK(m.cokernel == Z(1));

        // One step up the tower multiplication by c is an isomorphism.
        InducedMap m2 = c_action(cx, 0, 1, -1, 7);
        CHECK(m2.src == Z(2));
        CHECK(m2.dst == Z(2));
        CHECK(m2.iso());
    }
    SUBCASE("trefoil: the 2-torsion tower maps injectively") {
        BigradedComplex cx = assemble_complex(fx("trefoil_left_braid"), Ring::ZC);
        InducedMap m = c_action(cx, -2, -7, -9, 5);
        CHECK(m.src == Z2());
        CHECK(m.dst == Z_plus_Z2());
        CHECK(m.injective());
        CHECK(m.cokernel == Z(1));
    }
    SUBCASE("window bounds are enforced") {
        BigradedComplex cx = assemble_complex(fx("unknot_0"), Ring::ZC);
        try {
            c_action(cx, 0, 7, -1, 7); // target j = 9 leaves the window
            FAIL("expected a domain error");
        } catch (const Error& e) {
            CHECK(e.kind() == Errc::domain);
        }
    }
}

TEST_CASE("homological length and the crossing bound") {
    CHECK(homological_length(homology_z(fx("unknot_0"))) == 0);
    CHECK(homological_length(homology_z(fx("trefoil_left_braid"))) == 3);
    CHECK(crossing_lower_bound(homology_z(fx("hopf_left"))) == 2);
    CHECK(homological_length(BigradedGroups{}) == 0);
}

TEST_CASE("figure-eight homology is mirror self-dual and presentation independent") {
    BigradedGroups hp = homology_z(fx("fig8_pd"));
    BigradedGroups hb = homology_z(fx("fig8_braid"));
    CHECK(hp == hb);

    // Amphichiral: the table maps to itself under the mirror rules.
    for (const auto& [ij, g] : hp.groups) {
        CHECK(hp.at(-ij.first, -ij.second).rank == g.rank);
        CHECK(hp.at(1 - ij.first, -ij.second).torsion == g.torsion);
    }

    // Alternating 4-crossing knot: homological length meets the bound.
    CHECK(homological_length(hp) == 4);
}
