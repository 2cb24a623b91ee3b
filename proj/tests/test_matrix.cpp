#include "doctest.h"

#include <linkhom/homology.hpp>
#include <linkhom/matrix.hpp>

#include <random>

#include "oracles.hpp"

using namespace linkhom;

namespace {

SparseMat from_rows(int rows, int cols, const std::vector<std::vector<int>>& a) {
    SparseMat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (a[r][c] != 0) m.add(r, c, a[r][c]);
    return m;
}

DenseMat to_dense(const SparseMat& m) {
    DenseMat d(m.rows(), m.cols());
    for (const auto& t : m.triplets()) d(t.row, t.col) = t.val;
    return d;
}

bool is_diagonal_with(const DenseMat& d, const std::vector<Int>& diag) {
    for (int r = 0; r < d.rows(); ++r)
        for (int c = 0; c < d.cols(); ++c) {
            Int want = (r == c && r < (int)diag.size()) ? diag[r] : Int(0);
            if (d(r, c) != want) return false;
        }
    return true;
}

bool is_identity(const DenseMat& d) {
    if (d.rows() != d.cols()) return false;
    return is_diagonal_with(d, std::vector<Int>(d.rows(), Int(1)));
}

} // namespace

TEST_CASE("sparse matrix bookkeeping") {
    SparseMat m(3, 2);
    CHECK(m.is_zero());
    m.add(0, 1, 5);
    m.add(2, 0, -1);
    m.add(0, 1, -5); // cancels
    CHECK(m.nnz() == 1);
    CHECK(m.get(2, 0) == -1);
    CHECK(m.get(0, 1) == 0);

    std::vector<Int> y = m.apply({3, 7});
    CHECK(y == std::vector<Int>{0, 0, -3});

    SparseMat a = from_rows(2, 3, {{1, 2, 0}, {0, -1, 4}});
    SparseMat b = from_rows(3, 2, {{1, 0}, {0, 1}, {2, 2}});
    SparseMat p = a * b;
    CHECK(p.get(0, 0) == 1);
    CHECK(p.get(0, 1) == 2);
    CHECK(p.get(1, 0) == 8);
    CHECK(p.get(1, 1) == 7);

    CHECK((a - a).is_zero());

    SparseMat h = hcat(a, from_rows(2, 1, {{9}, {0}}));
    CHECK(h.cols() == 4);
    CHECK(h.get(0, 3) == 9);
    CHECK(h.get(0, 1) == 2);
}

TEST_CASE("dense matrix row and column operations") {
    DenseMat d = DenseMat::identity(3);
    d.row_add(0, 2, 4); // row0 += 4*row2
    CHECK(d(0, 2) == 4);
    d.col_add(2, 0, -4); // undoes it on the (0,2) slot
    CHECK(d(0, 2) == 0);
    d.row_swap(0, 1);
    CHECK(d(0, 1) == 1);
    CHECK(d(1, 0) == 1);
    d.row_negate(0);
    CHECK(d(0, 1) == -1);
}

TEST_CASE("smith normal form on fixed matrices") {
    SUBCASE("diag(2,3) has invariant factors 1, 6") {
        SmithDecomposition s = smith(from_rows(2, 2, {{2, 0}, {0, 3}}));
        CHECK(s.rank == 2);
        REQUIRE(s.diag.size() == 2);
        CHECK(s.diag[0] == 1);
        CHECK(s.diag[1] == 6);
        CHECK(s.torsion() == std::vector<Int>{6});
    }
    SUBCASE("[[2,4],[6,8]] has invariant factors 2, 4") {
        SmithDecomposition s = smith(from_rows(2, 2, {{2, 4}, {6, 8}}));
        REQUIRE(s.diag.size() == 2);
        CHECK(s.diag[0] == 2);
        CHECK(s.diag[1] == 4);
    }
    SUBCASE("zero and empty matrices") {
        CHECK(smith(SparseMat(3, 2)).rank == 0);
        CHECK(smith(SparseMat(0, 0)).rank == 0);
        CHECK(smith(SparseMat(0, 5)).rank == 0);
    }
    SUBCASE("negative pivots are normalized away") {
        SmithDecomposition s = smith(from_rows(1, 1, {{-7}}));
        REQUIRE(s.diag.size() == 1);
        CHECK(s.diag[0] == 7);
    }
}

TEST_CASE("smith transforms satisfy U*A*V = D with unimodular U, V") {
    std::mt19937 rng(20240917);
    std::uniform_int_distribution<int> val(-4, 4);
    for (int trial = 0; trial < 40; ++trial) {
        int rows = 1 + (int)(rng() % 5);
        int cols = 1 + (int)(rng() % 5);
        SparseMat a(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) a.add(r, c, val(rng));

        SmithDecomposition s = smith(a, true);
        DenseMat prod = s.U * to_dense(a) * s.V;
        CHECK(is_diagonal_with(prod, s.diag));
        CHECK(is_identity(s.U * s.Uinv));
        CHECK(is_identity(s.V * s.Vinv));

        // Rank against an independent fraction-free elimination.
        CHECK(s.rank == oracles::bareiss_rank(to_dense(a)));
    }
}

TEST_CASE("invariant factors match the determinant-divisor oracle") {
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> val(-5, 5);
    for (int trial = 0; trial < 25; ++trial) {
        int rows = 1 + (int)(rng() % 4);
        int cols = 1 + (int)(rng() % 4);
        SparseMat a(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) a.add(r, c, val(rng));
        SmithDecomposition s = smith(a);
        CHECK(s.diag == oracles::minor_invariant_factors(to_dense(a)));
    }
}

TEST_CASE("integer linear solve") {
    // x + 2y = 5, 3y = 6 has the integer solution (1, 2).
    SparseMat a = from_rows(2, 2, {{1, 2}, {0, 3}});
    SmithDecomposition s = smith(a, true);
    auto x = solve(s, {5, 6});
    REQUIRE(x.has_value());
    CHECK(a.apply(*x) == std::vector<Int>{5, 6});

    // 2x = 3 has no integer solution.
    SmithDecomposition s2 = smith(from_rows(1, 1, {{2}}), true);
    CHECK_FALSE(solve(s2, {3}).has_value());

    // Inconsistent system: rows (1,1) and (2,2) force b2 = 2*b1.
    SmithDecomposition s3 = smith(from_rows(2, 2, {{1, 1}, {2, 2}}), true);
    CHECK_FALSE(solve(s3, {1, 3}).has_value());
    auto x3 = solve(s3, {1, 2});
    REQUIRE(x3.has_value());
    CHECK(from_rows(2, 2, {{1, 1}, {2, 2}}).apply(*x3) == std::vector<Int>{1, 2});
}

TEST_CASE("kernel basis and kernel coordinates") {
    // [[1,1,1]] has a rank-2 kernel.
    SparseMat a = from_rows(1, 3, {{1, 1, 1}});
    SmithDecomposition s = smith(a, true);
    auto kb = kernel_basis(s);
    REQUIRE(kb.size() == 2);
    for (const auto& v : kb) CHECK(a.apply(v) == std::vector<Int>{0});

    // Coordinates recover an arbitrary integer combination.
    std::vector<Int> combo(3, 0);
    for (int i = 0; i < 3; ++i) combo[i] = 2 * kb[0][i] - 5 * kb[1][i];
    auto coords = kernel_coords(s, combo);
    CHECK(coords == std::vector<Int>{2, -5});

    // A full-rank map has an empty kernel basis.
    SmithDecomposition s2 = smith(from_rows(2, 2, {{1, 0}, {0, 2}}), true);
    CHECK(kernel_basis(s2).empty());
}

TEST_CASE("group presentations") {
    SUBCASE("free when there are no relations") {
        AbGroup g = presented_group(SparseMat(3, 0), 3);
        CHECK(g.rank == 3);
        CHECK(g.torsion.empty());
        CHECK(g.str() == "Z^3");
    }
    SUBCASE("Z^2 modulo (2,0) is Z + Z/2") {
        AbGroup g = presented_group(from_rows(2, 1, {{2}, {0}}), 2);
        CHECK(g.rank == 1);
        CHECK(g.torsion == std::vector<Int>{2});
        CHECK(g.str() == "Z+Z/2");
    }
    SUBCASE("Z modulo 1 is trivial") {
        AbGroup g = presented_group(from_rows(1, 1, {{1}}), 1);
        CHECK(g.trivial());
        CHECK(g.str() == "0");
    }
    SUBCASE("invariant factors are collected in a divisibility chain") {
        AbGroup g = presented_group(from_rows(2, 2, {{2, 0}, {0, 3}}), 2);
        CHECK(g.rank == 0);
        CHECK(g.torsion == std::vector<Int>{6});
    }
}

TEST_CASE("preimage lattices") {
    // { v : 2v in 4Z } = 2Z.
    SparseMat l = preimage_lattice(from_rows(1, 1, {{2}}), from_rows(1, 1, {{4}}));
    CHECK(l.rows() == 1);
    SmithDecomposition s = smith(l);
    REQUIRE(s.diag.size() == 1);
    CHECK(s.diag[0] == 2);

    // With B = 0 the lattice is exactly ker A.
    SparseMat k = preimage_lattice(from_rows(1, 3, {{1, 1, 1}}), SparseMat(1, 0));
    CHECK(smith(k).rank == 2);
    for (const auto& t : k.triplets()) (void)t; // columns live in Z^3
    CHECK(k.rows() == 3);
}

TEST_CASE("subgroup of a quotient group") {
    // <2> inside Z/4 is Z/2.
    AbGroup g = subgroup_mod(from_rows(1, 1, {{2}}), from_rows(1, 1, {{4}}));
    CHECK(g.rank == 0);
    CHECK(g.torsion == std::vector<Int>{2});

    // The full lattice inside Z^2/<(2,0),(0,3)> is Z/6.
    AbGroup full = subgroup_mod(from_rows(2, 2, {{1, 0}, {0, 1}}), from_rows(2, 2, {{2, 0}, {0, 3}}));
    CHECK(full.rank == 0);
    CHECK(full.torsion == std::vector<Int>{6});

    // <(1,0)> inside Z^2/<(0,2)> is a free Z summand.
    AbGroup free_part = subgroup_mod(from_rows(2, 1, {{1}, {0}}), from_rows(2, 1, {{0}, {2}}));
    CHECK(free_part.rank == 1);
    CHECK(free_part.torsion.empty());
}
