#include "linkhom/laurent.hpp"

#include <doctest.h>

using namespace linkhom;

TEST_CASE("laurent arithmetic") {
    Laurent a = Laurent::q_pow(1) + Laurent::q_pow(-1); // q + 1/q
    Laurent b = a * a;
    CHECK(b == Laurent::q_pow(2) + Laurent::term(2, 0) + Laurent::q_pow(-2));
    CHECK((b - b).is_zero());
    CHECK(a.shifted(3) == Laurent::q_pow(4) + Laurent::q_pow(2));
    CHECK(Int(-2) * a == Laurent::term(-2, 1) + Laurent::term(-2, -1));
    CHECK(a.min_exp() == -1);
    CHECK(a.max_exp() == 1);
}

TEST_CASE("laurent exact division") {
    Laurent den = Laurent::q_pow(1) + Laurent::q_pow(-1);
    Laurent quot = Laurent::q_pow(3) - Laurent::term(2, -1);
    Laurent num = den * quot;
    CHECK(div_exact(num, den) == quot);
    CHECK(div_exact(Laurent(), den).is_zero());
}

TEST_CASE("laurent substitution q -> -q") {
    Laurent a = Laurent::q_pow(3) + Laurent::term(2, 2) - Laurent::q_pow(-1);
    Laurent s = a.subst_neg();
    CHECK(s == -Laurent::q_pow(3) + Laurent::term(2, 2) + Laurent::q_pow(-1));
    CHECK(s.subst_neg() == a); // involution
}

TEST_CASE("laurent rendering") {
    Laurent a = Laurent::q_pow(2) - Laurent::term(3, 0) + Laurent::term(1, -4);
    CHECK(a.str("q") == "q^-4 - 3 + q^2");
    CHECK(Laurent().str() == "0");
    /* half-exponent form: exponents are powers of the square root */
    Laurent v = Laurent::term(1, -2) + Laurent::term(1, -6) - Laurent::term(1, -8);
    CHECK(v.str_half("t") == "-t^-4 + t^-3 + t^-1");
    Laurent w = Laurent::term(1, 1) - Laurent::term(2, -3);
    CHECK(w.str_half("t") == "-2*t^(-3/2) + t^(1/2)");
}

TEST_CASE("laurent json round trip") {
    Laurent a = Laurent::q_pow(5) - Laurent::term(7, -2);
    CHECK(Laurent::from_json(a.to_json()) == a);
}
