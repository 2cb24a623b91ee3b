#ifndef LINKHOM_LAURENT_HPP
#define LINKHOM_LAURENT_HPP

/* Integer Laurent polynomials in one variable, plus the two-part series
 * representation  a(q) + b(q)/(1-q^2)  used for graded Euler
 * characteristics over Z[c], where each free Z[c]{m} summand contributes
 * the geometric tower q^-m + q^-m+2 + ... = q^-m/(1-q^2).
 */

#include "linkhom/ring.hpp"

#include <json.hpp>

#include <map>
#include <sstream>
#include <string>

namespace linkhom {

class Laurent {
  public:
    Laurent() = default;
    explicit Laurent(const Int& constant) {
        if (constant != 0) coef_[0] = constant;
    }
    static Laurent term(const Int& c, int exp) {
        Laurent p;
        if (c != 0) p.coef_[exp] = c;
        return p;
    }
    static Laurent q_pow(int exp) { return term(1, exp); }

    bool is_zero() const { return coef_.empty(); }
    const std::map<int, Int>& coefs() const { return coef_; }
    Int coef(int exp) const {
        auto it = coef_.find(exp);
        return it == coef_.end() ? Int(0) : it->second;
    }
    int min_exp() const { return coef_.empty() ? 0 : coef_.begin()->first; }
    int max_exp() const { return coef_.empty() ? 0 : coef_.rbegin()->first; }

    void add_term(const Int& c, int exp) {
        if (c == 0) return;
        auto it = coef_.find(exp);
        if (it == coef_.end()) {
            coef_[exp] = c;
        } else {
            it->second += c;
            if (it->second == 0) coef_.erase(it);
        }
    }

    Laurent& operator+=(const Laurent& o) {
        for (const auto& [e, c] : o.coef_) add_term(c, e);
        return *this;
    }
    Laurent& operator-=(const Laurent& o) {
        for (const auto& [e, c] : o.coef_) add_term(-c, e);
        return *this;
    }
    friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
    friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
    friend Laurent operator-(const Laurent& a) { return Laurent() - a; }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r;
        for (const auto& [ea, ca] : a.coef_)
            for (const auto& [eb, cb] : b.coef_) r.add_term(ca * cb, ea + eb);
        return r;
    }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

    friend Laurent operator*(const Int& s, const Laurent& p) {
        Laurent r;
        for (const auto& [e, c] : p.coef_) r.add_term(s * c, e);
        return r;
    }

    /* Multiply by q^k. */
    Laurent shifted(int k) const {
        Laurent r;
        for (const auto& [e, c] : coef_) r.coef_[e + k] = c;
        return r;
    }

    /* Substitute q -> -q (negates odd-exponent coefficients). */
    Laurent subst_neg() const {
        Laurent r;
        for (const auto& [e, c] : coef_) r.coef_[e] = (e % 2 != 0) ? Int(-c) : c;
        return r;
    }

    /* Substitute q -> q^-1. */
    Laurent subst_inv() const {
        Laurent r;
        for (const auto& [e, c] : coef_) r.coef_[-e] = c;
        return r;
    }

    /* Exact division; fails if the divisor does not divide. */
    friend Laurent div_exact(const Laurent& num, const Laurent& den) {
        if (den.is_zero()) fail(Errc::domain, "laurent division by zero");
        Laurent rem = num, quot;
        const int dlead = den.max_exp();
        const Int& dc = den.coef_.rbegin()->second;
        while (!rem.is_zero()) {
            const int rlead = rem.max_exp();
            const Int& rc = rem.coef_.rbegin()->second;
            if (rc % dc != 0) fail(Errc::domain, "laurent division is not exact");
            Int q = rc / dc;
            int shift = rlead - dlead;
            quot.add_term(q, shift);
            rem -= Laurent::term(q, shift) * den;
            if (!rem.is_zero() && rem.max_exp() >= rlead)
                fail(Errc::internal, "laurent division failed to reduce");
        }
        return quot;
    }

    bool operator==(const Laurent& o) const { return coef_ == o.coef_; }
    bool operator!=(const Laurent& o) const { return !(*this == o); }

    /* Human-readable form, ascending exponents: "q^-3 + 2*q + ...". */
    std::string str(const std::string& var = "q") const {
        if (coef_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [e, c] : coef_) {
            Int a = c;
            if (first) {
                if (a < 0) { out << "-"; a = -a; }
            } else {
                out << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            first = false;
            if (e == 0) {
                out << a.get_str();
            } else {
                if (a != 1) out << a.get_str() << "*";
                out << var;
                if (e != 1) out << "^" << e;
            }
        }
        return out.str();
    }

    /* Render with exponents halved: an even exponent 2k prints as var^k,
     * an odd one as var^(e/2).  Used for polynomials stored in a square
     * root of the display variable. */
    std::string str_half(const std::string& var = "t") const {
        if (coef_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [e, c] : coef_) {
            Int a = c;
            if (first) {
                if (a < 0) { out << "-"; a = -a; }
            } else {
                out << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            first = false;
            if (e == 0) {
                out << a.get_str();
                continue;
            }
            if (a != 1) out << a.get_str() << "*";
            out << var;
            if (e % 2 == 0) {
                if (e != 2) out << "^" << e / 2;
            } else {
                out << "^(" << e << "/2)";
            }
        }
        return out.str();
    }

    /* JSON object keyed by exponent: {"-1": 1, "3": -2}. */
    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [e, c] : coef_) j[std::to_string(e)] = c.get_str();
        return j;
    }
    static Laurent from_json(const nlohmann::json& j) {
        if (!j.is_object()) fail(Errc::parse, "laurent: expected object of exp -> coef");
        Laurent p;
        for (auto it = j.begin(); it != j.end(); ++it) {
            int e = 0;
            try {
                e = std::stoi(it.key());
            } catch (const std::exception&) {
                fail(Errc::parse, "laurent: bad exponent key '" + it.key() + "'");
            }
            Int c;
            if (it->is_number_integer()) {
                c = Int(it->get<long>());
            } else if (it->is_string()) {
                try {
                    c = Int(it->get<std::string>());
                } catch (const std::exception&) {
                    fail(Errc::parse, "laurent: bad coefficient for exponent " + it.key());
                }
            } else {
                fail(Errc::parse, "laurent: coefficient must be integer or string");
            }
            p.add_term(c, e);
        }
        return p;
    }

  private:
    std::map<int, Int> coef_;
};

/* a(q) + b(q)/(1-q^2).  Equality is tested on the normal form
 * a*(1-q^2) + b, which is a faithful invariant of the represented series. */
struct SeriesRep {
    Laurent a, b;

    Laurent normal_form() const {
        Laurent one_minus_q2 = Laurent::term(1, 0) - Laurent::term(1, 2);
        return a * one_minus_q2 + b;
    }
    bool operator==(const SeriesRep& o) const { return normal_form() == o.normal_form(); }
    bool operator!=(const SeriesRep& o) const { return !(*this == o); }

    SeriesRep& operator+=(const SeriesRep& o) {
        a += o.a;
        b += o.b;
        return *this;
    }

    nlohmann::json to_json() const { return {{"a", a.to_json()}, {"b", b.to_json()}}; }
    static SeriesRep from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("a") || !j.contains("b"))
            fail(Errc::parse, "series: expected {\"a\":..., \"b\":...}");
        return SeriesRep{Laurent::from_json(j.at("a")), Laurent::from_json(j.at("b"))};
    }
    std::string str() const {
        if (b.is_zero()) return a.str();
        std::string s = b.str();
        std::string head = a.is_zero() ? "" : a.str() + " + ";
        return head + "(" + s + ")/(1-q^2)";
    }
};

} // namespace linkhom

#endif
