#ifndef LINKHOM_ALGEBRA_HPP
#define LINKHOM_ALGEBRA_HPP

/* The rank-2 Frobenius algebra driving the whole construction.
 *
 * Over R = Z[c] (deg c = 2), A is free on generators 1 (degree +1) and
 * X (degree -1) with
 *   m: 1*1 = 1,  1*X = X*1 = X,  X*X = 0
 *   Delta: 1 -> 1(x)X + X(x)1 + c X(x)X,   X -> X(x)X
 *   unit: 1,   counit: 1 -> -c, X -> 1
 * Setting c = 0 gives the integral specialization (Ring::Z).
 * The maps m, Delta have degree -1; unit and counit have degree +1.
 *
 * Tensor monomials are stored as an X-bitmask over ordered factors plus
 * a c-power p; the element degree is  #factors - 2*popcount + 2p.
 */

#include "linkhom/laurent.hpp"
#include "linkhom/ring.hpp"

#include <bit>
#include <map>
#include <optional>
#include <vector>

namespace linkhom {

/* m on a pair of factor values (true = X). nullopt encodes X*X = 0. */
inline std::optional<bool> mult_value(bool xi, bool xj) {
    if (xi && xj) return std::nullopt;
    return xi || xj;
}

struct DeltaTerm {
    bool x1, x2; // X-flags of the two output factors
    int dp;      // c-power increment
    int coef;    // +-1
};

inline const std::vector<DeltaTerm>& comult_value(bool x, Ring ring) {
    static const std::vector<DeltaTerm> on_one_z = {{false, true, 0, 1}, {true, false, 0, 1}};
    static const std::vector<DeltaTerm> on_one_zc = {{false, true, 0, 1}, {true, false, 0, 1}, {true, true, 1, 1}};
    static const std::vector<DeltaTerm> on_x = {{true, true, 0, 1}};
    if (x) return on_x;
    return ring == Ring::ZC ? on_one_zc : on_one_z;
}

struct CounitTerm {
    int dp;
    int coef;
};

inline const std::vector<CounitTerm>& counit_value(bool x, Ring ring) {
    static const std::vector<CounitTerm> on_x = {{0, 1}};
    static const std::vector<CounitTerm> on_one_zc = {{1, -1}}; // counit(1) = -c
    static const std::vector<CounitTerm> on_one_z = {};
    if (x) return on_x;
    return ring == Ring::ZC ? on_one_zc : on_one_z;
}

/* --- bitmask surgery for ordered tensor factors ------------------------ */

inline uint32_t mask_remove(uint32_t m, int pos) {
    uint32_t low = m & ((1u << pos) - 1);
    uint32_t high = (m >> (pos + 1)) << pos;
    return low | high;
}

inline uint32_t mask_insert(uint32_t m, int pos, bool bit) {
    uint32_t low = m & ((1u << pos) - 1);
    uint32_t high = (m >> pos) << (pos + 1);
    return low | high | (bit ? (1u << pos) : 0u);
}

inline bool mask_bit(uint32_t m, int pos) { return (m >> pos) & 1u; }

inline uint32_t mask_set(uint32_t m, int pos, bool bit) {
    return bit ? (m | (1u << pos)) : (m & ~(1u << pos));
}

/* --- elements of tensor powers of A ------------------------------------ */

struct Mono {
    uint32_t xmask = 0;
    int p = 0;
    auto operator<=>(const Mono&) const = default;
};

class TensorElement {
  public:
    explicit TensorElement(int nfactors = 0) : nf_(nfactors) {}

    static TensorElement generator(int nfactors, uint32_t xmask, int p = 0) {
        TensorElement e(nfactors);
        e.add(Mono{xmask, p}, 1);
        return e;
    }

    int factors() const { return nf_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Mono, Int>& terms() const { return terms_; }

    void add(Mono m, const Int& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TensorElement& operator+=(const TensorElement& o) {
        if (nf_ != o.nf_) fail(Errc::domain, "tensor element factor counts differ");
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
    friend TensorElement operator*(const Int& s, const TensorElement& e) {
        TensorElement r(e.nf_);
        for (const auto& [m, c] : e.terms_) r.add(m, s * c);
        return r;
    }
    bool operator==(const TensorElement& o) const { return nf_ == o.nf_ && terms_ == o.terms_; }

    /* Degree of a homogeneous element; fails on mixed degrees. */
    int degree() const {
        if (terms_.empty()) fail(Errc::domain, "degree of zero element");
        int d = 0;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            int dm = nf_ - 2 * std::popcount(m.xmask) + 2 * m.p;
            if (first) {
                d = dm;
                first = false;
            } else if (d != dm) {
                fail(Errc::domain, "element is not homogeneous");
            }
        }
        return d;
    }

  private:
    int nf_;
    std::map<Mono, Int> terms_;
};

/* One elementary cobordism between tensor powers, acting on explicit
 * factor positions (0-based).  merge(i,j) multiplies factor j into
 * factor i and removes j; split(i) comultiplies factor i into positions
 * i, i+1; birth appends a new 1-factor at the end; death(i) applies the
 * counit to factor i and removes it. */
struct ElementaryCobordism {
    enum Kind { birth, death, merge, split } kind;
    int i = -1, j = -1;

    static ElementaryCobordism make_birth() { return {birth, -1, -1}; }
    static ElementaryCobordism make_death(int i) { return {death, i, -1}; }
    static ElementaryCobordism make_merge(int i, int j) { return {merge, i, j}; }
    static ElementaryCobordism make_split(int i) { return {split, i, -1}; }
};

inline TensorElement apply_cobordism(const ElementaryCobordism& s, const TensorElement& e, Ring ring) {
    const int nf = e.factors();
    TensorElement out(0);
    switch (s.kind) {
    case ElementaryCobordism::birth: {
        out = TensorElement(nf + 1);
        for (const auto& [m, c] : e.terms()) out.add(Mono{m.xmask, m.p}, c); // new top factor carries 1
        return out;
    }
    case ElementaryCobordism::death: {
        if (s.i < 0 || s.i >= nf) fail(Errc::domain, "death: factor index out of range");
        out = TensorElement(nf - 1);
        for (const auto& [m, c] : e.terms()) {
            for (const auto& t : counit_value(mask_bit(m.xmask, s.i), ring))
                out.add(Mono{mask_remove(m.xmask, s.i), m.p + t.dp}, c * t.coef);
        }
        return out;
    }
    case ElementaryCobordism::merge: {
        if (s.i < 0 || s.j < 0 || s.i >= nf || s.j >= nf || s.i == s.j)
            fail(Errc::domain, "merge: bad factor indices");
        int lo = std::min(s.i, s.j), hi = std::max(s.i, s.j);
        out = TensorElement(nf - 1);
        for (const auto& [m, c] : e.terms()) {
            auto v = mult_value(mask_bit(m.xmask, lo), mask_bit(m.xmask, hi));
            if (!v) continue;
            uint32_t w = mask_set(m.xmask, lo, *v);
            out.add(Mono{mask_remove(w, hi), m.p}, c);
        }
        return out;
    }
    case ElementaryCobordism::split: {
        if (s.i < 0 || s.i >= nf) fail(Errc::domain, "split: factor index out of range");
        out = TensorElement(nf + 1);
        for (const auto& [m, c] : e.terms()) {
            for (const auto& t : comult_value(mask_bit(m.xmask, s.i), ring)) {
                uint32_t w = mask_set(m.xmask, s.i, t.x1);
                out.add(Mono{mask_insert(w, s.i + 1, t.x2), m.p + t.dp}, c * t.coef);
            }
        }
        return out;
    }
    }
    fail(Errc::internal, "unreachable cobordism kind");
}

inline TensorElement evaluate_cobordism(const std::vector<ElementaryCobordism>& steps, TensorElement e, Ring ring) {
    for (const auto& s : steps) e = apply_cobordism(s, e, ring);
    return e;
}

inline int euler_char(const std::vector<ElementaryCobordism>& steps) {
    int chi = 0;
    for (const auto& s : steps)
        chi += (s.kind == ElementaryCobordism::birth || s.kind == ElementaryCobordism::death) ? 1 : -1;
    return chi;
}

/* Value of a closed surface (a step sequence from 0 factors to 0
 * factors) as a polynomial in c, keyed by c-power. */
inline std::map<int, Int> closed_surface_invariant(const std::vector<ElementaryCobordism>& steps, Ring ring) {
    TensorElement e = TensorElement::generator(0, 0, 0);
    e = evaluate_cobordism(steps, e, ring);
    if (e.factors() != 0) fail(Errc::domain, "surface is not closed (ends with factors left over)");
    std::map<int, Int> out;
    for (const auto& [m, c] : e.terms()) out[m.p] = c;
    return out;
}

} // namespace linkhom

#endif
