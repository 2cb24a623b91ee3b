#ifndef LINKHOM_RING_HPP
#define LINKHOM_RING_HPP

/* Base scalar types and error plumbing shared by every module.
 *
 * All exact arithmetic runs over GMP integers (mpz_class).  The two
 * coefficient rings of the theory are selected by a runtime tag:
 *   Ring::Z   integers (the specialized theory, "c = 0")
 *   Ring::ZC  the polynomial ring Z[c] with deg(c) = 2
 * Z[c] never appears as a coefficient type of its own: chain groups over
 * Z[c] are expanded into their integer c-power layers, so every matrix
 * the homology engine sees is an integer matrix.
 */

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace linkhom {

using Int = mpz_class;

enum class Ring { Z, ZC };

inline const char* ring_name(Ring r) { return r == Ring::Z ? "z" : "zc"; }

/* Error kinds map 1:1 onto CLI exit codes (see cli.hpp). */
enum class Errc {
    parse = 2,        // malformed PD/JSON/braid/module input
    domain = 3,       // bad window, unknown arc, out-of-range argument
    unsupported = 4,  // movie move with no chain-level support (e.g. r3)
    internal = 70,
};

class Error : public std::runtime_error {
  public:
    Error(Errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Errc kind() const { return kind_; }

  private:
    Errc kind_;
};

[[noreturn]] inline void fail(Errc kind, const std::string& msg) { throw Error(kind, msg); }

} // namespace linkhom

#endif
