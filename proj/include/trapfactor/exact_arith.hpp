#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trapfactor {

// Arbitrary-precision non-negative integer. GMP's mpz_class is the value type;
// functions taking a Natural check the sign at the public boundary.
using Natural = mpz_class;

// Exact fraction. mpq_class keeps the canonical form (den >= 1, reduced).
using Rational = mpq_class;

// coeff * scale * radicand^(1/degree)
struct RadicalTerm {
    mpz_class coeff = 1;
    Natural radicand = 0;
    unsigned degree = 1;
    Rational scale = 1;
};

// Thrown when interval refinement hits the configured precision cap without
// separating the sum from an integer. Callers must not round silently.
class PrecisionCapExceeded : public std::runtime_error {
public:
    explicit PrecisionCapExceeded(unsigned cap_bits)
        : std::runtime_error("radical-sum floor undecided at precision cap of " +
                             std::to_string(cap_bits) + " bits"),
          cap_bits(cap_bits) {}
    unsigned cap_bits;
};

// r with r^2 <= n < (r+1)^2
Natural isqrt(const Natural& n);

// r with r^degree <= n < (r+1)^degree, degree >= 1
Natural iroot(const Natural& n, unsigned degree);

// r with r^2 == n, or nullopt
std::optional<Natural> as_square(const Natural& n);

Natural gcd(const Natural& a, const Natural& b);

// Process-wide hard cap for floor_radical_sum refinement (bits). Default 4096;
// the CLI lets TRAPFACTOR_PRECISION_CAP_BITS override it.
unsigned floor_precision_cap();
void set_floor_precision_cap(unsigned bits);

// Exact floor of sum(coeff*scale*radicand^(1/degree)). Terms whose radicand is a
// perfect degree-th power are folded into an exact rational part; identical
// surviving radicals are combined so structural cancellations stay exact. The
// irrational remainder is bracketed by integer intervals at doubling precision
// (64 bits up to the cap); PrecisionCapExceeded signals a pathological
// near-integer sum.
mpz_class floor_radical_sum(const std::vector<RadicalTerm>& terms);
mpz_class floor_radical_sum(const std::vector<RadicalTerm>& terms, unsigned cap_bits);

// Strict decimal parse for the CLI boundary; throws std::invalid_argument.
Natural parse_natural(const std::string& text);

}  // namespace trapfactor
