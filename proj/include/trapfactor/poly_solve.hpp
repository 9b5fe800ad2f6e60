#pragma once

#include <vector>

#include "trapfactor/exact_arith.hpp"

namespace trapfactor {

// Integer-coefficient polynomial, coefficients in ascending degree order.
// An empty coefficient vector is the zero polynomial.
struct IntPolynomial {
    std::vector<mpz_class> coeffs;

    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<mpz_class> c) : coeffs(std::move(c)) { trim(); }

    void trim() {
        while (!coeffs.empty() && sgn(coeffs.back()) == 0) coeffs.pop_back();
    }
    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    mpz_class operator()(const mpz_class& x) const;
};

struct CubicShape {
    mpz_class a, b, c, d;  // a*x^3 + b*x^2 + c*x + d, a != 0
};

// All integer x with a*x^2 + b*x + c == 0 (a != 0), sorted ascending, deduplicated.
std::vector<mpz_class> quadratic_integer_roots(const mpz_class& a, const mpz_class& b,
                                               const mpz_class& c);

// 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2, exactly.
mpz_class cubic_discriminant(const CubicShape& p);

// true iff -discriminant >= 0 and is a perfect square. Note: this is the
// published filter condition; a false return does NOT rule out an integer root
// (see the shape counterexample pinned in the tests), so callers that need
// completeness must still solve exactly.
bool cubic_prefilter(const CubicShape& p);

// Every integer root of p, found by exact Sturm isolation over the full root
// bound (seeded from anchor/radius_hint) plus exact evaluation at the integers
// adjacent to each isolated real root. Every returned x satisfies p(x) == 0.
std::vector<mpz_class> integer_roots_near(const IntPolynomial& p, const Rational& anchor,
                                          const Natural& radius_hint);

}  // namespace trapfactor
