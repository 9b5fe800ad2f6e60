#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trapfactor/exact_arith.hpp"
#include "trapfactor/poly_solve.hpp"

namespace trapfactor {

// keep step indices k with k ≡ residue (mod modulus)
struct ResidueFilter {
    Natural modulus;
    Natural residue;
};

// One divisor trap: the degree-`order` Taylor approximation of n/x at
// (n/s)^(1/(order+1)), stepped by k (in 1/t units when s = h/t).
struct TrapSpec {
    Natural n;
    unsigned order = 1;  // 1 = tangent trap (Fermat's method at s = 1)
    Rational s = 1;      // h/t > 0
    mpz_class k_lo = 0;
    mpz_class k_hi = 0;
    std::optional<unsigned> parity_filter;  // keep k with k mod 2 == value
    std::optional<ResidueFilter> residue_filter;
};

// Cleared-denominator step identity: for step k, the polynomial is
// poly_base - k*x, with integer coefficients and constant term t*n.
struct TrapEquation {
    IntPolynomial poly_base;
    Natural step_scale;   // t, the denominator of s
    mpz_class constant;   // C, the floored anchor value of the trap function
    Rational anchor;      // ~(n/s)^(1/(order+1)), 2*bitlength(n) bits
    unsigned order = 1;

    IntPolynomial step_poly(const mpz_class& k) const;
    // The unique k with step_poly(k)(x) == 0, if any (the identity is linear in k).
    std::optional<mpz_class> step_index_for_root(const mpz_class& x) const;
};

struct TrapHit {
    mpz_class k;
    Natural x;        // integer root of the step polynomial
    Natural divisor;  // gcd(x, n), strictly between 1 and n
};

enum class Side { left, right, both };

struct CoveragePrediction {
    double length_estimate = 0.0;
    Side side = Side::both;
    std::string formula_id;
};

struct ScanResult {
    std::vector<TrapHit> hits;  // ascending (k, x)
    mpz_class steps_tested;     // filter-surviving k values in range
};

// Throws std::invalid_argument on even n, s <= 0, or an empty k range.
TrapEquation build_trap(const TrapSpec& spec);

// Tests every filter-surviving k in [k_lo, k_hi]; order 1 uses the
// discriminant perfect-square test, higher orders exact root isolation.
// The k range may be partitioned across workers; output is identical for
// any worker count.
ScanResult scan(const TrapSpec& spec, unsigned workers = 1);

// Variants without the odd-n check, for multiplier drivers that scan r*n
// (even for half of all r). The parity filter stays caller-controlled.
TrapEquation build_trap_unchecked(const TrapSpec& spec);
ScanResult scan_unchecked(const TrapSpec& spec, unsigned workers = 1);

// Eq-style guarantee interval for the order-1, s=1 trap with steps 0..b:
// any divisor p with lower < p <= sqrt(n) is trapped. Returned as doubles;
// use fermat_interval_contains for the exact predicate.
std::pair<double, double> fermat_interval(const Natural& n, const Natural& b);
bool fermat_interval_contains(const Natural& n, const Natural& b, const Natural& p);

// Osculating-circle trap, integerized at center (c, c), c = floor(2*sqrt(n)):
// step k solves (x-c)^2 + (y-c)^2 - 2n = k on y = n/x, cleared to a quartic.
// Hits cluster near k ~ floor(2(sqrt(n)-c)^2 - 2n); with recenter=true that
// constant is added so small positive k sweeps the tangent neighborhood.
ScanResult circle_trap_scan(const Natural& n, const mpz_class& k_lo, const mpz_class& k_hi,
                            bool recenter = false, unsigned workers = 1);
mpz_class circle_trap_constant(const Natural& n);

// Closed-form trapped-interval length for b steps of the given trap.
// Orders 1 and 3 are both-sided (factor 2 included); order 2 is per side,
// left for positive k, right for k <= 0. Orders above 3 require
// allow_general and extrapolate the same pattern.
CoveragePrediction predict_coverage(const TrapSpec& spec, const Natural& b,
                                    bool allow_general = false);
CoveragePrediction predict_circle_coverage(const Natural& n, const Natural& b);

// Residue filter for scanning the Fermat number F_idx = 2^(2^idx) + 1:
// divisors are r*2^(idx+2) + 1 (idx >= 2), so p + q ≡ 2 (mod 2^(2(idx+2))).
// Returns (modulus, residue) for TrapSpec::residue_filter.
std::pair<Natural, Natural> fermat_number_filter(unsigned fermat_index);

// Low-level order-1 engine on an arbitrary N >= 3 (even N allowed): tests
// whether (floor(2*sqrt(N))+k)^2 - 4N is a perfect square and reports the
// factor pair of N. use_parity is ignored for even N.
struct TangentHit {
    mpz_class k;
    Natural x;  // smaller member of the pair, x * cofactor == N
    Natural cofactor;
};
struct TangentScanResult {
    std::vector<TangentHit> hits;
    mpz_class steps_tested;
};
TangentScanResult tangent_scan(const Natural& N, const mpz_class& k_lo, const mpz_class& k_hi,
                               bool use_parity, const std::optional<ResidueFilter>& residue,
                               unsigned workers = 1);

// Number of k in [k_lo, k_hi] surviving the given filters (closed form, so
// step counts stay worker-count independent).
mpz_class count_filtered_steps(const mpz_class& k_lo, const mpz_class& k_hi,
                               const std::optional<unsigned>& parity,
                               const std::optional<ResidueFilter>& residue);

}  // namespace trapfactor
