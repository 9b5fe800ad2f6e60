#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trapfactor/traps.hpp"

namespace trapfactor {

enum class FactorStatus {
    found,
    not_found,        // budget exhausted without a method-level guarantee
    prime_asserted,   // Lehman exhausted both phases; no primality certificate
    budget_exhausted  // caller-supplied global step cap reached
};

struct TrapAttempt {
    Natural multiplier;
    unsigned order;
    mpz_class k_lo, k_hi;
};

struct FactorReport {
    Natural n;
    FactorStatus status = FactorStatus::not_found;
    std::vector<Natural> factors;  // nontrivial divisor pair (ascending) when found
    std::string method;
    mpz_class steps_used = 0;  // filter-surviving k checks (phase 2 only for lehman)
    std::optional<Natural> multiplier;
    std::vector<TrapAttempt> trap_trace;
};

struct PlannerPolicy {
    Rational crossover_exponent{3, 7};
    unsigned crossover_scale = 4;  // threshold is (n/crossover_scale)^exponent
};

// Prime factors <= bound with multiplicity; a remaining cofactor > 1 is
// appended last. Doubles as the test oracle throughout the suite.
std::vector<Natural> trial_division(const Natural& n, const Natural& bound);

// Difference-of-squares driver: order-1 trap at s=1 with the parity filter,
// k in [0, max_steps]. Never certifies primality.
FactorReport fermat_factor(const Natural& n, const Natural& max_steps, unsigned workers = 1);

// Trial division through ceil(n^(1/3)), then the multiplier sweep: for
// r = 1..ceil(n^(1/3)) scan r*n with b_r = ceil(n^(1/6)/(4*sqrt(r))) steps.
// Factors every odd composite; exhaustion asserts primality (method-asserted).
FactorReport lehman_factor(const Natural& n, unsigned workers = 1);

// ceil(n^(1/6) / (4*sqrt(r))), exactly.
Natural lehman_budget(const Natural& n, const Natural& r);

struct TrapKindSpec {
    unsigned order = 1;  // 1 anchors at sqrt(r*n), 2 at (r*n)^(1/3), ...
};

// Interleaves one budgeted scan per registered trap on r*n for r = 1, 2, ...;
// first nontrivial gcd(x, n) wins. No trial-division phase: callers strip
// small factors first or accept exhaustion.
FactorReport multi_trap_factor(const Natural& n,
                               const std::vector<TrapKindSpec>& traps = {{1}, {2}},
                               const std::optional<mpz_class>& global_step_cap = std::nullopt,
                               unsigned workers = 1);

// Chooses trap specs for a hinted divisor region: order-1 with tuned s above
// the (n/4)^(3/7) crossover, order-2 with s = 1/t below it; hints above
// sqrt(n) are mirrored to the cofactor region. Without a hint, returns the
// r = 1 round of the default multi-trap schedule.
std::vector<TrapSpec> plan_method(const Natural& n,
                                  const std::optional<std::pair<Natural, Natural>>& hint_region,
                                  const PlannerPolicy& policy = {});

}  // namespace trapfactor
