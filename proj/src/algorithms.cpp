#include "trapfactor/algorithms.hpp"

#include <algorithm>

namespace trapfactor {

namespace {

void require_odd_candidate(const Natural& n, const char* who) {
    if (n < 3) throw std::invalid_argument(std::string(who) + ": n must be >= 3");
    if (mpz_even_p(n.get_mpz_t()))
        throw std::invalid_argument(std::string(who) + ": n must be odd (strip factors of 2 first)");
}

Natural cbrt_ceil(const Natural& n) {
    const Natural w = iroot(n, 3);
    return (w * w * w == n) ? w : Natural(w + 1);
}

mpz_class pow_z(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// first (k, divisor-of-n) from a tangent scan of N = r*n, by ascending (k, x)
std::optional<std::pair<mpz_class, Natural>> pick_divisor(const TangentScanResult& res,
                                                          const Natural& n) {
    for (const TangentHit& hit : res.hits) {
        for (const Natural* cand : {&hit.x, &hit.cofactor}) {
            const Natural g = gcd(*cand, n);
            if (g > 1 && g < n) return std::make_pair(hit.k, g);
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<Natural> trial_division(const Natural& n, const Natural& bound) {
    if (n < 2) throw std::invalid_argument("trial_division: n must be >= 2");
    std::vector<Natural> factors;
    Natural m = n;
    Natural d = 2;
    while (d <= bound && d * d <= m) {
        while (mpz_divisible_p(m.get_mpz_t(), d.get_mpz_t())) {
            factors.push_back(d);
            m /= d;
        }
        d += (d == 2) ? 1 : 2;
    }
    if (m > 1) factors.push_back(m);  // prime (no divisor up to sqrt(m)) or cofactor
    return factors;
}

FactorReport fermat_factor(const Natural& n, const Natural& max_steps, unsigned workers) {
    require_odd_candidate(n, "fermat_factor");
    FactorReport report;
    report.n = n;
    report.method = "fermat";

    const Natural c = isqrt(4 * n);
    const unsigned parity = mpz_odd_p(c.get_mpz_t()) ? 1u : 0u;

    // block-wise so huge budgets stop at the first hit; merged scans keep the
    // outcome independent of the worker count
    const mpz_class block = 8192 * std::max(1u, workers);
    for (mpz_class lo = 0; lo <= max_steps; lo += block) {
        const mpz_class hi = std::min(mpz_class(lo + block - 1), mpz_class(max_steps));
        TrapSpec spec{n, 1, 1, lo, hi, parity, std::nullopt};
        const ScanResult res = scan(spec, workers);
        if (!res.hits.empty()) {
            const TrapHit& hit = res.hits.front();
            report.status = FactorStatus::found;
            report.factors = {hit.divisor, Natural(n / hit.divisor)};
            std::sort(report.factors.begin(), report.factors.end());
            report.steps_used = count_filtered_steps(0, hit.k, parity, std::nullopt);
            report.trap_trace.push_back({1, 1, 0, hit.k});
            return report;
        }
    }
    report.status = FactorStatus::not_found;
    report.steps_used = count_filtered_steps(0, mpz_class(max_steps), parity, std::nullopt);
    report.trap_trace.push_back({1, 1, 0, mpz_class(max_steps)});
    return report;
}

Natural lehman_budget(const Natural& n, const Natural& r) {
    if (n < 1 || r < 1) throw std::invalid_argument("lehman_budget: n, r must be >= 1");
    // n^(1/6)/(4 sqrt r) <= 1 whenever n <= 4096 r^3
    if (4096 * r * r * r >= n) return 1;
    RadicalTerm term;
    term.coeff = 1;
    term.radicand = n * r * r * r;  // (n r^3)^(1/6) / (4r) = n^(1/6) / (4 sqrt r)
    term.degree = 6;
    term.scale = Rational(1, 4 * r);
    const mpz_class f = floor_radical_sum({term});
    const bool exact = pow_z(4 * r * f, 6) == term.radicand;
    return exact ? Natural(f) : Natural(f + 1);
}

FactorReport lehman_factor(const Natural& n, unsigned workers) {
    require_odd_candidate(n, "lehman_factor");
    FactorReport report;
    report.n = n;
    report.method = "lehman";

    const Natural bound = cbrt_ceil(n);

    // phase 1: trial division through ceil(n^(1/3))
    for (Natural d = 3; d <= bound; d += 2) {
        if (mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) {
            report.status = FactorStatus::found;
            report.factors = {d, Natural(n / d)};
            return report;
        }
    }

    // phase 2: multiplier sweep; any remaining factor pair of n is balanced
    // enough that some r*n has a pair inside the b_r window
    for (Natural r = 1; r <= bound; ++r) {
        const Natural N = r * n;
        const Natural b_r = lehman_budget(n, r);
        const TangentScanResult res = tangent_scan(N, 0, mpz_class(b_r), true, std::nullopt, workers);
        report.steps_used += res.steps_tested;
        report.trap_trace.push_back({r, 1, 0, mpz_class(b_r)});
        if (const auto hit = pick_divisor(res, n)) {
            report.status = FactorStatus::found;
            report.factors = {hit->second, Natural(n / hit->second)};
            std::sort(report.factors.begin(), report.factors.end());
            report.multiplier = r;
            return report;
        }
    }
    report.status = FactorStatus::prime_asserted;
    return report;
}

FactorReport multi_trap_factor(const Natural& n, const std::vector<TrapKindSpec>& traps,
                               const std::optional<mpz_class>& global_step_cap, unsigned workers) {
    require_odd_candidate(n, "multi_trap_factor");
    if (traps.empty()) throw std::invalid_argument("multi_trap_factor: no traps registered");
    for (const auto& kind : traps)
        if (kind.order == 0) throw std::invalid_argument("multi_trap_factor: order must be >= 1");

    FactorReport report;
    report.n = n;
    report.method = "multitrap";

    const Natural bound = cbrt_ceil(n);
    for (Natural r = 1; r <= bound; ++r) {
        const Natural N = r * n;
        const Natural b_r = lehman_budget(n, r);
        for (const TrapKindSpec& kind : traps) {
            if (global_step_cap && report.steps_used >= *global_step_cap) {
                report.status = FactorStatus::budget_exhausted;
                return report;
            }
            if (kind.order == 1) {
                const TangentScanResult res =
                    tangent_scan(N, 0, mpz_class(b_r), true, std::nullopt, workers);
                report.steps_used += res.steps_tested;
                report.trap_trace.push_back({r, 1, 0, mpz_class(b_r)});
                if (const auto hit = pick_divisor(res, n)) {
                    report.status = FactorStatus::found;
                    report.factors = {hit->second, Natural(n / hit->second)};
                    std::sort(report.factors.begin(), report.factors.end());
                    report.multiplier = r;
                    return report;
                }
            } else {
                const mpz_class lo = 1 - mpz_class(b_r), hi = mpz_class(b_r);
                TrapSpec spec{N, kind.order, 1, lo, hi, std::nullopt, std::nullopt};
                const ScanResult res = scan_unchecked(spec, workers);
                report.steps_used += res.steps_tested;
                report.trap_trace.push_back({r, kind.order, lo, hi});
                for (const TrapHit& hit : res.hits) {
                    const Natural g = gcd(hit.x, n);  // hit.divisor divides N = r*n
                    if (g > 1 && g < n) {
                        report.status = FactorStatus::found;
                        report.factors = {g, Natural(n / g)};
                        std::sort(report.factors.begin(), report.factors.end());
                        report.multiplier = r;
                        return report;
                    }
                }
            }
        }
    }
    report.status = FactorStatus::not_found;
    return report;
}

std::vector<TrapSpec> plan_method(const Natural& n,
                                  const std::optional<std::pair<Natural, Natural>>& hint_region,
                                  const PlannerPolicy& policy) {
    require_odd_candidate(n, "plan_method");
    if (sgn(policy.crossover_exponent) <= 0 || policy.crossover_exponent >= Rational(1, 2))
        throw std::invalid_argument("plan_method: crossover exponent must be in (0, 1/2)");

    const Natural c = isqrt(4 * n);
    const unsigned parity = mpz_odd_p(c.get_mpz_t()) ? 1u : 0u;

    if (!hint_region) {
        // r = 1 round of the default multi-trap schedule
        const Natural b1 = lehman_budget(n, 1);
        TrapSpec tangent{n, 1, 1, 0, mpz_class(b1), parity, std::nullopt};
        TrapSpec second{n, 2, 1, 1 - mpz_class(b1), mpz_class(b1), std::nullopt, std::nullopt};
        return {tangent, second};
    }

    Natural lo = hint_region->first, hi = hint_region->second;
    if (lo < 1 || lo > hi) throw std::invalid_argument("plan_method: bad hint region");
    Natural d = isqrt(lo * hi);
    if (d < 2) d = 2;
    if (d * d > n) {  // mirror to the cofactor region
        d = n / d;
        if (d < 2) d = 2;
    }
    Natural width = hi - lo;
    if (width < 2) width = 2;

    // d above (n/scale)^(a/b) iff scale^a * d^b > n^a
    const auto a = static_cast<unsigned long>(policy.crossover_exponent.get_num().get_ui());
    const auto b = static_cast<unsigned long>(policy.crossover_exponent.get_den().get_ui());
    const bool above =
        pow_z(policy.crossover_scale, a) * pow_z(d, b) > pow_z(n, a);

    const auto clamp_budget = [](mpz_class v) {
        if (v < 16) v = 16;
        if (v > 1000000) v = 1000000;
        return v;
    };

    if (above) {
        // order-1 trap with anchor sqrt(n/s) ~ d: s = round(n / d^2)
        Natural s = (2 * n + d * d) / (2 * d * d);
        if (s < 1) s = 1;
        // invert 2(b^2 n/s^3)^(1/4) >= width
        mpz_class need = pow_z(width, 4) * pow_z(s, 3);
        mpz_class q;
        mpz_cdiv_q(q.get_mpz_t(), need.get_mpz_t(), mpz_class(16 * n).get_mpz_t());
        const mpz_class steps = clamp_budget(isqrt(Natural(q)) + 1);
        TrapSpec spec{n, 1, Rational(s), 0, steps, std::nullopt, std::nullopt};
        if (s == 1) spec.parity_filter = parity;
        return {spec};
    }

    // order-2 trap with anchor (n*t)^(1/3) ~ d: t = round(d^3 / n)
    Natural t = (2 * d * d * d + n) / (2 * n);
    if (t < 1) t = 1;
    // invert (b^3 n t)^(1/9) >= width per side
    mpz_class need = pow_z(width, 9);
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), need.get_mpz_t(), mpz_class(n * t).get_mpz_t());
    const mpz_class steps = clamp_budget(iroot(Natural(q), 3) + 1);
    TrapSpec spec{n, 2, Rational(1, t), 1 - steps, steps, std::nullopt, std::nullopt};
    return {spec};
}

}  // namespace trapfactor
