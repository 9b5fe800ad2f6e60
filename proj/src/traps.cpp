#include "trapfactor/traps.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace trapfactor {

namespace {

mpz_class mod_nonneg(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

// filter-surviving k values form an arithmetic progression
struct Progression {
    mpz_class first;
    mpz_class stride;
    mpz_class count;
};

Progression filtered_progression(const mpz_class& k_lo, const mpz_class& k_hi,
                                 const std::optional<unsigned>& parity,
                                 const std::optional<ResidueFilter>& residue) {
    Progression p{k_lo, 1, 0};
    if (residue) {
        if (sgn(residue->modulus) <= 0) throw std::invalid_argument("residue filter: modulus must be positive");
        p.stride = residue->modulus;
        mpz_class target = mod_nonneg(residue->residue, residue->modulus);
        if (parity) {
            if (mpz_even_p(residue->modulus.get_mpz_t())) {
                // every k ≡ target (mod even M) has target's parity
                if (mod_nonneg(target, 2) != *parity) return {k_lo, 1, 0};
            } else {
                // combine with the parity congruence; odd M makes 2M the joint modulus
                if (mod_nonneg(target, 2) != *parity) target += residue->modulus;
                p.stride = 2 * residue->modulus;
            }
        }
        p.first = k_lo + mod_nonneg(target - k_lo, p.stride);
    } else if (parity) {
        p.stride = 2;
        p.first = k_lo + mod_nonneg(mpz_class(*parity) - k_lo, 2);
    }
    if (p.first > k_hi) return {p.first, p.stride, 0};
    p.count = (k_hi - p.first) / p.stride + 1;
    return p;
}

struct Chunk {
    mpz_class start_k;
    mpz_class count;
};

// contiguous chunks in range order, so merged per-chunk output is
// deterministic for any worker count
std::vector<Chunk> plan_chunks(const Progression& prog, unsigned workers) {
    std::vector<Chunk> chunks;
    if (sgn(prog.count) <= 0) return chunks;
    unsigned w = std::max(1u, workers);
    if (prog.count < 2 * w) w = 1;
    for (unsigned i = 0; i < w; ++i) {
        mpz_class begin = (prog.count * i) / w;
        mpz_class end = (prog.count * (i + 1)) / w;
        if (begin >= end) continue;
        chunks.push_back({prog.first + prog.stride * begin, end - begin});
    }
    return chunks;
}

// run fn(chunk_index, start_k, chunk_count) for every chunk, in parallel when
// there is more than one
template <typename Fn>
void run_chunks(const std::vector<Chunk>& chunks, Fn&& fn) {
    if (chunks.empty()) return;
    if (chunks.size() == 1) {
        fn(std::size_t{0}, chunks[0].start_k, chunks[0].count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        pool.emplace_back([&, i]() {
            try {
                fn(i, chunks[i].start_k, chunks[i].count);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void validate_spec_common(const TrapSpec& spec) {
    if (spec.n < 3) throw std::invalid_argument("trap: n must be >= 3");
    if (spec.order == 0) throw std::invalid_argument("trap: order must be >= 1");
    if (sgn(spec.s) <= 0) throw std::invalid_argument("trap: s must be positive");
    if (spec.parity_filter && *spec.parity_filter > 1)
        throw std::invalid_argument("trap: parity filter must be 0 or 1");
}

mpz_class binom(unsigned n, unsigned k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

mpz_class pow_z(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

double ln_mpz(const mpz_class& z) {
    signed long e;
    const double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace

IntPolynomial TrapEquation::step_poly(const mpz_class& k) const {
    IntPolynomial p = poly_base;
    p.coeffs[1] -= k;
    p.trim();
    return p;
}

std::optional<mpz_class> TrapEquation::step_index_for_root(const mpz_class& x) const {
    if (sgn(x) == 0) return std::nullopt;
    const mpz_class v = poly_base(x);
    if (!mpz_divisible_p(v.get_mpz_t(), x.get_mpz_t())) return std::nullopt;
    return mpz_class(v / x);
}

TrapEquation build_trap_unchecked(const TrapSpec& spec) {
    validate_spec_common(spec);
    const Natural& n = spec.n;
    const unsigned m = spec.order + 1;  // Taylor degree + 1
    const mpz_class h = spec.s.get_num();
    const mpz_class t = spec.s.get_den();
    const Rational inv_t(1, t), inv_h(1, h);

    // bracketed coefficients [binom(m,i) * (s^(m-i) n^i)^(1/m)]
    std::vector<mpz_class> bracket(m);  // bracket[i], i = 1..m-1
    for (unsigned i = 1; i < m; ++i) {
        RadicalTerm term;
        term.coeff = binom(m, i);
        term.radicand = pow_z(h, m - i) * pow_z(n, i) * pow_z(t, i);
        term.degree = m;
        term.scale = inv_t;
        bracket[i] = floor_radical_sum({term});
    }

    // C = floor((1+(-1)^m)(s n^(m-1))^(1/m) + sum (+-)[..](n/s)^((m-1-i)/m))
    std::vector<RadicalTerm> c_terms;
    if (m % 2 == 0) {
        RadicalTerm lead;
        lead.coeff = 2;
        lead.radicand = h * pow_z(t * n, m - 1);
        lead.degree = m;
        lead.scale = inv_t;
        c_terms.push_back(lead);
    }
    for (unsigned i = 1; i < m; ++i) {
        const unsigned j = m - 1 - i;  // exponent of (n/s)^(j/m)
        RadicalTerm term;
        term.coeff = ((m - i) % 2 == 0) ? bracket[i] : mpz_class(-bracket[i]);
        term.radicand = pow_z(n * t, j) * pow_z(h, m - j);
        term.degree = m;
        term.scale = inv_h;
        c_terms.push_back(term);
    }
    const mpz_class C = floor_radical_sum(c_terms);

    // multiply the step identity by t*x: constant term t*n, step term k*x
    std::vector<mpz_class> coeffs(m + 1, mpz_class(0));
    coeffs[0] = t * n;
    coeffs[1] = -t * C;
    for (unsigned i = 1; i < m; ++i) {
        const mpz_class signed_b = ((m - i) % 2 == 0) ? bracket[i] : mpz_class(-bracket[i]);
        coeffs[m - i] += t * signed_b;
    }
    coeffs[m] += (m % 2 == 0) ? h : mpz_class(-h);

    TrapEquation eq;
    eq.poly_base = IntPolynomial(std::move(coeffs));
    eq.step_scale = t;
    eq.constant = C;
    eq.order = spec.order;

    // anchor ~ (n*t/h)^(1/m) at 2*bitlength(n) fractional bits
    const auto prec = static_cast<unsigned long>(2 * mpz_sizeinbase(n.get_mpz_t(), 2));
    mpz_class scaled = (n * t) << (prec * m);
    scaled /= h;
    mpz_class u = iroot(scaled, m);
    eq.anchor = Rational(u, mpz_class(1) << prec);
    eq.anchor.canonicalize();
    return eq;
}

TrapEquation build_trap(const TrapSpec& spec) {
    if (mpz_even_p(spec.n.get_mpz_t()))
        throw std::invalid_argument("trap: n must be odd (strip factors of 2 first)");
    return build_trap_unchecked(spec);
}

namespace {

ScanResult scan_impl(const TrapSpec& spec, unsigned workers, const TrapEquation& eq) {
    if (spec.k_lo > spec.k_hi) throw std::invalid_argument("scan: empty k range");
    const Progression prog =
        filtered_progression(spec.k_lo, spec.k_hi, spec.parity_filter, spec.residue_filter);

    const Natural& n = spec.n;
    const mpz_class t = eq.step_scale;
    const mpz_class h = spec.s.get_num();
    const mpz_class four_htn = 4 * h * t * n;
    const mpz_class two_h = 2 * h;
    // -(coeff of x) in poly_base is t*B1 + t*C for order 1
    const mpz_class base_linear = -eq.poly_base.coeffs[1];

    ScanResult result;
    result.steps_tested = prog.count;
    const auto chunks = plan_chunks(prog, workers);
    std::vector<std::vector<TrapHit>> partial(chunks.size());

    run_chunks(chunks, [&](std::size_t idx, const mpz_class& start_k, const mpz_class& cnt) {
        std::vector<TrapHit>& out = partial[idx];
        mpz_class k = start_k;
        std::vector<mpz_class> roots;
        for (mpz_class done = 0; done < cnt; ++done, k += prog.stride) {
            roots.clear();
            if (spec.order == 1) {
                // h x^2 - (t*B1 + t*C + k) x + t*n = 0
                const mpz_class g = base_linear + k;
                const mpz_class disc = g * g - four_htn;
                if (sgn(disc) < 0) continue;
                const auto y = as_square(disc);
                if (!y) continue;
                for (int sign : {-1, +1}) {
                    const mpz_class num = g + sign * *y;
                    if (mpz_divisible_p(num.get_mpz_t(), two_h.get_mpz_t()))
                        roots.push_back(num / two_h);
                }
                std::sort(roots.begin(), roots.end());
                roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
            } else {
                roots = integer_roots_near(eq.step_poly(k), eq.anchor, Natural(8));
            }
            for (const mpz_class& x : roots) {
                if (x < 2) continue;
                const Natural d = gcd(Natural(x), n);
                if (d > 1 && d < n) out.push_back({k, Natural(x), d});
            }
        }
    });
    for (auto& part : partial)
        result.hits.insert(result.hits.end(), part.begin(), part.end());
    return result;
}

}  // namespace

ScanResult scan_unchecked(const TrapSpec& spec, unsigned workers) {
    const TrapEquation eq = build_trap_unchecked(spec);
    return scan_impl(spec, workers, eq);
}

ScanResult scan(const TrapSpec& spec, unsigned workers) {
    const TrapEquation eq = build_trap(spec);
    return scan_impl(spec, workers, eq);
}

std::pair<double, double> fermat_interval(const Natural& n, const Natural& b) {
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw std::invalid_argument("fermat_interval: n must be odd and >= 3");
    const Natural A = isqrt(4 * n) + b + 1;
    const mpz_class disc = A * A - 4 * n;
    mpf_class fa(A, 256), fd(disc, 256), fn(n, 256);
    mpf_class lower = (fa - sqrt(fd)) / 2;
    mpf_class upper = sqrt(fn);
    return {lower.get_d(), upper.get_d()};
}

bool fermat_interval_contains(const Natural& n, const Natural& b, const Natural& p) {
    if (sgn(p) <= 0) return false;
    if (p * p > n) return false;           // p <= sqrt(n)
    const Natural A = isqrt(4 * n) + b + 1;
    return p * (A - p) > n;                // p above the lower endpoint, exactly
}

mpz_class circle_trap_constant(const Natural& n) {
    const Natural c = isqrt(4 * n);
    RadicalTerm sq{2 * c * c, 1, 1, 1};
    RadicalTerm rad{-4 * c, n, 2, 1};
    return floor_radical_sum({sq, rad});
}

ScanResult circle_trap_scan(const Natural& n, const mpz_class& k_lo, const mpz_class& k_hi,
                            bool recenter, unsigned workers) {
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw std::invalid_argument("circle trap: n must be odd and >= 3");
    if (k_lo > k_hi) throw std::invalid_argument("circle trap: empty k range");
    const Natural c = isqrt(4 * n);
    const mpz_class offset = recenter ? circle_trap_constant(n) : mpz_class(0);
    const Rational anchor(isqrt(n));

    const Progression prog = filtered_progression(k_lo, k_hi, std::nullopt, std::nullopt);
    ScanResult result;
    result.steps_tested = prog.count;
    const auto chunks = plan_chunks(prog, workers);
    std::vector<std::vector<TrapHit>> partial(chunks.size());
    run_chunks(chunks, [&](std::size_t idx, const mpz_class& start_k, const mpz_class& cnt) {
        std::vector<TrapHit>& out = partial[idx];
        mpz_class k = start_k;
        for (mpz_class done = 0; done < cnt; ++done, k += prog.stride) {
            // x^2 (x-c)^2 + (n-cx)^2 - (2n + K) x^2 = 0
            const mpz_class K = k + offset;
            std::vector<mpz_class> coeffs{n * n, -2 * n * c, 2 * c * c - 2 * n - K, -2 * c,
                                          mpz_class(1)};
            const auto roots = integer_roots_near(IntPolynomial(coeffs), anchor, Natural(8));
            for (const mpz_class& x : roots) {
                if (x < 2) continue;
                const Natural d = gcd(Natural(x), n);
                if (d > 1 && d < n) out.push_back({k, Natural(x), d});
            }
        }
    });
    for (auto& part : partial)
        result.hits.insert(result.hits.end(), part.begin(), part.end());
    return result;
}

CoveragePrediction predict_coverage(const TrapSpec& spec, const Natural& b, bool allow_general) {
    validate_spec_common(spec);
    if (sgn(b) <= 0) throw std::invalid_argument("predict_coverage: b must be >= 1");
    if (spec.order > 3 && !allow_general)
        throw std::invalid_argument(
            "predict_coverage: orders above 3 are experimental; pass allow_general");

    const unsigned m = spec.order + 1;
    const mpz_class h = spec.s.get_num();
    const mpz_class t = spec.s.get_den();
    // one-sided length ((b/t)^m * n / s^(m+1))^(1/m^2); the scan index steps by
    // 1/t of a unit step when s = h/t
    const double ln_len = (m * ln_mpz(b) + ln_mpz(spec.n) - (m + 1.0) * ln_mpz(h) + ln_mpz(t)) /
                          (static_cast<double>(m) * m);
    const double one_side = std::exp(ln_len);

    CoveragePrediction pred;
    if (m % 2 == 0) {
        pred.side = Side::both;
        pred.length_estimate = 2.0 * one_side;
    } else {
        // positive steps sweep left of the anchor, k <= 0 sweeps right
        if (sgn(spec.k_lo) > 0) {
            pred.side = Side::left;
            pred.length_estimate = one_side;
        } else if (sgn(spec.k_hi) <= 0) {
            pred.side = Side::right;
            pred.length_estimate = one_side;
        } else {
            pred.side = Side::both;
            pred.length_estimate = 2.0 * one_side;
        }
    }
    switch (spec.order) {
        case 1: pred.formula_id = "2(b^2 n/s^3)^(1/4)"; break;
        case 2: pred.formula_id = "(b^3 n/s^4)^(1/9)"; break;
        case 3: pred.formula_id = "2(b^4 n/s^5)^(1/16)"; break;
        default: pred.formula_id = "(b^m n/s^(m+1))^(1/m^2)"; break;
    }
    return pred;
}

CoveragePrediction predict_circle_coverage(const Natural& n, const Natural& b) {
    if (sgn(b) <= 0) throw std::invalid_argument("predict_circle_coverage: b must be >= 1");
    CoveragePrediction pred;
    pred.side = Side::both;
    pred.length_estimate = 2.0 * std::exp((ln_mpz(b) + ln_mpz(n)) / 4.0);
    pred.formula_id = "2(b n)^(1/4)";
    return pred;
}

std::pair<Natural, Natural> fermat_number_filter(unsigned fermat_index) {
    if (fermat_index < 2)
        throw std::invalid_argument("fermat_number_filter: index must be >= 2");
    if (fermat_index > 24)
        throw std::invalid_argument("fermat_number_filter: index too large to materialize");
    Natural f = (Natural(1) << (1u << fermat_index)) + 1;
    const Natural modulus = Natural(1) << (2 * (fermat_index + 2));
    const Natural two_sqrt = isqrt(4 * f);
    const Natural residue = mod_nonneg(2 - two_sqrt, modulus);
    return {modulus, residue};
}

mpz_class count_filtered_steps(const mpz_class& k_lo, const mpz_class& k_hi,
                               const std::optional<unsigned>& parity,
                               const std::optional<ResidueFilter>& residue) {
    if (k_lo > k_hi) return 0;
    return filtered_progression(k_lo, k_hi, parity, residue).count;
}

TangentScanResult tangent_scan(const Natural& N, const mpz_class& k_lo, const mpz_class& k_hi,
                               bool use_parity, const std::optional<ResidueFilter>& residue,
                               unsigned workers) {
    if (N < 3) throw std::invalid_argument("tangent_scan: N must be >= 3");
    if (k_lo > k_hi) throw std::invalid_argument("tangent_scan: empty k range");
    const Natural c = isqrt(4 * N);
    std::optional<unsigned> parity;
    if (use_parity && mpz_odd_p(N.get_mpz_t()))
        parity = static_cast<unsigned>(mpz_odd_p(c.get_mpz_t()));

    const Progression prog = filtered_progression(k_lo, k_hi, parity, residue);
    TangentScanResult result;
    result.steps_tested = prog.count;
    const mpz_class four_n = 4 * N;
    const auto chunks = plan_chunks(prog, workers);
    std::vector<std::vector<TangentHit>> partial(chunks.size());
    run_chunks(chunks, [&](std::size_t idx, const mpz_class& start_k, const mpz_class& cnt) {
        std::vector<TangentHit>& out = partial[idx];
        mpz_class k = start_k;
        for (mpz_class done = 0; done < cnt; ++done, k += prog.stride) {
            const mpz_class a = c + k;
            if (sgn(a) <= 0) continue;
            const mpz_class disc = a * a - four_n;
            if (sgn(disc) < 0) continue;
            const auto y = as_square(disc);
            if (!y) continue;
            const mpz_class x = (a - *y) / 2;
            const mpz_class cof = (a + *y) / 2;
            if (sgn(x) <= 0) continue;
            out.push_back({k, Natural(x), Natural(cof)});
        }
    });
    for (auto& part : partial)
        result.hits.insert(result.hits.end(), part.begin(), part.end());
    return result;
}

}  // namespace trapfactor
