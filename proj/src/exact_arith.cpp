#include "trapfactor/exact_arith.hpp"

#include <atomic>
#include <utility>

namespace trapfactor {

namespace {

std::atomic<unsigned> g_floor_cap_bits{4096};

void require_nonnegative(const Natural& n, const char* what) {
    if (sgn(n) < 0) throw std::invalid_argument(std::string(what) + ": negative value");
}

}  // namespace

Natural isqrt(const Natural& n) {
    require_nonnegative(n, "isqrt");
    Natural r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

Natural iroot(const Natural& n, unsigned degree) {
    require_nonnegative(n, "iroot");
    if (degree == 0) throw std::invalid_argument("iroot: degree must be >= 1");
    Natural r;
    mpz_root(r.get_mpz_t(), n.get_mpz_t(), degree);
    return r;
}

std::optional<Natural> as_square(const Natural& n) {
    if (sgn(n) < 0) return std::nullopt;
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return std::nullopt;
    return isqrt(n);
}

Natural gcd(const Natural& a, const Natural& b) {
    require_nonnegative(a, "gcd");
    require_nonnegative(b, "gcd");
    Natural g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

unsigned floor_precision_cap() { return g_floor_cap_bits.load(); }

void set_floor_precision_cap(unsigned bits) {
    if (bits < 64) throw std::invalid_argument("precision cap must be at least 64 bits");
    g_floor_cap_bits.store(bits);
}

namespace {

struct RadicalGroup {
    Natural radicand;
    unsigned degree;
    Rational weight;  // accumulated coeff*scale
};

mpz_class floor_exact(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// lo <= q*v <= hi for v in [u, u+1], as integer bounds (q rational, u integer >= 0)
void accumulate_scaled(const Rational& q, const mpz_class& u, mpz_class& lo, mpz_class& hi) {
    const mpz_class u1 = u + 1;
    mpz_class a, b;
    if (sgn(q) >= 0) {
        mpz_class num_lo = q.get_num() * u, num_hi = q.get_num() * u1;
        mpz_fdiv_q(a.get_mpz_t(), num_lo.get_mpz_t(), q.get_den_mpz_t());
        mpz_cdiv_q(b.get_mpz_t(), num_hi.get_mpz_t(), q.get_den_mpz_t());
    } else {
        mpz_class num_lo = q.get_num() * u1, num_hi = q.get_num() * u;
        mpz_fdiv_q(a.get_mpz_t(), num_lo.get_mpz_t(), q.get_den_mpz_t());
        mpz_cdiv_q(b.get_mpz_t(), num_hi.get_mpz_t(), q.get_den_mpz_t());
    }
    lo += a;
    hi += b;
}

}  // namespace

mpz_class floor_radical_sum(const std::vector<RadicalTerm>& terms, unsigned cap_bits) {
    Rational rational_part = 0;
    std::vector<RadicalGroup> groups;

    for (const RadicalTerm& term : terms) {
        if (term.degree == 0) throw std::invalid_argument("radical term: degree must be >= 1");
        require_nonnegative(term.radicand, "radical term");
        if (sgn(term.coeff) == 0 || sgn(term.scale) == 0 || sgn(term.radicand) == 0) continue;

        Rational weight = term.scale;
        weight *= Rational(term.coeff);
        if (term.degree == 1 || term.radicand == 1) {
            rational_part += weight * Rational(term.radicand);
            continue;
        }
        const Natural w = iroot(term.radicand, term.degree);
        Natural back;
        mpz_pow_ui(back.get_mpz_t(), w.get_mpz_t(), term.degree);
        if (back == term.radicand) {
            rational_part += weight * Rational(w);
            continue;
        }
        bool merged = false;
        for (RadicalGroup& g : groups) {
            if (g.degree == term.degree && g.radicand == term.radicand) {
                g.weight += weight;
                merged = true;
                break;
            }
        }
        if (!merged) groups.push_back({term.radicand, term.degree, weight});
    }
    std::erase_if(groups, [](const RadicalGroup& g) { return sgn(g.weight) == 0; });

    if (groups.empty()) return floor_exact(rational_part);

    for (unsigned prec = 64;; prec *= 2) {
        if (prec > cap_bits) break;
        // integer bounds of 2^prec * sum
        mpz_class lo, hi;
        {
            mpz_class scaled_num = rational_part.get_num() << prec;
            mpz_class a, b;
            mpz_fdiv_q(a.get_mpz_t(), scaled_num.get_mpz_t(), rational_part.get_den_mpz_t());
            mpz_cdiv_q(b.get_mpz_t(), scaled_num.get_mpz_t(), rational_part.get_den_mpz_t());
            lo = a;
            hi = b;
        }
        for (const RadicalGroup& g : groups) {
            mpz_class shifted = g.radicand;
            shifted <<= static_cast<unsigned long>(g.degree) * prec;
            const mpz_class u = iroot(shifted, g.degree);  // u <= 2^prec * radicand^(1/degree) < u+1
            accumulate_scaled(g.weight, u, lo, hi);
        }
        mpz_class floor_lo, floor_hi;
        mpz_fdiv_q_2exp(floor_lo.get_mpz_t(), lo.get_mpz_t(), prec);
        mpz_fdiv_q_2exp(floor_hi.get_mpz_t(), hi.get_mpz_t(), prec);
        if (floor_lo == floor_hi) return floor_lo;
    }
    throw PrecisionCapExceeded(cap_bits);
}

mpz_class floor_radical_sum(const std::vector<RadicalTerm>& terms) {
    return floor_radical_sum(terms, floor_precision_cap());
}

Natural parse_natural(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty integer literal");
    for (char ch : text) {
        if (ch < '0' || ch > '9') throw std::invalid_argument("invalid integer literal: " + text);
    }
    return Natural(text);
}

}  // namespace trapfactor
