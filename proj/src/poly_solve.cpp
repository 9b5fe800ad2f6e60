#include "trapfactor/poly_solve.hpp"

#include <algorithm>
#include <cassert>

namespace trapfactor {

mpz_class IntPolynomial::operator()(const mpz_class& x) const {
    mpz_class acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<mpz_class> quadratic_integer_roots(const mpz_class& a, const mpz_class& b,
                                               const mpz_class& c) {
    if (sgn(a) == 0) throw std::invalid_argument("quadratic_integer_roots: a must be nonzero");
    const mpz_class disc = b * b - 4 * a * c;
    if (sgn(disc) < 0) return {};
    const auto root = as_square(disc);
    if (!root) return {};
    std::vector<mpz_class> out;
    const mpz_class two_a = 2 * a;
    for (int sign : {-1, +1}) {
        const mpz_class num = -b + sign * *root;
        if (mpz_divisible_p(num.get_mpz_t(), two_a.get_mpz_t())) out.push_back(num / two_a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

mpz_class cubic_discriminant(const CubicShape& p) {
    const mpz_class &a = p.a, &b = p.b, &c = p.c, &d = p.d;
    return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c -
           27 * a * a * d * d;
}

bool cubic_prefilter(const CubicShape& p) {
    const mpz_class neg_disc = -cubic_discriminant(p);
    if (sgn(neg_disc) < 0) return false;
    return as_square(neg_disc).has_value();
}

namespace {

// ---- exact rational polynomial helpers (ascending coefficients) ----

using QPoly = std::vector<mpq_class>;

void trim(QPoly& p) {
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

int deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

QPoly derivative(const QPoly& p) {
    QPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    trim(d);
    return d;
}

int eval_sign(const QPoly& p, const mpq_class& x) {
    mpq_class acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return sgn(acc);
}

// divide by |leading| so the chain stays small; positive scaling keeps signs
void scale_down(QPoly& p) {
    if (p.empty()) return;
    mpq_class lead = abs(p.back());
    for (auto& c : p) c /= lead;
}

QPoly remainder(QPoly a, const QPoly& b) {
    assert(!b.empty());
    while (deg(a) >= deg(b)) {
        const mpq_class q = a.back() / b.back();
        const int shift = deg(a) - deg(b);
        for (int i = 0; i <= deg(b); ++i) a[i + shift] -= q * b[i];
        a.pop_back();
        trim(a);
        if (a.empty()) break;
    }
    return a;
}

QPoly divide_exact(const QPoly& a, const QPoly& b) {
    QPoly rem = a;
    QPoly quot(a.size(), mpq_class(0));
    while (deg(rem) >= deg(b) && !rem.empty()) {
        const mpq_class q = rem.back() / b.back();
        const int shift = deg(rem) - deg(b);
        quot[shift] = q;
        for (int i = 0; i <= deg(b); ++i) rem[i + shift] -= q * b[i];
        trim(rem);
    }
    assert(rem.empty());
    trim(quot);
    return quot;
}

QPoly poly_gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = remainder(a, b);
        scale_down(r);
        a = std::move(b);
        b = std::move(r);
    }
    scale_down(a);
    return a;
}

QPoly squarefree_part(const QPoly& p) {
    const QPoly d = derivative(p);
    if (d.empty()) return p;
    const QPoly g = poly_gcd(p, d);
    if (deg(g) <= 0) return p;
    return divide_exact(p, g);
}

std::vector<QPoly> sturm_chain(const QPoly& sf) {
    std::vector<QPoly> chain;
    chain.push_back(sf);
    QPoly d = derivative(sf);
    if (d.empty()) return chain;
    chain.push_back(d);
    while (true) {
        QPoly r = remainder(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        scale_down(r);
        chain.push_back(std::move(r));
        if (deg(chain.back()) == 0) break;
    }
    return chain;
}

int sign_variations(const std::vector<QPoly>& chain, const mpq_class& x) {
    int count = 0, prev = 0;
    for (const QPoly& p : chain) {
        const int s = eval_sign(p, x);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// deflate a known exact rational root (synthetic division by (x - r))
QPoly deflate(const QPoly& p, const mpq_class& r) {
    QPoly b(std::vector<mpq_class>{-r, mpq_class(1)});
    return divide_exact(p, b);
}

struct Isolator {
    const IntPolynomial& original;
    std::vector<mpz_class> found;
    bool restart = false;
    mpq_class restart_root;

    void note_root_at(const mpq_class& x) {
        if (mpz_cmp_ui(x.get_den_mpz_t(), 1) != 0) return;
        const mpz_class z(x.get_num());
        if (sgn(original(z)) == 0) found.push_back(z);
    }

    void candidates_in(const mpq_class& lo, const mpq_class& hi) {
        // width <= 1/2, so at most one integer z with lo < z <= hi
        const mpz_class z = floor_q(hi);
        if (mpq_class(z) > lo && sgn(original(z)) == 0) found.push_back(z);
    }

    // counts roots of the chain's first polynomial in (lo, hi]
    void bisect(const std::vector<QPoly>& chain, const mpq_class& lo, const mpq_class& hi,
                int count) {
        if (count <= 0) return;
        const mpq_class width = hi - lo;
        if (count == 1 && width <= mpq_class(1, 2)) {
            candidates_in(lo, hi);
            return;
        }
        mpq_class mid = (lo + hi) / 2;
        if (eval_sign(chain.front(), mid) == 0) {
            note_root_at(mid);
            restart = true;  // rebuild the chain without this root
            restart_root = mid;
            return;
        }
        const int left = sign_variations(chain, lo) - sign_variations(chain, mid);
        bisect(chain, lo, mid, left);
        if (restart) return;
        bisect(chain, mid, hi, count - left);
    }
};

}  // namespace

std::vector<mpz_class> integer_roots_near(const IntPolynomial& p, const Rational& anchor,
                                          const Natural& radius_hint) {
    if (p.is_zero()) throw std::invalid_argument("integer_roots_near: zero polynomial");
    if (p.degree() == 0) return {};
    if (p.degree() == 1) {
        // c1*x + c0 == 0
        const mpz_class &c0 = p.coeffs[0], &c1 = p.coeffs[1];
        if (!mpz_divisible_p(c0.get_mpz_t(), c1.get_mpz_t())) return {};
        return {mpz_class(-c0 / c1)};
    }

    QPoly sf;
    {
        QPoly q;
        q.reserve(p.coeffs.size());
        for (const auto& c : p.coeffs) q.emplace_back(c);
        sf = squarefree_part(q);
    }

    Isolator iso{p, {}, false, mpq_class(0)};
    while (deg(sf) >= 1) {
        // Cauchy bound on sf's roots; the hinted window is widened to cover it so
        // no real root escapes the bracketing.
        mpq_class bound = 1;
        for (int i = 0; i < deg(sf); ++i) {
            mpq_class c = abs(sf[static_cast<std::size_t>(i)] / sf.back());
            if (c > bound) bound = c;
        }
        bound += 1;
        const mpq_class radius(radius_hint < 1 ? Natural(1) : radius_hint);
        mpq_class lo = mpq_class(anchor) - radius;
        mpq_class hi = mpq_class(anchor) + radius;
        const mpq_class third(1, 3);
        const mpq_class far_lo = -bound - third, far_hi = bound + third;
        if (far_lo < lo) lo = far_lo;
        if (far_hi > hi) hi = far_hi;

        if (eval_sign(sf, lo) == 0) {
            iso.note_root_at(lo);
            sf = deflate(sf, lo);
            continue;
        }
        if (eval_sign(sf, hi) == 0) {
            iso.note_root_at(hi);
            sf = deflate(sf, hi);
            continue;
        }
        const auto chain = sturm_chain(sf);
        const int total = sign_variations(chain, lo) - sign_variations(chain, hi);
        iso.restart = false;
        iso.bisect(chain, lo, hi, total);
        if (!iso.restart) break;
        // a rational root was hit mid-bisection; remove it and redo the rest
        sf = deflate(sf, iso.restart_root);
    }

    std::sort(iso.found.begin(), iso.found.end());
    iso.found.erase(std::unique(iso.found.begin(), iso.found.end()), iso.found.end());
    return iso.found;
}

}  // namespace trapfactor
