#include "trapfactor/coverage_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace trapfactor {

namespace {

constexpr int kCircleOrder = 0;

Natural nearest_odd_cofactor(const Natural& n, const Natural& d) {
    Natural q = (2 * n + d) / (2 * d);  // round(n/d)
    if (mpz_even_p(q.get_mpz_t())) {
        const Natural lo = q - 1, hi = q + 1;
        const Natural err_lo = abs(n - d * lo), err_hi = abs(n - d * hi);
        q = (err_lo < err_hi) ? lo : hi;
    }
    if (q < 3) q = 3;
    return q;
}

struct SideConfig {
    Side side;
    mpz_class k_lo, k_hi;
};

struct SpanMeasurement {
    double predicted = 0.0;
    double empirical = 0.0;
};

// span of trapped planted-divisor positions for one (n, family, side) setup
SpanMeasurement measure_one(const Natural& n, int order, const Rational& s, const Natural& b,
                            const SideConfig& cfg) {
    SpanMeasurement out;

    Natural anchor;
    double one_side = 0.0;
    if (order == kCircleOrder) {
        anchor = isqrt(n);
        const auto pred = predict_circle_coverage(n, b);
        out.predicted = pred.length_estimate;
        one_side = pred.length_estimate / 2.0;
    } else {
        const unsigned m = static_cast<unsigned>(order) + 1;
        Natural scaled = n * Natural(s.get_den());
        scaled /= Natural(s.get_num());
        anchor = iroot(scaled, m);
        TrapSpec probe{n, static_cast<unsigned>(order), s, cfg.k_lo, cfg.k_hi,
                       std::nullopt, std::nullopt};
        const auto pred = predict_coverage(probe, b);
        out.predicted = pred.length_estimate;
        one_side = (pred.side == Side::both) ? pred.length_estimate / 2.0 : pred.length_estimate;
    }

    Natural window(static_cast<unsigned long>(std::ceil(4.0 * one_side)) + 16);
    Natural min_pos = 0, max_pos = 0;
    bool any = false;
    const auto record_position = [&](const Natural& pos) {
        if (abs(pos - anchor) > window) return;
        if (!any || pos < min_pos) min_pos = pos;
        if (!any || pos > max_pos) max_pos = pos;
        any = true;
    };

    Natural d = anchor - window;
    if (d < 3) d = 3;
    if (mpz_even_p(d.get_mpz_t())) d += 1;
    const Natural d_end = anchor + window;
    for (; d <= d_end; d += 2) {
        const Natural q0 = nearest_odd_cofactor(n, d);
        const Natural planted = d * q0;
        if (planted < 9) continue;

        if (order == kCircleOrder) {
            const Natural c = isqrt(4 * planted);
            const mpz_class raw =
                (mpz_class(d) - c) * (d - c) + (mpz_class(q0) - c) * (q0 - c) - 2 * planted;
            const mpz_class k = raw - circle_trap_constant(planted);
            if (k < cfg.k_lo || k > cfg.k_hi) continue;
            const ScanResult res = circle_trap_scan(planted, k, k, true);
            for (const TrapHit& hit : res.hits) {
                if (hit.x == d || hit.x == q0) record_position(hit.x);
            }
        } else {
            TrapSpec spec{planted, static_cast<unsigned>(order), s, 0, 0,
                          std::nullopt, std::nullopt};
            const TrapEquation eq = build_trap(spec);
            const auto k = eq.step_index_for_root(d);
            if (!k || *k < cfg.k_lo || *k > cfg.k_hi) continue;
            spec.k_lo = spec.k_hi = *k;
            const ScanResult res = scan(spec);
            for (const TrapHit& hit : res.hits) {
                if (hit.x == d || hit.x == q0) record_position(hit.x);
            }
        }
    }
    if (any) out.empirical = mpz_get_d(Natural(max_pos - min_pos).get_mpz_t());
    return out;
}

std::vector<SideConfig> side_configs(int order, const Natural& b) {
    const mpz_class budget(b);
    if (order == 2) {
        return {{Side::left, 1, budget}, {Side::right, 1 - budget, 0}};
    }
    if (order == kCircleOrder) return {{Side::both, 1, budget}};
    return {{Side::both, 0, budget}};
}

}  // namespace

std::vector<CoverageRecord> measure_coverage(int order, const Rational& s, const Natural& b,
                                             const std::vector<Natural>& n_samples,
                                             unsigned workers) {
    if (order < 0 || order > 3)
        throw std::invalid_argument("measure_coverage: order must be 1..3 or 0 for the circle trap");
    if (b < 1) throw std::invalid_argument("measure_coverage: b must be >= 1");
    if (order == kCircleOrder && s != Rational(1))
        throw std::invalid_argument("measure_coverage: the circle trap has no s parameter");
    for (const Natural& n : n_samples)
        if (n < 9 || mpz_even_p(n.get_mpz_t()))
            throw std::invalid_argument("measure_coverage: samples must be odd and >= 9");

    const auto sides = side_configs(order, b);
    std::vector<CoverageRecord> records(n_samples.size() * sides.size());
    const auto measure_sample = [&](std::size_t i) {
        for (std::size_t j = 0; j < sides.size(); ++j) {
            const SpanMeasurement m = measure_one(n_samples[i], order, s, b, sides[j]);
            CoverageRecord& rec = records[i * sides.size() + j];
            rec.n = n_samples[i];
            rec.order = order;
            rec.s = s;
            rec.b = b;
            rec.side = sides[j].side;
            rec.predicted = m.predicted;
            rec.empirical = m.empirical;
            rec.ratio = (m.predicted > 0.0) ? m.empirical / m.predicted : 0.0;
        }
    };

    const unsigned w = std::min<std::size_t>(std::max(1u, workers), n_samples.size());
    if (w <= 1) {
        for (std::size_t i = 0; i < n_samples.size(); ++i) measure_sample(i);
        return records;
    }
    // samples are independent; a shared counter hands them out, records land
    // at fixed slots so the merge order never depends on scheduling
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    for (unsigned ti = 0; ti < w; ++ti) {
        pool.emplace_back([&, ti]() {
            try {
                for (std::size_t i = next.fetch_add(1); i < n_samples.size();
                     i = next.fetch_add(1))
                    measure_sample(i);
            } catch (...) {
                errors[ti] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return records;
}

FermatCircleComparison compare_fermat_vs_circle(const std::vector<Natural>& n_samples,
                                                const Natural& b) {
    if (b < 2) throw std::invalid_argument("compare_fermat_vs_circle: b must be >= 2");
    FermatCircleComparison cmp;
    cmp.predicted_ratio = std::pow(mpz_get_d(b.get_mpz_t()), 0.25);
    for (const Natural& n : n_samples) {
        const auto fermat = measure_coverage(1, 1, b, {n});
        const auto circle = measure_coverage(kCircleOrder, 1, b, {n});
        FermatCircleComparison::Row row;
        row.n = n;
        row.fermat_span = fermat.front().empirical;
        row.circle_span = circle.front().empirical;
        if (row.fermat_span < row.circle_span) ++cmp.violations;
        cmp.rows.push_back(row);
    }
    return cmp;
}

void write_coverage_csv(std::ostream& os, const std::vector<CoverageRecord>& records) {
    os << "n,order,s_num,s_den,b,side,predicted,empirical,ratio\n";
    char buf[64];
    const auto real6 = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (const CoverageRecord& r : records) {
        const char* side = r.side == Side::left ? "left" : r.side == Side::right ? "right" : "both";
        os << r.n << ',' << r.order << ',' << r.s.get_num() << ',' << r.s.get_den() << ',' << r.b
           << ',' << side << ',' << real6(r.predicted) << ',' << real6(r.empirical) << ','
           << real6(r.ratio) << '\n';
    }
}

}  // namespace trapfactor
