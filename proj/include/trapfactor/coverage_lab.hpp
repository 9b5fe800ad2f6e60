#pragma once

#include <iosfwd>
#include <vector>

#include "trapfactor/traps.hpp"

namespace trapfactor {

struct CoverageRecord {
    Natural n;
    int order;  // 1..3 = Taylor trap order; 0 = osculating-circle trap
    Rational s;
    Natural b;
    Side side;
    double predicted = 0.0;
    double empirical = 0.0;  // span of divisor positions actually trapped
    double ratio = 0.0;      // empirical / predicted when predicted > 0
};

// Plants odd divisors at every position in a window around the trap anchor
// (cofactor = nearest odd to n/d, so n' = d * cofactor stays odd), confirms
// each candidate through the production scan at its exact step index, and
// records the extremal trapped span per sample. Order 2 yields two records
// per sample (left: k in [1,b]; right: k in [-b+1,0]); order 0 measures the
// circle trap with recentered k in [1,b]. Samples are independent and may be
// measured on parallel workers; records always come back in input order.
std::vector<CoverageRecord> measure_coverage(int order, const Rational& s, const Natural& b,
                                             const std::vector<Natural>& n_samples,
                                             unsigned workers = 1);

struct FermatCircleComparison {
    struct Row {
        Natural n;
        double fermat_span = 0.0;
        double circle_span = 0.0;
    };
    std::vector<Row> rows;
    unsigned violations = 0;      // samples with fermat_span < circle_span
    double predicted_ratio = 0.0;  // b^(1/4)
};

// Side-by-side empirical spans of the order-1 trap and the circle trap at the
// same budget; violations are reported, not hard-failed (statistical claim).
FermatCircleComparison compare_fermat_vs_circle(const std::vector<Natural>& n_samples,
                                                const Natural& b);

// CSV: n,order,s_num,s_den,b,side,predicted,empirical,ratio
// Integers in decimal; reals with 6 significant digits.
void write_coverage_csv(std::ostream& os, const std::vector<CoverageRecord>& records);

}  // namespace trapfactor
