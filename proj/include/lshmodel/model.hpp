#pragma once

// Exact coverage probabilities for m randomly placed unit grid cells that
// each contain the query point, measured against the unit query cube
// (cell side b and query side s both normalized to 1).
//
// p(m, ell, d) is the expected volume of the part of the query cube that is
// covered by at least `ell` of the `m` cells in `d` dimensions.

#include "lshmodel/rational.hpp"

namespace lshmodel::model {

inline constexpr int kMaxTables = 64;

struct ModelQuery {
    int m = 1;
    int ell = 1;
    int d = 1;

    // Throws std::domain_error unless 1 <= ell <= m <= kMaxTables and d >= 1.
    void validate() const;
};

// Cell side and query side. Only b == s == 1 is modelled; the empirical
// index maps its physical side 1/g onto this normalization.
struct ScaleParams {
    double b = 1.0;
    double s = 1.0;
};

// C(n, k), zero when k > n.
BigInt binomial(unsigned n, unsigned k);

// Expected covered length of [-1/2, 1/2] under the intersection of `ell`
// independent unit cells containing 0:
//   q(ell) = (2^{ell+2} - 2) / ((ell + 1) 2^{ell+1}).
Rational per_dim_coverage_q(int ell);

// The same quantity assembled quadrant by quadrant: for each sign pattern
// with i positive and ell - i negative offsets, the integral of
// 1 - max(positives) + min(negatives), using order-statistic means.
Rational quadrant_sum_p1(int ell);

// q(ell)^d: expected covered volume of the intersection of `ell` cells.
Rational p_intersection(int ell, int d);

// Inclusion-exclusion over intersections: p(m, 1, d).
Rational p_union(int m, int d);

// Union formula with the final term
// C(m, m) p(1, m-1, d) instead of C(m, m) p(1, m, d). Kept only to
// demonstrate, against Monte Carlo, that it is wrong.
Rational p_union_printed_last_term(int m, int d);

// p(m, ell, d) = sum_{j=ell..m} (-1)^{j-ell} C(j-1, ell-1) C(m, j) q(j)^d.
Rational p_at_least(int m, int ell, int d);

inline Rational p_at_least(const ModelQuery& query) {
    query.validate();
    return p_at_least(query.m, query.ell, query.d);
}

} // namespace lshmodel::model
