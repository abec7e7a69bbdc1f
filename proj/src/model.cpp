#include "lshmodel/model.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace lshmodel::model {

namespace {

void require(bool ok, const char* what) {
    if (!ok)
        throw std::domain_error(what);
}

Rational half_power(unsigned exponent) {
    Rational r(1);
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), exponent);
    return r;
}

} // namespace

void ModelQuery::validate() const {
    require(d >= 1, "d must be >= 1");
    require(m >= 1 && m <= kMaxTables, "m must be in [1, 64]");
    require(ell >= 1 && ell <= m, "ell must be in [1, m]");
}

BigInt binomial(unsigned n, unsigned k) {
    if (k > n)
        return 0;
    BigInt result;
    mpz_bin_uiui(result.get_mpz_t(), n, k);
    return result;
}

Rational per_dim_coverage_q(int ell) {
    require(ell >= 1, "ell must be >= 1");
    const auto l = static_cast<unsigned>(ell);
    BigInt num = 1;
    num <<= l + 2;
    num -= 2;
    BigInt den = l + 1;
    den <<= l + 1;
    Rational q(num, den);
    q.canonicalize();
    assert(l > 12 || q == quadrant_sum_p1(ell));
    return q;
}

Rational quadrant_sum_p1(int ell) {
    require(ell >= 1, "ell must be >= 1");
    const auto l = static_cast<unsigned>(ell);
    // Every sign pattern has measure 2^-ell inside [-1/2, 1/2]^ell.
    const Rational quadrant_measure = half_power(l);
    Rational total;
    for (unsigned positives = 0; positives <= l; ++positives) {
        const unsigned negatives = l - positives;
        // Mean of the max of a uniforms on [0, 1/2] is a / (2 (a + 1)); the min
        // of b uniforms on [-1/2, 0] mirrors it.
        Rational mean_max(positives, 2 * (positives + 1));
        Rational mean_min(negatives, 2 * (negatives + 1));
        mean_max.canonicalize();
        mean_min.canonicalize();
        const Rational integrand_mean = 1 - mean_max - mean_min;
        total += Rational(binomial(l, positives)) * quadrant_measure * integrand_mean;
    }
    return total;
}

Rational p_intersection(int ell, int d) {
    require(d >= 1, "d must be >= 1");
    return pow(per_dim_coverage_q(ell), static_cast<unsigned>(d));
}

Rational p_union(int m, int d) {
    return p_at_least(m, 1, d);
}

Rational p_union_printed_last_term(int m, int d) {
    ModelQuery{m, 1, d}.validate();
    Rational total;
    for (int j = 1; j <= m; ++j) {
        const int level = (j == m && m > 1) ? m - 1 : j;
        const Rational term = Rational(binomial(m, j)) * p_intersection(level, d);
        total += (j % 2 == 1) ? term : Rational(-term);
    }
    return total;
}

Rational p_at_least(int m, int ell, int d) {
    ModelQuery{m, ell, d}.validate();
    Rational total;
    for (int j = ell; j <= m; ++j) {
        const BigInt weight = binomial(j - 1, ell - 1) * binomial(m, j);
        const Rational term = Rational(weight) * p_intersection(j, d);
        if ((j - ell) % 2 == 0)
            total += term;
        else
            total -= term;
    }
    return total;
}

} // namespace lshmodel::model
