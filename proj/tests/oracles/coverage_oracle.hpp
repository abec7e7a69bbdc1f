#pragma once

// Test-only oracles, independent of the inclusion-exclusion code paths.
//
// A unit cell with uniform offset covers a fixed point t of the query
// interval with probability 1 - |t|. Over d axes that is c(t) = prod (1 - |t_j|),
// and the number of covering cells among m is Binomial(m, c(t)). Hence
//   p(m, ell, d) = int_{[-1/2,1/2]^d} P[Binomial(m, c(t)) >= ell] dt,
// a polynomial in |t_j| on each orthant, integrated here by Gauss-Legendre.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double binomial_tail(int m, int ell, double c) {
    double total = 0.0;
    for (int k = ell; k <= m; ++k) {
        double coeff = 1.0;
        for (int i = 0; i < k; ++i)
            coeff = coeff * (m - i) / (i + 1);
        total += coeff * std::pow(c, k) * std::pow(1.0 - c, m - k);
    }
    return total;
}

// d <= 3. Exact up to rounding while m * d < 60.
inline double pointwise_p_at_least(int m, int ell, int d) {
    using Rule = boost::math::quadrature::gauss<double, 30>;
    std::function<double(int, double)> nest = [&](int axis, double c) -> double {
        if (axis == d)
            return binomial_tail(m, ell, c);
        return 2.0 * Rule::integrate([&](double t) { return nest(axis + 1, c * (1.0 - t)); }, 0.0, 0.5);
    };
    return nest(0, 1.0);
}

// int_{-1/2}^{1/2} (1 - |t|)^ell dt by composite Simpson on each half.
inline double per_dim_coverage(int ell, int panels = 2000) {
    const double h = 0.5 / panels;
    double sum = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::pow(1.0 - t, ell);
    }
    return 2.0 * sum * h / 3.0;
}

} // namespace oracle
