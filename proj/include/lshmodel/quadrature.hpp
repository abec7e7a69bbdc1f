#pragma once

// Numerical checks of the fixed integrand families that feed the coverage
// model. Each family is evaluated by a deterministic route (Gauss-Legendre,
// with the order-statistic reduction for min/max integrands) and by plain
// Monte Carlo over the full box, and compared with closed forms.
//
// All x and y variables range over [0, 1/2] and all v over [-1/2, 0].
//
//   LINEAR_1D   x + 1/2                                    3/8
//   PRODUCT_2D  (x1 + 1/2)(x2 + 1/2)                       9/64
//   PRODUCT_ND  prod_i (x_i + 1/2)                         (3/8)^d
//   MIN_2D      os(x1, x2) + 1/2                           5/24
//   MIN_ND      os(x1..xd) + 1/2                           (2d+1)/((d+1) 2^{d+1})
//   YV_2D       y - v                                      1/8
//   YV_ND       prod_k (y_k - v_k), m pairs                (1/8)^m
//   COMBINED    (os(x1..xd) + 1/2) prod_k (y_k - v_k)      see printed/derived
//
// `os` is the order statistic whose density on [0, 1/2] is d x^{d-1} (after
// scaling), i.e. the largest coordinate: that is the statistic the reduction
// d * int x^{d-1} (x + 1/2) dx integrates and the only one that reproduces
// 5/24 and (2d+1)/((d+1) 2^{d+1}). The family is still named MIN after its
// printed integrand; the value of the literal smallest-coordinate reading,
// (d+2)/((d+1) 2^{d+1}), is reported as lower_order_closed_form.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lshmodel/rational.hpp"

namespace lshmodel::quad {

enum class IntegralId { LINEAR_1D, PRODUCT_2D, PRODUCT_ND, MIN_2D, MIN_ND, YV_2D, YV_ND, COMBINED };

inline constexpr IntegralId kAllIntegrals[] = {
    IntegralId::LINEAR_1D, IntegralId::PRODUCT_2D, IntegralId::PRODUCT_ND, IntegralId::MIN_2D,
    IntegralId::MIN_ND,    IntegralId::YV_2D,      IntegralId::YV_ND,      IntegralId::COMBINED,
};

std::string_view to_string(IntegralId id);

// Reduced (1-D) evaluation is supported up to this many x variables or
// (y, v) pairs.
inline constexpr int kMaxReducedDim = 12;
// Full tensor-product quadrature runs when the smooth integrand has at most
// this many variables.
inline constexpr int kMaxTensorDim = 8;

struct QuadOptions {
    std::uint64_t mc_samples = 200'000;
    std::uint64_t seed = 0x9E3779B97F4A7C15ull;
};

struct IntegralValue {
    double deterministic = 0.0;
    // Full tensor Gauss-Legendre on smooth product integrands, when small enough.
    std::optional<double> tensor;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    std::uint64_t mc_samples = 0;
};

// `d` is the number of x variables (PRODUCT_ND, MIN_ND, COMBINED) and `m` the
// number of (y, v) pairs (YV_ND, COMBINED); fixed-size families ignore both.
// Throws std::domain_error for parameters outside [1, kMaxReducedDim].
IntegralValue eval_integral(IntegralId id, int d, int m, const QuadOptions& options = {});

// Reference closed form. For COMBINED this is
// (2m+1) / (8^d (m+1) 2^{m+1}).
Rational printed_closed_form(IntegralId id, int d, int m);

// Closed form derived from the integrand by Fubini and order statistics. For
// COMBINED this is (2d+1)/((d+1) 2^{d+1}) * (1/8)^m.
Rational derived_closed_form(IntegralId id, int d, int m);

// Value under the smallest-coordinate reading (MIN_2D, MIN_ND, COMBINED only).
std::optional<Rational> lower_order_closed_form(IntegralId id, int d, int m);

enum class Verdict { MATCHES_PRINTED, MATCHES_DERIVED_ONLY, INCONCLUSIVE };

std::string_view to_string(Verdict v);

struct IntegralCheck {
    IntegralId id{};
    int d = 0;
    int m = 0;
    double numeric = 0.0;
    std::optional<double> tensor;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    Rational printed_closed_form;
    Rational derived_closed_form;
    std::optional<Rational> lower_order_closed_form;
    double abs_err_numeric_vs_printed = 0.0;
    double abs_err_numeric_vs_derived = 0.0;
    // |printed - derived| in units of the Monte Carlo standard error.
    double candidate_separation = 0.0;
    Verdict verdict = Verdict::INCONCLUSIVE;
};

// Verdict rules, with `tol` relative to the closed form being compared:
//   INCONCLUSIVE if Monte Carlo misses the deterministic value by > 4 stderr
//   or the tensor cross-check misses it by more than tol; otherwise
//   MATCHES_PRINTED if the deterministic value matches the printed form,
//   MATCHES_DERIVED_ONLY if it matches only the derived form.
IntegralCheck check_integral(IntegralId id, int d, int m, double tol,
                             const QuadOptions& options = {});

// One check per (id, parameter) combination: fixed-size families once,
// PRODUCT_ND and MIN_ND for d = 1..d_max, YV_ND for m = 1..m_max, COMBINED
// for every (d, m) pair. Throws std::domain_error if tol <= 0.
std::vector<IntegralCheck> check_all(int d_max, int m_max, double tol,
                                     const QuadOptions& options = {});

} // namespace lshmodel::quad
