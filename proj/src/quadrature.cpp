#include "lshmodel/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>

#include "lshmodel/rng.hpp"
#include "lshmodel/stats.hpp"

namespace lshmodel::quad {

namespace {

using boost::math::quadrature::gauss;

// Polynomial integrands here have degree <= 13; 20 nodes integrate them exactly.
using Gauss1D = gauss<double, 20>;
using GaussTensorAxis = gauss<double, 4>;

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < dim(); ++i)
            v *= hi[i] - lo[i];
        return v;
    }
};

using Integrand = std::function<double(std::span<const double>)>;

// Layout of a point: x_1..x_d, then y_1..y_m, then v_1..v_m.
struct Layout {
    int xs = 0;
    int pairs = 0;

    Box box() const {
        Box b;
        for (int i = 0; i < xs + pairs; ++i) {
            b.lo.push_back(0.0);
            b.hi.push_back(0.5);
        }
        for (int i = 0; i < pairs; ++i) {
            b.lo.push_back(-0.5);
            b.hi.push_back(0.0);
        }
        return b;
    }
};

double upper_order_stat(std::span<const double> xs) {
    return *std::max_element(xs.begin(), xs.end());
}

double product_shifted(std::span<const double> xs) {
    double p = 1.0;
    for (double x : xs)
        p *= x + 0.5;
    return p;
}

double product_pairs(std::span<const double> ys, std::span<const double> vs) {
    double p = 1.0;
    for (std::size_t k = 0; k < ys.size(); ++k)
        p *= ys[k] - vs[k];
    return p;
}

struct Family {
    Layout layout;
    Integrand integrand;
};

Family family(IntegralId id, int d, int m) {
    auto check = [](int value, const char* what) {
        if (value < 1 || value > kMaxReducedDim)
            throw std::domain_error(std::string(what) + " must be in [1, 12]");
    };
    switch (id) {
    case IntegralId::LINEAR_1D:
        return {{1, 0}, [](std::span<const double> p) { return p[0] + 0.5; }};
    case IntegralId::PRODUCT_2D:
        return {{2, 0}, [](std::span<const double> p) { return product_shifted(p); }};
    case IntegralId::PRODUCT_ND:
        check(d, "d");
        return {{d, 0}, [](std::span<const double> p) { return product_shifted(p); }};
    case IntegralId::MIN_2D:
        return {{2, 0}, [](std::span<const double> p) { return upper_order_stat(p) + 0.5; }};
    case IntegralId::MIN_ND:
        check(d, "d");
        return {{d, 0}, [](std::span<const double> p) { return upper_order_stat(p) + 0.5; }};
    case IntegralId::YV_2D:
        return {{0, 1}, [](std::span<const double> p) { return p[0] - p[1]; }};
    case IntegralId::YV_ND:
        check(m, "m");
        return {{0, m}, [m](std::span<const double> p) {
                    const auto k = static_cast<std::size_t>(m);
                    return product_pairs(p.subspan(0, k), p.subspan(k, k));
                }};
    case IntegralId::COMBINED:
        check(d, "d");
        check(m, "m");
        return {{d, m}, [d, m](std::span<const double> p) {
                    const auto xs = static_cast<std::size_t>(d);
                    const auto k = static_cast<std::size_t>(m);
                    return (upper_order_stat(p.subspan(0, xs)) + 0.5) *
                           product_pairs(p.subspan(xs, k), p.subspan(xs + k, k));
                }};
    }
    throw std::domain_error("unknown integral id");
}

double linear_1d() {
    return Gauss1D::integrate([](double x) { return x + 0.5; }, 0.0, 0.5);
}

// d * int_0^{1/2} x^{d-1} (x + 1/2) dx: the order-statistic reduction.
double order_stat_reduced(int d) {
    return Gauss1D::integrate(
        [d](double x) { return static_cast<double>(d) * std::pow(x, d - 1) * (x + 0.5); }, 0.0, 0.5);
}

double yv_pair() {
    return Gauss1D::integrate(
        [](double y) { return Gauss1D::integrate([y](double v) { return y - v; }, -0.5, 0.0); }, 0.0,
        0.5);
}

double tensor_gauss(const Integrand& f, const Box& box) {
    // Expand the symmetric half-rule into full nodes and weights on [-1, 1].
    std::vector<double> nodes;
    std::vector<double> weights;
    const auto& a = GaussTensorAxis::abscissa();
    const auto& w = GaussTensorAxis::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        nodes.push_back(a[i]);
        weights.push_back(w[i]);
        nodes.push_back(-a[i]);
        weights.push_back(w[i]);
    }
    const std::size_t n = nodes.size();
    const std::size_t dim = box.dim();
    std::vector<std::size_t> index(dim, 0);
    std::vector<double> point(dim);
    double total = 0.0;
    while (true) {
        double weight = 1.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double half = 0.5 * (box.hi[k] - box.lo[k]);
            point[k] = box.lo[k] + half * (nodes[index[k]] + 1.0);
            weight *= weights[index[k]] * half;
        }
        total += weight * f(point);
        std::size_t k = 0;
        while (k < dim && ++index[k] == n)
            index[k++] = 0;
        if (k == dim)
            break;
    }
    return total;
}

RunningStats monte_carlo(const Integrand& f, const Box& box, std::uint64_t samples,
                         SplitMix64 rng) {
    RunningStats stats;
    std::vector<double> point(box.dim());
    for (std::uint64_t i = 0; i < samples; ++i) {
        for (std::size_t k = 0; k < box.dim(); ++k)
            point[k] = rng.uniform(box.lo[k], box.hi[k]);
        stats.add(f(point));
    }
    return stats;
}

bool has_min(IntegralId id) {
    return id == IntegralId::MIN_2D || id == IntegralId::MIN_ND || id == IntegralId::COMBINED;
}

Rational frac(long num, long den) {
    return make_rational(num, den);
}

Rational order_stat_closed_form(int d) {
    BigInt den = d + 1;
    den <<= static_cast<unsigned>(d + 1);
    Rational r(BigInt(2 * d + 1), den);
    r.canonicalize();
    return r;
}

bool within(double value, const Rational& reference, double tol) {
    const double ref = to_double(reference);
    return std::fabs(value - ref) <= tol * std::fabs(ref);
}

} // namespace

std::string_view to_string(IntegralId id) {
    switch (id) {
    case IntegralId::LINEAR_1D: return "LINEAR_1D";
    case IntegralId::PRODUCT_2D: return "PRODUCT_2D";
    case IntegralId::PRODUCT_ND: return "PRODUCT_ND";
    case IntegralId::MIN_2D: return "MIN_2D";
    case IntegralId::MIN_ND: return "MIN_ND";
    case IntegralId::YV_2D: return "YV_2D";
    case IntegralId::YV_ND: return "YV_ND";
    case IntegralId::COMBINED: return "COMBINED";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::MATCHES_PRINTED: return "MATCHES_PRINTED";
    case Verdict::MATCHES_DERIVED_ONLY: return "MATCHES_DERIVED_ONLY";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
    }
    return "?";
}

IntegralValue eval_integral(IntegralId id, int d, int m, const QuadOptions& options) {
    const Family fam = family(id, d, m);
    IntegralValue out;

    switch (id) {
    case IntegralId::LINEAR_1D:
        out.deterministic = linear_1d();
        break;
    case IntegralId::PRODUCT_2D:
        out.deterministic = Gauss1D::integrate(
            [](double x) {
                return Gauss1D::integrate([x](double y) { return (x + 0.5) * (y + 0.5); }, 0.0, 0.5);
            },
            0.0, 0.5);
        break;
    case IntegralId::PRODUCT_ND:
        out.deterministic = std::pow(linear_1d(), d);
        break;
    case IntegralId::MIN_2D:
        out.deterministic = order_stat_reduced(2);
        break;
    case IntegralId::MIN_ND:
        out.deterministic = order_stat_reduced(d);
        break;
    case IntegralId::YV_2D:
        out.deterministic = yv_pair();
        break;
    case IntegralId::YV_ND:
        out.deterministic = std::pow(yv_pair(), m);
        break;
    case IntegralId::COMBINED:
        out.deterministic = order_stat_reduced(d) * std::pow(yv_pair(), m);
        break;
    }

    const Box box = fam.layout.box();
    if (!has_min(id) && static_cast<int>(box.dim()) <= kMaxTensorDim)
        out.tensor = tensor_gauss(fam.integrand, box);

    if (options.mc_samples > 0) {
        const std::uint64_t key = (static_cast<std::uint64_t>(id) << 32) |
                                  (static_cast<std::uint64_t>(fam.layout.xs) << 16) |
                                  static_cast<std::uint64_t>(fam.layout.pairs);
        const RunningStats stats =
            monte_carlo(fam.integrand, box, options.mc_samples, SplitMix64::stream(options.seed, key));
        const double volume = box.volume();
        out.mc_mean = stats.mean * volume;
        out.mc_stderr = stats.stderr_of_mean() * volume;
        out.mc_samples = options.mc_samples;
    }
    return out;
}

Rational printed_closed_form(IntegralId id, int d, int m) {
    switch (id) {
    case IntegralId::LINEAR_1D: return frac(3, 8);
    case IntegralId::PRODUCT_2D: return frac(9, 64);
    case IntegralId::PRODUCT_ND: return pow(frac(3, 8), static_cast<unsigned>(d));
    case IntegralId::MIN_2D: return frac(5, 24);
    case IntegralId::MIN_ND: return order_stat_closed_form(d);
    case IntegralId::YV_2D: return frac(1, 8);
    case IntegralId::YV_ND: return pow(frac(1, 8), static_cast<unsigned>(m));
    case IntegralId::COMBINED: {
        BigInt den = 1;
        den <<= static_cast<unsigned>(3 * d + m + 1);
        den *= m + 1;
        Rational r(BigInt(2 * m + 1), den);
        r.canonicalize();
        return r;
    }
    }
    throw std::domain_error("unknown integral id");
}

Rational derived_closed_form(IntegralId id, int d, int m) {
    // Each x factor contributes int_0^{1/2} (x + 1/2) dx = 3/8, each (y, v)
    // pair (1/2)(1/4) + (1/2)(1/4) = 1/8, and the upper order statistic of d
    // uniforms on [0, 1/2] has mean d / (2 (d + 1)).
    const Rational x_factor = frac(1, 8) + frac(1, 4);
    const Rational pair_factor = frac(1, 8);
    auto order_stat = [](int n) -> Rational {
        Rational mean(n, 2 * (n + 1));
        mean.canonicalize();
        return pow(frac(1, 2), static_cast<unsigned>(n)) * (mean + frac(1, 2));
    };
    switch (id) {
    case IntegralId::LINEAR_1D: return x_factor;
    case IntegralId::PRODUCT_2D: return pow(x_factor, 2);
    case IntegralId::PRODUCT_ND: return pow(x_factor, static_cast<unsigned>(d));
    case IntegralId::MIN_2D: return order_stat(2);
    case IntegralId::MIN_ND: return order_stat(d);
    case IntegralId::YV_2D: return pair_factor;
    case IntegralId::YV_ND: return pow(pair_factor, static_cast<unsigned>(m));
    case IntegralId::COMBINED: return order_stat(d) * pow(pair_factor, static_cast<unsigned>(m));
    }
    throw std::domain_error("unknown integral id");
}

std::optional<Rational> lower_order_closed_form(IntegralId id, int d, int m) {
    // Smallest of n uniforms on [0, 1/2] has mean 1 / (2 (n + 1)).
    auto lower = [](int n) -> Rational {
        Rational mean(1, 2 * (n + 1));
        mean.canonicalize();
        return pow(frac(1, 2), static_cast<unsigned>(n)) * (mean + frac(1, 2));
    };
    switch (id) {
    case IntegralId::MIN_2D: return lower(2);
    case IntegralId::MIN_ND: return lower(d);
    case IntegralId::COMBINED: return lower(d) * pow(frac(1, 8), static_cast<unsigned>(m));
    default: return std::nullopt;
    }
}

IntegralCheck check_integral(IntegralId id, int d, int m, double tol, const QuadOptions& options) {
    if (!(tol > 0.0))
        throw std::domain_error("tol must be positive");
    switch (id) {
    case IntegralId::LINEAR_1D: d = 1; m = 0; break;
    case IntegralId::PRODUCT_2D:
    case IntegralId::MIN_2D: d = 2; m = 0; break;
    case IntegralId::PRODUCT_ND:
    case IntegralId::MIN_ND: m = 0; break;
    case IntegralId::YV_2D: d = 0; m = 1; break;
    case IntegralId::YV_ND: d = 0; break;
    case IntegralId::COMBINED: break;
    }

    const IntegralValue value = eval_integral(id, d, m, options);
    IntegralCheck c;
    c.id = id;
    c.d = d;
    c.m = m;
    c.numeric = value.deterministic;
    c.tensor = value.tensor;
    c.mc_mean = value.mc_mean;
    c.mc_stderr = value.mc_stderr;
    c.printed_closed_form = printed_closed_form(id, d, m);
    c.derived_closed_form = derived_closed_form(id, d, m);
    c.lower_order_closed_form = lower_order_closed_form(id, d, m);
    c.abs_err_numeric_vs_printed = std::fabs(c.numeric - to_double(c.printed_closed_form));
    c.abs_err_numeric_vs_derived = std::fabs(c.numeric - to_double(c.derived_closed_form));
    const double gap = std::fabs(to_double(c.printed_closed_form - c.derived_closed_form));
    c.candidate_separation = c.mc_stderr > 0.0 ? gap / c.mc_stderr : 0.0;

    const bool mc_agrees = value.mc_samples == 0 ||
                           std::fabs(value.mc_mean - c.numeric) <= 4.0 * value.mc_stderr;
    const bool tensor_agrees =
        !value.tensor || std::fabs(*value.tensor - c.numeric) <= tol * std::fabs(c.numeric);
    if (!mc_agrees || !tensor_agrees)
        c.verdict = Verdict::INCONCLUSIVE;
    else if (within(c.numeric, c.printed_closed_form, tol))
        c.verdict = Verdict::MATCHES_PRINTED;
    else if (within(c.numeric, c.derived_closed_form, tol))
        c.verdict = Verdict::MATCHES_DERIVED_ONLY;
    else
        c.verdict = Verdict::INCONCLUSIVE;
    return c;
}

std::vector<IntegralCheck> check_all(int d_max, int m_max, double tol, const QuadOptions& options) {
    if (!(tol > 0.0))
        throw std::domain_error("tol must be positive");
    if (d_max < 1 || d_max > kMaxReducedDim || m_max < 1 || m_max > kMaxReducedDim)
        throw std::domain_error("d_max and m_max must be in [1, 12]");
    std::vector<IntegralCheck> out;
    out.push_back(check_integral(IntegralId::LINEAR_1D, 1, 0, tol, options));
    out.push_back(check_integral(IntegralId::PRODUCT_2D, 2, 0, tol, options));
    for (int d = 1; d <= d_max; ++d)
        out.push_back(check_integral(IntegralId::PRODUCT_ND, d, 0, tol, options));
    out.push_back(check_integral(IntegralId::MIN_2D, 2, 0, tol, options));
    for (int d = 1; d <= d_max; ++d)
        out.push_back(check_integral(IntegralId::MIN_ND, d, 0, tol, options));
    out.push_back(check_integral(IntegralId::YV_2D, 0, 1, tol, options));
    for (int m = 1; m <= m_max; ++m)
        out.push_back(check_integral(IntegralId::YV_ND, 0, m, tol, options));
    for (int d = 1; d <= d_max; ++d)
        for (int m = 1; m <= m_max; ++m)
            out.push_back(check_integral(IntegralId::COMBINED, d, m, tol, options));
    return out;
}

} // namespace lshmodel::quad
