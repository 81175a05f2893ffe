#include "slm/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slm/errors.hpp"
#include "text.hpp"

namespace slm::analytic {
namespace {

std::string window_text(double lo, double hi)
{
    return "[" + detail::num(lo) + ", " + detail::num(hi) + "]";
}

void require_lambda_range(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 4.0))
        throw DomainError("lambda must lie in [0,4], got " + detail::num(lambda));
}

// Regime containing a single parameter value.
Regime regime_of(double lambda)
{
    if (lambda <= 1.0)
        return Regime::extinction;
    if (lambda <= kLambdaC2)
        return Regime::period1;
    if (lambda <= kLambdaC4)
        return Regime::period2;
    if (lambda <= kLambdaC4End)
        return Regime::period4;
    return Regime::cascade_or_beyond;
}

RegimeLabel label_for(Regime r)
{
    switch (r) {
    case Regime::extinction: return {r, 0.0, 1.0};
    case Regime::period1: return {r, 1.0, kLambdaC2};
    case Regime::period2: return {r, kLambdaC2, kLambdaC4};
    case Regime::period4: return {r, kLambdaC4, kLambdaC4End};
    case Regime::cascade_or_beyond: return {r, kLambdaC4End, 4.0};
    }
    return {r, 0.0, 4.0};
}

void require_period2_window(double lambda_bar, double delta_lambda)
{
    double lo = lambda_bar - delta_lambda;
    double hi = lambda_bar + delta_lambda;
    if (delta_lambda < 0.0 || !(lo > kLambdaC2 && hi < kLambdaC4))
        throw RegimeError("parameter window " + window_text(lo, hi) +
                          " must lie inside the period-2 regime (3, 1+sqrt(6))");
}

// Iterates the cycle point once around and returns S^k(x) and d/dx S^k(x).
std::pair<double, double> cycle_map(double lambda, double x, std::size_t k)
{
    double derivative = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        derivative *= lambda * (1.0 - 2.0 * x);
        x = logistic(lambda, x);
    }
    return {x, derivative};
}

}  // namespace

double nonzero_fixed_point(double lambda)
{
    if (!(lambda > 0.0 && lambda <= 4.0))
        throw DomainError("nonzero fixed point needs lambda in (0,4], got " + detail::num(lambda));
    return (lambda - 1.0) / lambda;
}

std::vector<double> fixed_points(double lambda)
{
    require_lambda_range(lambda);
    if (lambda <= 1.0)
        return {0.0};
    return {0.0, nonzero_fixed_point(lambda)};
}

Period2Pair period2_points(double lambda)
{
    if (!(lambda >= kLambdaC2 && lambda <= 4.0))
        throw DomainError("period-2 points need lambda in [3,4] (real discriminant), got " +
                          detail::num(lambda));
    double root = std::sqrt((lambda - 3.0) * (lambda + 1.0));
    return {((lambda + 1.0) - root) / (2.0 * lambda), ((lambda + 1.0) + root) / (2.0 * lambda), lambda};
}

double period2_average(double lambda)
{
    if (!(lambda >= kLambdaC2 && lambda <= 4.0))
        throw DomainError("period-2 average needs lambda in [3,4], got " + detail::num(lambda));
    return (lambda + 1.0) / (2.0 * lambda);
}

std::string_view to_string(Regime r) noexcept
{
    switch (r) {
    case Regime::extinction: return "extinction";
    case Regime::period1: return "period1";
    case Regime::period2: return "period2";
    case Regime::period4: return "period4";
    case Regime::cascade_or_beyond: return "cascade_or_beyond";
    }
    return "unknown";
}

std::size_t nominal_period(Regime r) noexcept
{
    switch (r) {
    case Regime::extinction:
    case Regime::period1: return 1;
    case Regime::period2: return 2;
    case Regime::period4: return 4;
    case Regime::cascade_or_beyond: return 0;
    }
    return 0;
}

RegimeLabel classify_regime(double lambda_lo, double lambda_hi)
{
    if (!(lambda_lo >= 0.0 && lambda_lo <= lambda_hi && lambda_hi <= 4.0))
        throw DomainError("regime window " + window_text(lambda_lo, lambda_hi) +
                          " needs 0 <= lo <= hi <= 4");
    Regime lo = regime_of(lambda_lo);
    Regime hi = regime_of(lambda_hi);
    if (lo != hi)
        throw RegimeError("parameter window " + window_text(lambda_lo, lambda_hi) +
                          " straddles a bifurcation boundary (" + std::string(to_string(lo)) +
                          " -> " + std::string(to_string(hi)) + ")");
    return label_for(lo);
}

std::size_t detect_period(double lambda, const PeriodDetection& opts)
{
    require_lambda_range(lambda);
    if (!(opts.tolerance > 0.0))
        throw DomainError("period detection tolerance must be > 0");

    double x = 0.5;
    for (std::size_t i = 0; i < opts.burn_in; ++i)
        x = logistic(lambda, x);

    std::array<double, kMaxDetectablePeriod + 1> window{};
    std::size_t spent = 0;
    while (spent <= opts.max_iter) {
        window[0] = x;
        for (std::size_t k = 1; k <= kMaxDetectablePeriod; ++k)
            window[k] = logistic(lambda, window[k - 1]);
        for (std::size_t k = 1; k <= kMaxDetectablePeriod; ++k)
            if (std::abs(window[k] - window[0]) < opts.tolerance)
                return k;
        x = window[kMaxDetectablePeriod];
        spent += kMaxDetectablePeriod;
    }
    throw NoConvergenceError("no attracting cycle of period <= 64 found at lambda=" +
                             detail::num(lambda) + " within " + detail::num(opts.max_iter) +
                             " iterations");
}

std::vector<double> periodic_orbit(double lambda, std::size_t period, const PeriodDetection& opts)
{
    if (period == 0)
        throw DomainError("period must be >= 1");
    std::size_t found = detect_period(lambda, opts);
    if (found != period)
        throw RegimeError("lambda=" + detail::num(lambda) + " has an attracting cycle of period " +
                          detail::num(found) + ", not " + detail::num(period));

    double x = 0.5;
    for (std::size_t i = 0; i < opts.burn_in; ++i)
        x = logistic(lambda, x);

    // Newton on S^k(x) - x; keep a step only if it shrinks the residual.
    auto [image, slope] = cycle_map(lambda, x, period);
    double residual = std::abs(image - x);
    for (int it = 0; it < 8 && residual > 0.0; ++it) {
        double denom = slope - 1.0;
        if (denom == 0.0)
            break;
        double candidate = x - (image - x) / denom;
        if (!(candidate >= 0.0 && candidate <= 1.0))
            break;
        auto [next_image, next_slope] = cycle_map(lambda, candidate, period);
        double next_residual = std::abs(next_image - candidate);
        if (next_residual >= residual)
            break;
        x = candidate;
        image = next_image;
        slope = next_slope;
        residual = next_residual;
    }

    std::vector<double> cycle;
    cycle.reserve(period);
    for (std::size_t i = 0; i < period; ++i) {
        cycle.push_back(x);
        x = logistic(lambda, x);
    }
    std::sort(cycle.begin(), cycle.end());
    return cycle;
}

double deterministic_mean(double lambda, std::size_t period)
{
    auto cycle = periodic_orbit(lambda, period);
    double sum = 0.0;
    for (double v : cycle)
        sum += v;
    return sum / static_cast<double>(cycle.size());
}

std::string_view to_string(SupportCase c) noexcept
{
    switch (c) {
    case SupportCase::lambda_above: return "lambda_above";
    case SupportCase::lambda_below: return "lambda_below";
    case SupportCase::lambda_equal: return "lambda_equal";
    }
    return "unknown";
}

bool SupportIntervals::contains(double x, double inflate) const noexcept
{
    return (x >= p_lo - inflate && x <= p_hi + inflate) || (x >= q_lo - inflate && x <= q_hi + inflate);
}

SupportIntervals support_intervals(double lambda_bar, double delta_lambda)
{
    require_period2_window(lambda_bar, delta_lambda);
    const double a = lambda_bar - delta_lambda;
    const double b = lambda_bar + delta_lambda;
    const Period2Pair at_b = period2_points(b);
    const Period2Pair at_a = period2_points(a);
    const double p_plus = at_b.p, p_minus = at_a.p;
    const double q_plus = at_b.q, q_minus = at_a.q;

    SupportIntervals out{};
    // S is decreasing in x on [q-, q+] (all > 1/2) and increasing in lambda.
    out.p_lo = logistic(a, q_plus);
    out.p_hi = logistic(b, q_minus);

    out.q_lo = std::min(q_minus, logistic(a, p_plus));
    out.q_hi = std::max(logistic(b, p_plus), logistic(b, p_minus));
    if (p_plus <= 0.5 && 0.5 <= p_minus)
        out.q_hi = std::max(out.q_hi, logistic(b, 0.5));

    if (a > kOnePlusSqrt5)
        out.support_case = SupportCase::lambda_above;
    else if (b < kOnePlusSqrt5)
        out.support_case = SupportCase::lambda_below;
    else
        out.support_case = SupportCase::lambda_equal;
    return out;
}

std::array<LabeledValue, 8> check_ordering(double lambda_bar, double delta_lambda)
{
    const SupportIntervals iv = support_intervals(lambda_bar, delta_lambda);
    const double a = lambda_bar - delta_lambda;
    const double b = lambda_bar + delta_lambda;
    const Period2Pair at_b = period2_points(b);
    const Period2Pair at_a = period2_points(a);

    std::array<LabeledValue, 8> chain{{
        {"p_plus", at_b.p},
        {"p_minus", at_a.p},
        {"x_p_max", iv.p_hi},
        {"x_star_lo", nonzero_fixed_point(a)},
        {"x_star_hi", nonzero_fixed_point(b)},
        {"x_q_min", iv.q_lo},
        {"q_minus", at_a.q},
        {"q_plus", at_b.q},
    }};

    // Relation between consecutive entries: true = strict.
    const bool degenerate = delta_lambda == 0.0;
    const std::array<bool, 7> strict{!degenerate, false, true, !degenerate, true, false, !degenerate};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const double left = chain[i].value;
        const double right = chain[i + 1].value;
        // Non-strict links are equalities in exact arithmetic for some inputs,
        // so allow a few ulp of rounding there.
        const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(right);
        const bool ok = strict[i] ? left < right : left <= right + slack;
        if (!ok)
            throw OrderingViolation("support ordering violated at (" + detail::num(lambda_bar) +
                                    ", " + detail::num(delta_lambda) + "): " +
                                    std::string(chain[i].label) + "=" + detail::num(left) +
                                    (strict[i] ? " !< " : " !<= ") + std::string(chain[i + 1].label) +
                                    "=" + detail::num(right));
    }
    return chain;
}

ComparisonValues comparison_functions(double lambda_bar, double epsilon, double x)
{
    const double s1 = logistic(lambda_bar, x);
    const double s2 = logistic(lambda_bar, s1);
    const double u = x * (1.0 - x);
    const double h = lambda_bar * u - lambda_bar * lambda_bar * u * u + epsilon;
    return {s2 - x, h, lambda_bar * h - x};
}

double h_second_derivative(double lambda_bar, double x)
{
    return -2.0 * (lambda_bar + lambda_bar * lambda_bar) + 12.0 * lambda_bar * lambda_bar * (x - x * x);
}

bool convexity_on_interval(double lambda_bar, std::pair<double, double> interval)
{
    auto [lo, hi] = interval;
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0))
        throw DomainError("convexity interval must satisfy 0 <= lo <= hi <= 1");
    return std::min(h_second_derivative(lambda_bar, lo), h_second_derivative(lambda_bar, hi)) > 0.0;
}

HRoots h_function_roots(double lambda_bar, double epsilon)
{
    constexpr double kLo = -0.5;
    constexpr double kHi = 1.2;
    constexpr int kCells = 10000;
    constexpr double kBisectTol = 1e-12;

    auto H = [&](double x) { return comparison_functions(lambda_bar, epsilon, x).H; };

    std::vector<double> roots;
    double x_prev = kLo;
    double f_prev = H(x_prev);
    for (int i = 1; i <= kCells; ++i) {
        const double x_next = kLo + (kHi - kLo) * static_cast<double>(i) / kCells;
        const double f_next = H(x_next);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if ((f_prev < 0.0) != (f_next < 0.0) && f_next != 0.0) {
            double a = x_prev, b = x_next, fa = f_prev;
            while (b - a > kBisectTol) {
                const double mid = 0.5 * (a + b);
                const double fm = H(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x_next;
        f_prev = f_next;
    }
    if (f_prev == 0.0)
        roots.push_back(x_prev);

    if (roots.size() != 4)
        throw RootCountError("H(x) for lambda_bar=" + detail::num(lambda_bar) +
                             ", epsilon=" + detail::num(epsilon) + " has " +
                             detail::num(roots.size()) + " sign changes on [-0.5, 1.2], expected 4");
    return {roots[0], roots[1], roots[2], roots[3]};
}

bool h_roots_ordered(double lambda_bar, const HRoots& r)
{
    const Period2Pair pq = period2_points(lambda_bar);
    const double x_star = nonzero_fixed_point(lambda_bar);
    return r.z < 0.0 && 0.0 < pq.p && pq.p < r.p && r.p < r.x_star && r.x_star < x_star &&
           x_star < pq.q && pq.q < r.q && r.q < 1.0;
}

StabilityPreconditions stability_preconditions(const ParameterDistribution& dist)
{
    if (dist.is_point_mass()) {
        const double lb = dist.lambda_bar();
        const double e = lb > 0.0 ? std::log(lb) : -std::numeric_limits<double>::infinity();
        return {e, lb < 4.0};
    }
    const double a = dist.lower();
    const double b = dist.upper();
    auto x_log_x = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
    // A uniform density on [a,b] with b <= 4 integrates |log(4 - lambda)|.
    return {(x_log_x(b) - x_log_x(a) - (b - a)) / (b - a), true};
}

BandGeometry band_geometry(double lambda_bar, double delta_lambda)
{
    const double lo = lambda_bar - delta_lambda;
    const double hi = lambda_bar + delta_lambda;
    if (delta_lambda < 0.0 || !(lo > 1.0 && hi < kLambdaC2))
        throw RegimeError("parameter window " + window_text(lo, hi) +
                          " must lie inside the period-1 regime (1, 3)");
    const double lb2 = lambda_bar * lambda_bar;
    const double d2 = delta_lambda * delta_lambda;
    return {(lb2 - lambda_bar - d2) / (lb2 - d2), 2.0 * delta_lambda / (hi * lo)};
}

}  // namespace slm::analytic
