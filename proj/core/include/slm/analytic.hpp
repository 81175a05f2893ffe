#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "slm/map.hpp"

namespace slm::analytic {

// Bifurcation values of the deterministic map. The two decimal constants are
// the usual published approximations and are treated as exact boundaries.
inline constexpr double kLambdaC2 = 3.0;
inline constexpr double kLambdaC4 = 3.449489742783178098;       // 1 + sqrt(6)
inline constexpr double kLambdaC4End = 3.54409;
inline constexpr double kLambdaC2Omega = 3.56995;
inline constexpr double kLambdaC3 = 3.8284;
inline constexpr double kOnePlusSqrt5 = 3.236067977499789696;   // p(lambda) == 1/2 here

/// x*(lambda) = (lambda - 1) / lambda, the non-zero fixed point.
[[nodiscard]] double nonzero_fixed_point(double lambda);

/// {0} for lambda <= 1, {0, x*(lambda)} otherwise.
std::vector<double> fixed_points(double lambda);

struct Period2Pair {
    double p;  // smaller period-2 point
    double q;  // larger period-2 point
    double lambda;
};

/// Closed-form period-2 points. Throws DomainError for lambda < 3 or > 4.
Period2Pair period2_points(double lambda);

/// (lambda + 1) / (2 lambda), the mean along the period-2 orbit.
double period2_average(double lambda);

enum class Regime { extinction, period1, period2, period4, cascade_or_beyond };

std::string_view to_string(Regime r) noexcept;

struct RegimeLabel {
    Regime label;
    double lower;  // regime boundaries (lower exclusive except for extinction)
    double upper;  // inclusive
};

/// Regime containing the whole closed window [lambda_lo, lambda_hi].
/// Throws RegimeError if the window straddles a boundary.
RegimeLabel classify_regime(double lambda_lo, double lambda_hi);

/// Nominal period of a regime (0 for cascade_or_beyond, where it is not fixed).
std::size_t nominal_period(Regime r) noexcept;

struct PeriodDetection {
    double tolerance = 1e-9;
    std::size_t burn_in = 10000;
    std::size_t max_iter = 100000;  // extra iterations after burn-in
};

inline constexpr std::size_t kMaxDetectablePeriod = 64;

/// Smallest k <= 64 with |x_{n+k} - x_n| < tol on the orbit of 1/2 after
/// burn-in. Throws NoConvergenceError when none is found within max_iter.
std::size_t detect_period(double lambda, const PeriodDetection& opts = {});

/// The `period` cycle points of S_lambda, sorted ascending. Located by
/// iteration from 1/2 and polished with Newton steps on S^period(x) - x.
/// Throws NoConvergenceError if detect_period disagrees with `period`.
std::vector<double> periodic_orbit(double lambda, std::size_t period,
                                   const PeriodDetection& opts = {});

/// Long-term deterministic average at lambda (mean of its attracting cycle).
double deterministic_mean(double lambda, std::size_t period);

enum class SupportCase { lambda_above, lambda_below, lambda_equal };

std::string_view to_string(SupportCase c) noexcept;

/// I_p = [p_lo, p_hi] and I_q = [q_lo, q_hi], one-step images of the
/// period-2 point ranges [q-, q+] and [p+, p-] over the parameter window.
struct SupportIntervals {
    double p_lo;
    double p_hi;
    double q_lo;
    double q_hi;
    SupportCase support_case;

    [[nodiscard]] bool contains(double x, double inflate = 0.0) const noexcept;
};

/// Throws RegimeError unless [lb - d, lb + d] lies in (3, 1 + sqrt 6).
SupportIntervals support_intervals(double lambda_bar, double delta_lambda);

struct LabeledValue {
    std::string_view label;
    double value;
};

/// p+, p-, x_pmax, x*(lb-d), x*(lb+d), x_qmin, q-, q+ in that order, after
/// checking the chain p+ < p- <= x_pmax < x*(lb-d) < x*(lb+d) < x_qmin <= q- < q+.
/// Pairs that coincide when delta_lambda == 0 are compared with <=.
/// Throws OrderingViolation if the chain fails.
std::array<LabeledValue, 8> check_ordering(double lambda_bar, double delta_lambda);

struct ComparisonValues {
    double F;  // S(S(x)) - x
    double h;  // lb x(1-x) - lb^2 (x(1-x))^2 + eps
    double H;  // lb h - x
};

ComparisonValues comparison_functions(double lambda_bar, double epsilon, double x);

/// h''(x) = -2(lb + lb^2) + 12 lb^2 (x - x^2).
double h_second_derivative(double lambda_bar, double x);

/// True iff h'' > 0 on [lo, hi]. h'' is concave in x, so the endpoints decide.
bool convexity_on_interval(double lambda_bar, std::pair<double, double> interval);

struct HRoots {
    double z;       // z_H
    double p;       // p_H
    double x_star;  // x*_H
    double q;       // q_H
};

/// Zeros of H on [-0.5, 1.2]: 10^4-cell sign scan then bisection to 1e-12.
/// Throws RootCountError unless exactly four are found.
HRoots h_function_roots(double lambda_bar, double epsilon);

/// z_H < 0 < p < p_H < x*_H < x* < q < q_H < 1.
bool h_roots_ordered(double lambda_bar, const HRoots& roots);

struct StabilityPreconditions {
    double e_log_lambda;
    bool finite_log4_term;

    [[nodiscard]] bool satisfied() const noexcept { return e_log_lambda > 0.0 && finite_log4_term; }
};

/// E[log lambda] in closed form and whether E|log(4 - lambda)| is finite.
StabilityPreconditions stability_preconditions(const ParameterDistribution& dist);

struct BandGeometry {
    double center;
    double width;
};

/// Centre and width of the strip between x*(lb - d) and x*(lb + d).
/// Throws RegimeError unless [lb - d, lb + d] lies in (1, 3).
BandGeometry band_geometry(double lambda_bar, double delta_lambda);

}  // namespace slm::analytic
