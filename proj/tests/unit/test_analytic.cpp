#include <doctest.h>

#include <cmath>
#include <limits>

#include "slm/analytic.hpp"
#include "slm/errors.hpp"
#include "slm/rng.hpp"

using namespace slm;
using namespace slm::analytic;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("fixed points")
{
    CHECK(fixed_points(0.5) == std::vector<double>{0.0});
    CHECK(fixed_points(1.0) == std::vector<double>{0.0});
    CHECK(fixed_points(2.0) == std::vector<double>{0.0, 0.5});
    const auto fp = fixed_points(3.2);
    REQUIRE(fp.size() == 2);
    CHECK(fp[1] == doctest::Approx(0.6875).epsilon(1e-15));
    CHECK_THROWS_AS(fixed_points(4.5), DomainError);
    CHECK_THROWS_AS(fixed_points(-1.0), DomainError);
}

TEST_CASE("period-2 points against high-precision values")
{
    const auto at3 = period2_points(3.0);
    CHECK(at3.p == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(at3.q == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    struct Row { double lambda, p, q; };
    // mpmath at 30 digits
    const Row rows[] = {{3.2, 0.513044509532630, 0.799455490467370},
                        {3.4, 0.451963247626153, 0.842154399432671},
                        {3.1, 0.558014125202696, 0.764566519958594},
                        {3.3, 0.479427019824234, 0.823603283206069},
                        {3.208, 0.510044350064402, 0.801676348189962}};
    for (const auto& r : rows) {
        const auto pq = period2_points(r.lambda);
        CHECK(std::abs(pq.p - r.p) < 1e-13);
        CHECK(std::abs(pq.q - r.q) < 1e-13);
        CHECK(pq.lambda == r.lambda);
    }
    CHECK(period2_points(3.4).p + period2_points(3.4).q == doctest::Approx(4.4 / 3.4).epsilon(1e-15));
    CHECK_THROWS_AS(period2_points(2.99), DomainError);
}

TEST_CASE("period2_average")
{
    CHECK(period2_average(3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(period2_average(3.2) == 0.65625);
    CHECK(std::abs(period2_average(3.208) - 0.655860349127182) < 1e-14);
    for (double l : {3.05, 3.2, 3.3, 3.44}) {
        const auto pq = period2_points(l);
        CHECK(std::abs((pq.p + pq.q) / 2 - period2_average(l)) <= 2 * kEps * period2_average(l));
    }
    CHECK_THROWS_AS(period2_average(2.5), DomainError);
}

TEST_CASE("classify_regime")
{
    CHECK(classify_regime(1.484, 1.532).label == Regime::period1);
    CHECK(classify_regime(3.184, 3.232).label == Regime::period2);
    CHECK(classify_regime(3.484, 3.532).label == Regime::period4);
    CHECK(classify_regime(0.5, 0.9).label == Regime::extinction);
    CHECK(classify_regime(3.6, 3.7).label == Regime::cascade_or_beyond);
    CHECK(classify_regime(3.0, 3.0).label == Regime::period1);  // boundaries are inclusive above
    CHECK_THROWS_AS(classify_regime(2.9, 3.1), RegimeError);
    CHECK_THROWS_AS(classify_regime(3.4, 3.5), RegimeError);
    CHECK_THROWS_AS(classify_regime(0.9, 1.1), RegimeError);
    CHECK_THROWS_AS(classify_regime(3.2, 3.1), DomainError);
    CHECK_THROWS_AS(classify_regime(3.9, 4.1), DomainError);
    CHECK(to_string(Regime::period2) == "period2");
    CHECK(nominal_period(Regime::period4) == 4);
    CHECK(nominal_period(Regime::cascade_or_beyond) == 0);
}

TEST_CASE("detect_period")
{
    CHECK(detect_period(2.5) == 1);
    CHECK(detect_period(3.2) == 2);
    CHECK(detect_period(3.5) == 4);
    CHECK(detect_period(3.555) == 8);
    CHECK(detect_period(3.83) == 3);  // period-3 window
    CHECK_THROWS_AS(detect_period(3.7), NoConvergenceError);
    CHECK_THROWS_AS(detect_period(2.5, {0.0, 100, 100}), DomainError);
}

TEST_CASE("periodic_orbit")
{
    const auto two = periodic_orbit(3.2, 2);
    REQUIRE(two.size() == 2);
    CHECK(std::abs(two[0] - 0.513044509532630) < 1e-12);
    CHECK(std::abs(two[1] - 0.799455490467370) < 1e-12);

    const auto one = periodic_orbit(2.5, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(0.6).epsilon(1e-14));

    // iteration oracle: S_3.508 iterated 5000 steps from 0.5 in mpmath, last four sorted
    const auto four = periodic_orbit(3.508, 4);
    const double expected[] = {0.378701185794806, 0.505588224942886, 0.825385384634828, 0.876890451270893};
    REQUIRE(four.size() == 4);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(four[k] - expected[k]) < 1e-12);
    CHECK(std::abs(deterministic_mean(3.508, 4) - 0.646641311660853) < 1e-12);
    CHECK(std::is_sorted(four.begin(), four.end()));

    CHECK_THROWS_AS(periodic_orbit(3.2, 4), RegimeError);
    CHECK(deterministic_mean(3.2, 2) == doctest::Approx(0.65625).epsilon(1e-15));
}

TEST_CASE("support_intervals")
{
    // closed forms evaluated in mpmath
    const auto a = support_intervals(3.2, 0.1);
    CHECK(std::abs(a.p_lo - 0.450370836804584) < 1e-12);
    CHECK(std::abs(a.p_hi - 0.594015036506096) < 1e-12);
    CHECK(std::abs(a.q_lo - 0.764566519958594) < 1e-12);
    CHECK(std::abs(a.q_hi - 0.825) < 1e-12);
    // [3.1, 3.3] straddles 1 + sqrt 5
    CHECK(a.support_case == SupportCase::lambda_equal);
    CHECK(a.p_hi < a.q_lo);

    const auto b = support_intervals(3.15, 0.05);
    CHECK(std::abs(b.p_lo - 0.497011868609735) < 1e-12);
    CHECK(std::abs(b.p_hi - 0.576014580854396) < 1e-12);
    CHECK(std::abs(b.q_lo - 0.764566519958594) < 1e-12);
    CHECK(std::abs(b.q_hi - 0.799455490467370) < 1e-12);
    CHECK(b.support_case == SupportCase::lambda_below);

    const auto c = support_intervals(3.2, 0.0);
    const auto pq = period2_points(3.2);
    CHECK(c.p_lo == doctest::Approx(pq.p).epsilon(1e-14));
    CHECK(c.p_hi == doctest::Approx(pq.p).epsilon(1e-14));
    CHECK(c.q_lo == doctest::Approx(pq.q).epsilon(1e-14));
    CHECK(c.q_hi == doctest::Approx(pq.q).epsilon(1e-14));

    CHECK(support_intervals(3.35, 0.05).support_case == SupportCase::lambda_above);
    CHECK(support_intervals(3.236067977499789696, 0.0).support_case == SupportCase::lambda_equal);

    CHECK_THROWS_AS(support_intervals(3.3, 0.2), RegimeError);
    CHECK_THROWS_AS(support_intervals(3.0, 0.0), RegimeError);

    CHECK(a.contains(0.5));
    CHECK(a.contains(0.8));
    CHECK_FALSE(a.contains(0.7));
    CHECK_FALSE(a.contains(0.825 + 1e-8));
    CHECK(a.contains(0.825 + 1e-10, 1e-9));
}

TEST_CASE("check_ordering")
{
    const auto chain = check_ordering(3.2, 0.1);
    CHECK(chain[0].label == "p_plus");
    CHECK(chain[7].label == "q_plus");
    CHECK(std::abs(chain[3].value - 0.677419354838710) < 1e-13);
    CHECK(std::abs(chain[4].value - 0.696969696969697) < 1e-13);
    for (int k = 0; k < 7; ++k)
        CHECK(chain[k].value <= chain[k + 1].value);
    CHECK_NOTHROW(check_ordering(3.2, 0.0));
    CHECK_NOTHROW(check_ordering(3.310148, 0.0));

    // Wide windows reaching down to 3: S(lb + d, q-) overtakes x*(lb - d).
    CHECK_THROWS_AS(check_ordering(3.040454, 0.038431), OrderingViolation);
    CHECK_THROWS_AS(check_ordering(3.3, 0.2), RegimeError);

    SUBCASE("50 x 20 grid of windows up to 80% of the admissible width")
    {
        for (int i = 0; i < 50; ++i) {
            const double lb = 3.0 + (kLambdaC4 - 3.0) * (i + 0.5) / 50.0;
            const double room = std::min(lb - 3.0, kLambdaC4 - lb);
            for (int j = 0; j < 20; ++j) {
                const double d = 0.8 * room * j / 20.0;
                REQUIRE_NOTHROW(check_ordering(lb, d));
            }
        }
    }
}

TEST_CASE("comparison_functions")
{
    const auto fixed = comparison_functions(3.2, 0.0, 0.6875);
    CHECK(std::abs(fixed.F) < 1e-12);
    const auto zero = comparison_functions(2.7, 0.0, 0.0);
    CHECK(zero.F == 0.0);
    CHECK(zero.H == 0.0);
    const auto shifted = comparison_functions(3.2, 0.001, 0.0);
    CHECK(shifted.H == doctest::Approx(0.0032).epsilon(1e-14));
}

TEST_CASE("h_second_derivative and convexity")
{
    CHECK(h_second_derivative(3.2, 0.5) == doctest::Approx(3.84).epsilon(1e-14));
    CHECK(h_second_derivative(3.2, 0.0) == doctest::Approx(-26.88).epsilon(1e-14));
    CHECK(h_second_derivative(2.0, 0.0) == doctest::Approx(-2.0 * (2.0 + 4.0)).epsilon(1e-14));
    const auto ip = support_intervals(3.2, 0.1);
    // mpmath at the interval ends
    CHECK(std::abs(h_second_derivative(3.2, ip.p_lo) - 3.5373) < 1e-4);
    CHECK(std::abs(h_second_derivative(3.2, ip.p_hi) - 2.7539) < 1e-4);
    CHECK(convexity_on_interval(3.2, {ip.p_lo, ip.p_hi}));
    CHECK_FALSE(convexity_on_interval(3.2, {0.0, 0.05}));
    CHECK(convexity_on_interval(3.2, {0.5, 0.5}));
    CHECK_THROWS_AS(convexity_on_interval(3.2, {0.6, 0.5}), DomainError);
    CHECK_THROWS_AS(convexity_on_interval(3.2, {-0.1, 0.5}), DomainError);
}

TEST_CASE("h_function_roots")
{
    const auto r0 = h_function_roots(3.2, 0.0);
    CHECK(std::abs(r0.z) < 1e-9);
    CHECK(std::abs(r0.p - 0.513044509532630) < 1e-9);
    CHECK(std::abs(r0.x_star - 0.6875) < 1e-9);
    CHECK(std::abs(r0.q - 0.799455490467370) < 1e-9);

    const auto r1 = h_function_roots(3.2, 0.001);
    CHECK(h_roots_ordered(3.2, r1));
    CHECK_FALSE(h_roots_ordered(3.2, r0));  // strict chain needs epsilon > 0

    CHECK_THROWS_AS(h_function_roots(3.2, 10.0), RootCountError);
}

TEST_CASE("stability_preconditions")
{
    // closed-form integral in mpmath
    const auto a = stability_preconditions(ParameterDistribution::uniform(1.508, 0.024));
    CHECK(std::abs(a.e_log_lambda - 0.410742051206835) < 1e-13);
    CHECK(std::abs(a.e_log_lambda - std::log(1.508)) < 1e-4);
    CHECK(a.satisfied());

    const auto b = stability_preconditions(ParameterDistribution::uniform(0.7, 0.2));
    CHECK(std::abs(b.e_log_lambda - -0.370627184530178) < 1e-13);
    CHECK_FALSE(b.satisfied());

    const auto c = stability_preconditions(ParameterDistribution::uniform(1.0, 0.0));
    CHECK(c.e_log_lambda == 0.0);
    CHECK_FALSE(c.satisfied());

    CHECK(stability_preconditions(ParameterDistribution::uniform(3.9, 0.1)).finite_log4_term);
    CHECK_FALSE(stability_preconditions(ParameterDistribution::uniform(4.0, 0.0)).finite_log4_term);
    CHECK(std::isinf(stability_preconditions(ParameterDistribution::uniform(0.05, 0.05)).e_log_lambda) == false);
}

TEST_CASE("band_geometry")
{
    const auto a = band_geometry(2.0, 0.1);
    CHECK(std::abs(a.center - 0.498746867167920) < 1e-13);
    CHECK(std::abs(a.width - 0.0501253132832080) < 1e-13);
    const auto b = band_geometry(2.0, 0.0);
    CHECK(b.center == 0.5);
    CHECK(b.width == 0.0);
    const auto c = band_geometry(1.508, 0.024);
    CHECK(c.center > nonzero_fixed_point(1.484));
    CHECK(c.center < nonzero_fixed_point(1.532));
    CHECK_THROWS_AS(band_geometry(2.95, 0.1), RegimeError);
}

TEST_CASE("property suites at 1000 random parameter points")
{
    RandomStream rng(2718, 0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); };

    SUBCASE("Vieta and swap")
    {
        for (int k = 0; k < 1000; ++k) {
            const double l = uniform(3.0, kLambdaC4);
            const auto pq = period2_points(l);
            REQUIRE(std::abs(pq.p + pq.q - (l + 1) / l) < 1e-12);
            REQUIRE(std::abs(pq.p * pq.q - (l + 1) / (l * l)) < 1e-12);
            REQUIRE(std::abs(logistic(l, pq.p) - pq.q) < 1e-12);
            REQUIRE(std::abs(logistic(l, pq.q) - pq.p) < 1e-12);
        }
    }
    SUBCASE("H-shift and deterministic limit")
    {
        for (int k = 0; k < 1000; ++k) {
            const double l = uniform(3.0, 4.0);
            const double eps = uniform(0.0, 0.01);
            const double x = uniform(0.0, 1.0);
            const auto v = comparison_functions(l, eps, x);
            REQUIRE(std::abs((v.H - v.F) - l * eps) <= 4 * kEps * std::max(1.0, std::abs(v.H)));
            const auto v0 = comparison_functions(l, 0.0, x);
            const double ss = logistic(l, logistic(l, x));
            REQUIRE(std::abs(l * v0.h - ss) <= 4 * kEps * std::max(1.0, ss));
        }
    }
    SUBCASE("finite-difference h''")
    {
        constexpr double step = 1e-5;
        for (int k = 0; k < 1000; ++k) {
            const double l = uniform(3.0, 4.0);
            const double x = uniform(0.05, 0.95);
            const double hm = comparison_functions(l, 0.0, x - step).h;
            const double h0 = comparison_functions(l, 0.0, x).h;
            const double hp = comparison_functions(l, 0.0, x + step).h;
            const double fd = (hp - 2 * h0 + hm) / (step * step);
            const double exact = h_second_derivative(l, x);
            REQUIRE(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)) + 2e-5);
        }
    }
}
