#include "slm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slm/errors.hpp"
#include "slm/rng.hpp"
#include "text.hpp"

namespace slm::experiments {
namespace {

constexpr double kGridSlack = 1e-9;

RandomStream initial_stream(std::uint64_t seed, std::size_t column)
{
    return RandomStream(derive_seed(seed, purpose::initial_state), column);
}

bool has_period(double lambda, std::size_t period)
{
    try {
        return analytic::detect_period(lambda) == period;
    } catch (const NoConvergenceError&) {
        return false;
    }
}

std::string fmt(double v)
{
    return detail::num(v);
}

}  // namespace

void GridSpec::validate() const
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw DomainError("grid step must be > 0");
    if (!(from <= to))
        throw DomainError("grid needs from <= to, got from=" + fmt(from) + " to=" + fmt(to));
}

std::size_t GridSpec::size() const
{
    validate();
    return static_cast<std::size_t>(std::floor((to - from) / step + kGridSlack)) + 1;
}

double GridSpec::at(std::size_t k) const
{
    return std::min(to, from + static_cast<double>(k) * step);
}

std::string_view to_string(BifurcationKind k) noexcept
{
    return k == BifurcationKind::deterministic ? "deterministic" : "stochastic";
}

BifurcationDataset deterministic_bifurcation(const GridSpec& grid, std::size_t n_init, std::size_t n_iter,
                                             std::uint64_t seed)
{
    if (!(grid.from >= 0.0 && grid.to <= 4.0))
        throw DomainError("deterministic bifurcation grid must lie in [0,4]");
    const std::size_t columns = grid.size();
    if (n_init == 0)
        throw SizeError("bifurcation needs at least one initial state per column");

    BifurcationDataset out{BifurcationKind::deterministic, grid, 0.0, n_init, n_iter, seed, {}};
    out.rows.reserve(columns);
    for (std::size_t k = 0; k < columns; ++k) {
        const double lambda = grid.at(k);
        const RandomStream init = initial_stream(seed, k);
        BifurcationRow row{lambda, std::vector<double>(n_init)};
        for (std::size_t i = 0; i < n_init; ++i) {
            double x = init.uniform_at(i);
            for (std::size_t t = 0; t < n_iter; ++t)
                x = logistic(lambda, x);
            row.terminal_states[i] = x;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

BifurcationDataset stochastic_bifurcation(const GridSpec& grid, double delta_lambda, std::size_t n_init,
                                          std::size_t n_iter, std::uint64_t seed)
{
    const std::size_t columns = grid.size();
    if (n_init == 0)
        throw SizeError("bifurcation needs at least one initial state per column");
    // Validate every column before doing any work.
    std::vector<ParameterDistribution> dists;
    dists.reserve(columns);
    for (std::size_t k = 0; k < columns; ++k)
        dists.push_back(ParameterDistribution::uniform(grid.at(k), delta_lambda));

    BifurcationDataset out{BifurcationKind::stochastic, grid, delta_lambda, n_init, n_iter, seed, {}};
    out.rows.reserve(columns);
    for (std::size_t k = 0; k < columns; ++k) {
        const ParameterDistribution& dist = dists[k];
        const RandomStream init = initial_stream(seed, k);
        BifurcationRow row{grid.at(k), std::vector<double>(n_init)};
        for (std::size_t i = 0; i < n_init; ++i) {
            const RandomStream params = parameter_stream(seed, k * n_init + i);
            double x = init.uniform_at(i);
            for (std::size_t t = 0; t < n_iter; ++t)
                x = logistic(dist.quantile(params.uniform_at(t)), x);
            row.terminal_states[i] = x;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

Evolution distribution_evolution(const ParameterDistribution& dist, std::size_t n_particles,
                                 std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                                 std::size_t bins)
{
    if (checkpoints.empty())
        throw ValidationError("distribution evolution needs at least one checkpoint");
    for (std::size_t k = 1; k < checkpoints.size(); ++k)
        if (!(checkpoints[k] > checkpoints[k - 1]))
            throw ValidationError("checkpoints must be strictly ascending");

    Evolution out;
    measure::Ensemble e = measure::uniform_ensemble(n_particles, seed);
    for (std::uint64_t target : checkpoints) {
        measure::advance(e, dist, target - e.generation);
        out.snapshots.push_back({e.generation, measure::make_histogram(e.particles, bins), measure::moments(e)});
    }
    out.final_ensemble = std::move(e);
    return out;
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::stochastic_greater: return "stochastic_greater";
    case Verdict::stochastic_less: return "stochastic_less";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_for(double z) noexcept
{
    if (!(std::abs(z) >= kVerdictZ))
        return Verdict::inconclusive;
    return z > 0.0 ? Verdict::stochastic_greater : Verdict::stochastic_less;
}

ComparisonReport mean_comparison(double lambda_bar, double delta_lambda, const measure::RunConfig& cfg,
                                 std::uint64_t seed)
{
    cfg.validate();
    const auto dist = ParameterDistribution::uniform(lambda_bar, delta_lambda);
    ComparisonReport report;
    report.lambda_bar = lambda_bar;
    report.delta_lambda = delta_lambda;
    report.regime = analytic::classify_regime(dist.lower(), dist.upper());
    report.config = cfg;
    report.seed = seed;

    report.period = analytic::nominal_period(report.regime.label);
    if (report.period == 0) {
        const std::size_t at_center = analytic::detect_period(lambda_bar);
        const std::size_t at_lo = analytic::detect_period(dist.lower());
        const std::size_t at_hi = analytic::detect_period(dist.upper());
        if (at_center != at_lo || at_center != at_hi)
            throw RegimeError("parameter window [" + fmt(dist.lower()) + ", " + fmt(dist.upper()) +
                              "] does not sit inside one stable periodic window (periods " +
                              detail::num(at_lo) + ", " + detail::num(at_center) + ", " +
                              detail::num(at_hi) + ")");
        report.period = at_center;
    }

    const auto pre = analytic::stability_preconditions(dist);
    report.e_log_lambda = pre.e_log_lambda;
    report.preconditions_met = pre.satisfied();
    report.deterministic_mean = analytic::deterministic_mean(lambda_bar, report.period);

    const measure::PooledRun run = measure::run_pooled(dist, cfg, seed);
    report.drift_z = run.stats.drift_z();
    if (!run.stats.converged())
        throw NoConvergenceError("ensemble mean still drifting after " + detail::num(cfg.generations) +
                                 " generations (half-window z = " + fmt(report.drift_z) + ")");

    report.stochastic_mean = run.stats.mean();
    report.final_histogram = measure::make_histogram(run.final_ensemble.particles);
    report.difference = report.stochastic_mean.value - report.deterministic_mean;
    if (report.stochastic_mean.se > 0.0)
        report.z_score = report.difference / report.stochastic_mean.se;
    else if (report.difference != 0.0 && std::abs(report.difference) > 1e-12)
        report.z_score = std::copysign(std::numeric_limits<double>::infinity(), report.difference);
    report.verdict = verdict_for(report.z_score);
    return report;
}

bool LemmaReport::all_passed() const noexcept
{
    return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

LemmaReport lemma_suite(double lambda_bar, double delta_lambda, const measure::RunConfig& cfg,
                        std::uint64_t seed)
{
    cfg.validate();
    LemmaReport report;
    report.lambda_bar = lambda_bar;
    report.delta_lambda = delta_lambda;
    report.config = cfg;
    report.seed = seed;
    report.intervals = analytic::support_intervals(lambda_bar, delta_lambda);

    const auto dist = ParameterDistribution::uniform(lambda_bar, delta_lambda);
    const analytic::Period2Pair pq = analytic::period2_points(lambda_bar);
    const measure::PooledRun run = measure::run_pooled(dist, cfg, seed);
    const bool degenerate = delta_lambda == 0.0;

    // Support containment and ordering of the interval endpoints.
    {
        LemmaCheck c;
        c.name = "support_containment";
        const auto& particles = run.final_ensemble.particles;
        const auto inside = std::count_if(particles.begin(), particles.end(), [&](double x) {
            return report.intervals.contains(x, 1e-9);
        });
        c.value = static_cast<double>(inside) / static_cast<double>(particles.size());
        c.reference = 1.0;
        bool ordered = true;
        try {
            const auto chain = analytic::check_ordering(lambda_bar, delta_lambda);
            report.ordering.assign(chain.begin(), chain.end());
        } catch (const OrderingViolation& err) {
            ordered = false;
            c.detail = err.what();
        }
        c.passed = ordered && inside == static_cast<std::ptrdiff_t>(particles.size());
        if (c.detail.empty())
            c.detail = detail::num(particles.size() - static_cast<std::size_t>(inside)) +
                       " particles outside I_p u I_q; ordering " + (ordered ? "holds" : "violated");
        report.checks.push_back(std::move(c));
    }

    // E_right[X] = lambda_bar (E_left[X] - E_left[X^2]).
    {
        LemmaCheck c;
        c.name = "left_right_mean_identity";
        const measure::Estimate r = run.stats.lemma2_residual(lambda_bar);
        c.value = r.value;
        c.reference = 0.0;
        c.z = r.se > 0.0 ? r.value / r.se : 0.0;
        c.passed = std::abs(r.value) <= 4.0 * r.se + 1e-12;
        c.detail = "residual within 4 SE (+1e-12)";
        report.checks.push_back(std::move(c));
    }

    // E_left[X] > p(lambda_bar).
    const measure::Estimate left = run.stats.left_mean();
    const measure::Estimate right = run.stats.right_mean();
    {
        LemmaCheck c;
        c.name = "left_peak_shift";
        c.value = left.value - pq.p;
        c.reference = pq.p;
        if (degenerate) {
            c.passed = std::abs(c.value) <= 1e-12;
            c.detail = "point mass: gap must vanish";
        } else {
            c.z = left.se > 0.0 ? c.value / left.se : 0.0;
            c.passed = c.z >= kVerdictZ;
            c.detail = "E_left - p(lambda_bar) with z >= 3";
        }
        report.checks.push_back(std::move(c));
    }

    // V(h)/h decays as h -> 0+.
    {
        LemmaCheck c;
        c.name = "variance_ratio_decay";
        if (degenerate) {
            const measure::Estimate v0 = run.stats.right_variance(cfg.bootstrap_resamples, seed);
            c.value = v0.value;
            c.passed = v0.value <= 1e-12;  // rounding in the pooled sums
            c.detail = "V(0) must vanish";
        } else {
            const std::vector<double> hs{delta_lambda, delta_lambda / 2, delta_lambda / 4, delta_lambda / 8};
            report.profile = measure::right_derivative_profile(lambda_bar, hs, cfg, seed);
            bool decreasing = true;
            bool bound_decreasing = true;
            for (std::size_t k = 0; k < hs.size(); ++k) {
                const auto iv = analytic::support_intervals(lambda_bar, hs[k]);
                report.bound_profile.push_back((iv.q_hi - iv.q_lo) * (iv.q_hi - iv.q_lo) / hs[k]);
                if (k == 0)
                    continue;
                const auto& prev = report.profile[k - 1].ratio;
                const auto& cur = report.profile[k].ratio;
                if (cur.value - prev.value > std::hypot(prev.se, cur.se))
                    decreasing = false;
                if (!(report.bound_profile[k] < report.bound_profile[k - 1]))
                    bound_decreasing = false;
            }
            c.value = report.profile.back().ratio.value;
            c.reference = report.profile.front().ratio.value;
            c.passed = decreasing && bound_decreasing;
            c.detail = std::string("V(h)/h ") + (decreasing ? "decreasing" : "not decreasing") +
                       ", bound sequence " + (bound_decreasing ? "decreasing" : "not decreasing");
        }
        report.checks.push_back(std::move(c));
    }

    // Zeros of H keep the ordering z_H < 0 < p < p_H < x*_H < x* < q < q_H.
    {
        LemmaCheck c;
        c.name = "h_root_ordering";
        try {
            const auto roots = analytic::h_function_roots(lambda_bar, kLemmaEpsilon);
            c.passed = analytic::h_roots_ordered(lambda_bar, roots);
            c.value = roots.p;
            c.reference = pq.p;
            c.detail = "epsilon = 1e-4";
        } catch (const RootCountError& err) {
            c.detail = err.what();
        }
        report.checks.push_back(std::move(c));
    }

    // h'' > 0 on I_p.
    {
        LemmaCheck c;
        c.name = "h_convex_on_left_interval";
        const auto& iv = report.intervals;
        c.passed = analytic::convexity_on_interval(lambda_bar, {iv.p_lo, iv.p_hi});
        c.value = std::min(analytic::h_second_derivative(lambda_bar, iv.p_lo),
                           analytic::h_second_derivative(lambda_bar, iv.p_hi));
        c.detail = "min of h'' over I_p";
        report.checks.push_back(std::move(c));
    }

    if (!degenerate) {
        report.left_slope = (left.value - pq.p) / delta_lambda;
        report.right_slope = (right.value - pq.q) / delta_lambda;
    }
    return report;
}

double flipflop_center(unsigned rho)
{
    if (rho == 0 || rho > 6)
        throw DomainError("flip-flop rho must be in 1..6, got " + detail::num(rho));
    if (rho == 1)
        return 3.208;
    if (rho == 2)
        return 3.508;

    const std::size_t period = std::size_t{1} << rho;
    constexpr double kScanStep = 1e-4;
    const double lo = analytic::kLambdaC4End;
    const double hi = analytic::kLambdaC2Omega;
    std::size_t best_len = 0, best_start = 0;
    std::size_t run_len = 0, run_start = 0;
    const auto steps = static_cast<std::size_t>((hi - lo) / kScanStep);
    for (std::size_t k = 1; k < steps; ++k) {
        if (has_period(lo + static_cast<double>(k) * kScanStep, period)) {
            if (run_len == 0)
                run_start = k;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len < 3)
        throw WindowNotFoundError("no clean period-" + detail::num(period) + " window found in (" +
                                  fmt(lo) + ", " + fmt(hi) + ")");
    const double first = lo + static_cast<double>(best_start) * kScanStep;
    const double last = lo + static_cast<double>(best_start + best_len - 1) * kScanStep;
    return 0.5 * (first + last);
}

double fit_delta(double lambda_bar, double delta_lambda, std::size_t period)
{
    if (!has_period(lambda_bar, period))
        throw WindowNotFoundError("lambda_bar=" + fmt(lambda_bar) + " is not in a period-" +
                                  detail::num(period) + " window");
    double d = delta_lambda;
    for (int halvings = 0; halvings <= 20; ++halvings) {
        if (d == 0.0 || (has_period(lambda_bar - d, period) && has_period(lambda_bar + d, period)))
            return d;
        d *= 0.5;
    }
    throw WindowNotFoundError("could not fit a period-" + detail::num(period) + " window around " +
                              fmt(lambda_bar));
}

std::vector<FlipflopRow> flipflop_scan(std::span<const unsigned> rho_values, std::span<const double> delta_lambdas,
                                       const measure::RunConfig& cfg, std::uint64_t seed)
{
    if (rho_values.empty() || delta_lambdas.empty())
        throw ValidationError("flip-flop scan needs at least one rho and one delta_lambda");
    for (double d : delta_lambdas)
        if (!(d > 0.0))
            throw DomainError("flip-flop delta_lambda values must be > 0");
    cfg.validate();

    std::vector<FlipflopRow> rows;
    for (unsigned rho : rho_values) {
        const double center = flipflop_center(rho);
        const std::size_t period = std::size_t{1} << rho;
        for (double requested : delta_lambdas) {
            FlipflopRow row;
            row.rho = rho;
            row.period = period;
            row.delta_lambda_requested = requested;
            row.exploratory = rho >= 3;
            const double used = fit_delta(center, requested, period);
            row.report = mean_comparison(center, used, cfg, seed);
            if (row.report.period != period)
                throw WindowNotFoundError("window around " + fmt(center) + " reported period " +
                                          detail::num(row.report.period) + ", expected " +
                                          detail::num(period));
            row.sign = row.report.difference > 0.0 ? 1 : (row.report.difference < 0.0 ? -1 : 0);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace slm::experiments
