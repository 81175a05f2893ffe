#include "slm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slm/analytic.hpp"
#include "slm/errors.hpp"
#include "slm/rng.hpp"
#include "text.hpp"

namespace slm::measure {
namespace {

double sample_sd(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<RandomStream> particle_streams(std::uint64_t base_seed, std::size_t n)
{
    std::vector<RandomStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        streams.push_back(parameter_stream(base_seed, i));
    return streams;
}

}  // namespace

Ensemble uniform_ensemble(std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw SizeError("ensemble needs at least one particle");
    RandomStream rng(derive_seed(seed, purpose::initial_state), 0);
    Ensemble e;
    e.base_seed = seed;
    e.particles.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        e.particles[i] = rng.uniform_at(i);
    return e;
}

void advance(Ensemble& e, const ParameterDistribution& dist, std::size_t n)
{
    if (e.particles.empty())
        throw SizeError("cannot advance an empty ensemble");
    if (n == 0)
        return;
    const auto streams = particle_streams(e.base_seed, e.size());
    for (std::size_t step = 0; step < n; ++step) {
        const std::uint64_t g = e.generation;
        for (std::size_t i = 0; i < e.particles.size(); ++i)
            e.particles[i] = logistic(dist.quantile(streams[i].uniform_at(g)), e.particles[i]);
        ++e.generation;
    }
}

Ensemble pf_step(const Ensemble& e, const ParameterDistribution& dist)
{
    return pf_iterate(e, dist, 1);
}

Ensemble pf_iterate(const Ensemble& e, const ParameterDistribution& dist, std::size_t n)
{
    Ensemble next = e;
    advance(next, dist, n);
    return next;
}

Moments moments(std::span<const double> values)
{
    if (values.empty())
        throw SizeError("moments of an empty sample are undefined");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (double x : values) {
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double second = sum2 / n;
    const double variance = std::max(0.0, second - mean * mean);
    return {mean, second, variance, std::sqrt(variance / n)};
}

Moments moments(const Ensemble& e)
{
    return moments(std::span<const double>(e.particles));
}

PeakSplit split_peaks(const Ensemble& e, double lambda_bar)
{
    const double threshold = analytic::nonzero_fixed_point(lambda_bar);
    PeakSplit split{{{}, e.generation, e.base_seed}, {{}, e.generation, e.base_seed}, threshold};
    for (double x : e.particles)
        (x <= threshold ? split.left : split.right).particles.push_back(x);
    if (split.left.particles.empty() || split.right.particles.empty())
        throw EmptyPeakError("peak split at " + detail::num(threshold) + " left " +
                             detail::num(split.left.size()) + " / right " +
                             detail::num(split.right.size()) +
                             " particles; ensemble not converged or not in the period-2 regime");
    return split;
}

double Histogram::density(std::size_t bin) const
{
    const double width = edges.at(bin + 1) - edges.at(bin);
    return total == 0 ? 0.0 : static_cast<double>(counts.at(bin)) / (static_cast<double>(total) * width);
}

Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi)
{
    if (bins == 0 || !(lo < hi))
        throw DomainError("histogram needs bins >= 1 and lo < hi");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
        h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double x : values) {
        if (x < lo || x > hi)
            continue;
        auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
        ++h.counts[std::min(k, bins - 1)];
        ++h.total;
    }
    return h;
}

void RunConfig::validate() const
{
    if (particles == 0)
        throw SizeError("run needs at least one particle");
    if (window == 0 || window % 16 != 0)
        throw ValidationError("pooling window must be a positive multiple of 16, got " +
                              detail::num(window));
    if (window > generations)
        throw ValidationError("pooling window (" + detail::num(window) +
                              ") cannot exceed the number of generations (" +
                              detail::num(generations) + ")");
    if (bootstrap_resamples < 2)
        throw ValidationError("bootstrap needs at least 2 resamples");
}

RunConfig desk_scale()
{
    return {};
}

RunConfig paper_scale()
{
    return {20000, 10000, 8192, 200};
}

PooledStatistics::PooledStatistics(std::size_t particles, std::size_t window, double threshold)
    : window_(window),
      threshold_(threshold),
      total_(particles, 0.0),
      first_half_(particles, 0.0),
      second_half_(particles, 0.0),
      left_{std::vector<double>(particles, 0.0), std::vector<double>(particles, 0.0),
            std::vector<double>(particles, 0.0)},
      right_{std::vector<double>(particles, 0.0), std::vector<double>(particles, 0.0),
             std::vector<double>(particles, 0.0)}
{
}

void PooledStatistics::record(std::size_t i, std::size_t step, double x) noexcept
{
    total_[i] += x;
    (step < window_ / 2 ? first_half_ : second_half_)[i] += x;
    Side& side = x <= threshold_ ? left_ : right_;
    side.sum[i] += x;
    side.sum2[i] += x * x;
    side.count[i] += 1.0;
}

Estimate PooledStatistics::mean() const
{
    std::vector<double> per_particle(total_.size());
    for (std::size_t i = 0; i < total_.size(); ++i)
        per_particle[i] = total_[i] / static_cast<double>(window_);
    const double n = static_cast<double>(per_particle.size());
    const double m = std::accumulate(per_particle.begin(), per_particle.end(), 0.0) / n;
    return {m, sample_sd(per_particle) / std::sqrt(n)};
}

double PooledStatistics::drift_z() const
{
    const double half = static_cast<double>(window_ / 2);
    std::vector<double> diff(total_.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = (first_half_[i] - second_half_[i]) / half;
    const double n = static_cast<double>(diff.size());
    const double m = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
    const double se = sample_sd(diff) / std::sqrt(n);
    if (std::abs(m) <= 1e-12)
        return 0.0;
    return se > 0.0 ? m / se : HUGE_VAL;
}

bool PooledStatistics::converged(double z_limit) const
{
    return std::abs(drift_z()) < z_limit;
}

std::uint64_t PooledStatistics::left_visits() const noexcept
{
    return static_cast<std::uint64_t>(std::accumulate(left_.count.begin(), left_.count.end(), 0.0));
}

std::uint64_t PooledStatistics::right_visits() const noexcept
{
    return static_cast<std::uint64_t>(std::accumulate(right_.count.begin(), right_.count.end(), 0.0));
}

// Ratio estimator sum(num)/sum(den) with delta-method SE. The influence of
// particle i is (num_i - R den_i) / mean(den).
Estimate PooledStatistics::ratio(const std::vector<double>& num, const std::vector<double>& den,
                                 std::vector<double>* influence)
{
    const double n = static_cast<double>(num.size());
    const double num_total = std::accumulate(num.begin(), num.end(), 0.0);
    const double den_total = std::accumulate(den.begin(), den.end(), 0.0);
    const double r = num_total / den_total;
    const double den_mean = den_total / n;
    std::vector<double> psi(num.size());
    for (std::size_t i = 0; i < num.size(); ++i)
        psi[i] = (num[i] - r * den[i]) / den_mean;
    const double se = sample_sd(psi) / std::sqrt(n);
    if (influence != nullptr)
        *influence = std::move(psi);
    return {r, se};
}

void PooledStatistics::require_visits(const Side& side, const char* name) const
{
    if (std::accumulate(side.count.begin(), side.count.end(), 0.0) == 0.0)
        throw EmptyPeakError(std::string(name) + " peak (threshold " + detail::num(threshold_) +
                             ") received no visits; ensemble not converged or not in the period-2 regime");
}

Estimate PooledStatistics::left_mean() const
{
    require_visits(left_, "left");
    return ratio(left_.sum, left_.count, nullptr);
}

Estimate PooledStatistics::left_second_moment() const
{
    require_visits(left_, "left");
    return ratio(left_.sum2, left_.count, nullptr);
}

Estimate PooledStatistics::right_mean() const
{
    require_visits(right_, "right");
    return ratio(right_.sum, right_.count, nullptr);
}

Estimate PooledStatistics::right_second_moment() const
{
    require_visits(right_, "right");
    return ratio(right_.sum2, right_.count, nullptr);
}

Estimate PooledStatistics::lemma2_residual(double lambda_bar) const
{
    require_visits(left_, "left");
    require_visits(right_, "right");
    std::vector<double> psi_r, psi_l, psi_l2;
    const Estimate er = ratio(right_.sum, right_.count, &psi_r);
    const Estimate el = ratio(left_.sum, left_.count, &psi_l);
    const Estimate el2 = ratio(left_.sum2, left_.count, &psi_l2);

    std::vector<double> psi(psi_r.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = psi_r[i] - lambda_bar * (psi_l[i] - psi_l2[i]);
    const double n = static_cast<double>(psi.size());
    return {er.value - lambda_bar * (el.value - el2.value), sample_sd(psi) / std::sqrt(n)};
}

Estimate PooledStatistics::right_variance(std::size_t resamples, std::uint64_t seed) const
{
    require_visits(right_, "right");
    const std::size_t n = total_.size();
    auto variance_of = [&](auto&& index_of) {
        double s = 0.0, s2 = 0.0, c = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = index_of(k);
            s += right_.sum[i];
            s2 += right_.sum2[i];
            c += right_.count[i];
        }
        if (c == 0.0)
            return 0.0;
        const double m = s / c;
        return std::max(0.0, s2 / c - m * m);
    };

    const double point = variance_of([](std::size_t k) { return k; });
    std::vector<double> boot;
    boot.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        RandomStream rng(derive_seed(seed, purpose::bootstrap), r);
        boot.push_back(variance_of([&](std::size_t) {
            return std::min(n - 1, static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(n)));
        }));
    }
    return {point, sample_sd(boot)};
}

PooledRun run_pooled(const ParameterDistribution& dist, const RunConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const double lb = dist.lambda_bar();
    const double threshold = lb > 1.0 ? analytic::nonzero_fixed_point(lb) : 0.0;

    Ensemble e = uniform_ensemble(cfg.particles, seed);
    advance(e, dist, cfg.burn_in());

    PooledStatistics stats(cfg.particles, cfg.window, threshold);
    const auto streams = particle_streams(e.base_seed, e.size());
    for (std::size_t step = 0; step < cfg.window; ++step) {
        const std::uint64_t g = e.generation;
        for (std::size_t i = 0; i < e.particles.size(); ++i) {
            e.particles[i] = logistic(dist.quantile(streams[i].uniform_at(g)), e.particles[i]);
            stats.record(i, step, e.particles[i]);
        }
        ++e.generation;
    }
    return {std::move(e), std::move(stats)};
}

Estimate variance_of_right_peak(double lambda_bar, double delta_lambda, const RunConfig& cfg,
                                std::uint64_t seed)
{
    (void)analytic::support_intervals(lambda_bar, delta_lambda);  // regime precondition
    const auto dist = ParameterDistribution::uniform(lambda_bar, delta_lambda);
    const PooledRun run = run_pooled(dist, cfg, seed);
    return run.stats.right_variance(cfg.bootstrap_resamples, seed);
}

std::vector<ProfilePoint> right_derivative_profile(double lambda_bar, std::span<const double> h_values,
                                                   const RunConfig& cfg, std::uint64_t seed)
{
    if (h_values.empty())
        throw DomainError("derivative profile needs at least one h value");
    for (std::size_t k = 0; k < h_values.size(); ++k) {
        if (!(h_values[k] > 0.0))
            throw DomainError("derivative profile needs h > 0 (h = 0 is excluded)");
        if (k > 0 && !(h_values[k] < h_values[k - 1]))
            throw DomainError("derivative profile needs strictly decreasing h values");
    }
    std::vector<ProfilePoint> profile;
    profile.reserve(h_values.size());
    for (double h : h_values) {
        const Estimate v = variance_of_right_peak(lambda_bar, h, cfg, seed);
        profile.push_back({h, v, {v.value / h, v.se / h}});
    }
    return profile;
}

namespace {

std::span<const double> post_burn_in(const SamplePath& path, std::size_t burn_in)
{
    const std::size_t n = path.steps();
    if (n <= burn_in)
        throw SizeError("path has " + detail::num(n) + " steps, needs more than the burn-in of " +
                        detail::num(burn_in));
    return std::span<const double>(path.states).subspan(burn_in, n - burn_in);
}

}  // namespace

double time_average(const SamplePath& path, std::size_t burn_in)
{
    const auto tail = post_burn_in(path, burn_in);
    return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
}

Estimate time_average_estimate(const SamplePath& path, std::size_t burn_in)
{
    constexpr std::size_t kBatches = 32;
    const auto tail = post_burn_in(path, burn_in);
    std::size_t batch = tail.size() / kBatches;
    if (batch >= 16)
        batch -= batch % 16;
    if (batch == 0)
        throw SizeError("path too short for batch-means error estimate");
    std::vector<double> means(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        const auto chunk = tail.subspan(b * batch, batch);
        means[b] = std::accumulate(chunk.begin(), chunk.end(), 0.0) / static_cast<double>(batch);
    }
    return {time_average(path, burn_in), sample_sd(means) / std::sqrt(static_cast<double>(kBatches))};
}

double occupation_fraction(const SamplePath& path, std::pair<double, double> interval, std::size_t burn_in)
{
    const auto tail = post_burn_in(path, burn_in);
    const auto inside = std::count_if(tail.begin(), tail.end(), [&](double x) {
        return x >= interval.first && x <= interval.second;
    });
    return static_cast<double>(inside) / static_cast<double>(tail.size());
}

}  // namespace slm::measure
