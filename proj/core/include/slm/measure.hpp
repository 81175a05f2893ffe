#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slm/map.hpp"

namespace slm::measure {

/// Equal-weight particle approximation of a probability measure on [0,1].
/// Particle i at generation g draws its parameter from
/// parameter_stream(base_seed, i).uniform_at(g), so an ensemble is a pure
/// function of (initial particles, base_seed, generation count).
struct Ensemble {
    std::vector<double> particles;
    std::uint64_t generation = 0;
    std::uint64_t base_seed = 0;

    [[nodiscard]] std::size_t size() const noexcept { return particles.size(); }
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// n i.i.d. uniform(0,1) particles at generation 0. Throws SizeError for n == 0.
Ensemble uniform_ensemble(std::size_t n, std::uint64_t seed);

/// One Monte-Carlo application of the Perron-Frobenius operator.
Ensemble pf_step(const Ensemble& e, const ParameterDistribution& dist);

/// n successive pf_step applications.
Ensemble pf_iterate(const Ensemble& e, const ParameterDistribution& dist, std::size_t n);

/// In-place variant of pf_iterate, used by the long runs.
void advance(Ensemble& e, const ParameterDistribution& dist, std::size_t n);

struct Moments {
    double mean;
    double second_moment;
    double variance;        // second_moment - mean^2
    double standard_error;  // sqrt(variance / n)
};

Moments moments(std::span<const double> values);
Moments moments(const Ensemble& e);

struct PeakSplit {
    Ensemble left;   // estimate of mu_p*
    Ensemble right;  // estimate of mu_q*
    double threshold;
};

/// Partition at (lambda_bar - 1) / lambda_bar. Each half is treated as a
/// conditional (renormalised) measure. Throws EmptyPeakError if a side is empty.
PeakSplit split_peaks(const Ensemble& e, double lambda_bar);

/// Equal-width histogram with sorted edges and integer counts.
struct Histogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    [[nodiscard]] std::size_t bins() const noexcept { return counts.size(); }
    [[nodiscard]] double density(std::size_t bin) const;
};

inline constexpr std::size_t kDefaultBins = 200;

Histogram make_histogram(std::span<const double> values, std::size_t bins = kDefaultBins,
                         double lo = 0.0, double hi = 1.0);

/// Shape of a long ensemble run: `generations` steps from a uniform start,
/// statistics pooled over the last `window` of them.
struct RunConfig {
    std::size_t particles = 2000;
    std::size_t generations = 2000;
    std::size_t window = 1024;
    std::size_t bootstrap_resamples = 200;

    /// Throws ValidationError unless particles >= 1, window is a positive
    /// multiple of 16 and window <= generations.
    void validate() const;
    [[nodiscard]] std::size_t burn_in() const noexcept { return generations - window; }
};

RunConfig desk_scale();
RunConfig paper_scale();

/// Per-particle sums accumulated over the pooling window. Each particle's
/// sums are independent of every other particle's, so standard errors come
/// from the spread across particles.
class PooledStatistics {
public:
    PooledStatistics(std::size_t particles, std::size_t window, double threshold);

    void record(std::size_t particle, std::size_t step_in_window, double x) noexcept;

    [[nodiscard]] std::size_t particles() const noexcept { return total_.size(); }
    [[nodiscard]] std::size_t window() const noexcept { return window_; }
    [[nodiscard]] double threshold() const noexcept { return threshold_; }

    /// Mean over all particles and window steps.
    [[nodiscard]] Estimate mean() const;

    /// z-score of (first-half mean - second-half mean), paired per particle.
    [[nodiscard]] double drift_z() const;
    [[nodiscard]] bool converged(double z_limit = 4.0) const;

    [[nodiscard]] std::uint64_t left_visits() const noexcept;
    [[nodiscard]] std::uint64_t right_visits() const noexcept;

    /// E_left[X], E_left[X^2], E_right[X], E_right[X^2] with delta-method SEs.
    /// Throw EmptyPeakError when the side was never visited.
    [[nodiscard]] Estimate left_mean() const;
    [[nodiscard]] Estimate left_second_moment() const;
    [[nodiscard]] Estimate right_mean() const;
    [[nodiscard]] Estimate right_second_moment() const;

    /// E_right[X] - lambda_bar (E_left[X] - E_left[X^2]), zero in expectation
    /// when the left peak maps onto the right peak.
    [[nodiscard]] Estimate lemma2_residual(double lambda_bar) const;

    /// Variance of the right peak with a bootstrap SE over particles.
    [[nodiscard]] Estimate right_variance(std::size_t resamples, std::uint64_t seed) const;

private:
    struct Side {
        std::vector<double> sum;
        std::vector<double> sum2;
        std::vector<double> count;
    };

    [[nodiscard]] static Estimate ratio(const std::vector<double>& num, const std::vector<double>& den,
                                        std::vector<double>* influence);
    void require_visits(const Side& side, const char* name) const;

    std::size_t window_;
    double threshold_;
    std::vector<double> total_;
    std::vector<double> first_half_;
    std::vector<double> second_half_;
    Side left_;
    Side right_;
};

struct PooledRun {
    Ensemble final_ensemble;
    PooledStatistics stats;
};

/// Uniform start, burn-in, then `window` generations of pooled statistics.
/// The peak threshold is (lambda_bar - 1)/lambda_bar when lambda_bar > 1.
PooledRun run_pooled(const ParameterDistribution& dist, const RunConfig& cfg, std::uint64_t seed);

/// Variance of X under the right peak for lambda ~ U[lb - d, lb + d].
/// Throws RegimeError unless the window lies in (3, 1 + sqrt 6).
Estimate variance_of_right_peak(double lambda_bar, double delta_lambda, const RunConfig& cfg,
                                std::uint64_t seed);

struct ProfilePoint {
    double h;
    Estimate variance;
    Estimate ratio;  // V(h) / h
};

/// V(h)/h for decreasing positive h. Throws DomainError otherwise.
std::vector<ProfilePoint> right_derivative_profile(double lambda_bar, std::span<const double> h_values,
                                                   const RunConfig& cfg, std::uint64_t seed);

/// Cesaro mean of states[burn_in .. n-1] (n = number of steps).
/// Throws SizeError unless the path has more than burn_in steps.
double time_average(const SamplePath& path, std::size_t burn_in);

/// time_average with a batch-means standard error (32 batches).
Estimate time_average_estimate(const SamplePath& path, std::size_t burn_in);

/// Fraction of states[burn_in .. n-1] inside the closed interval.
double occupation_fraction(const SamplePath& path, std::pair<double, double> interval,
                           std::size_t burn_in);

}  // namespace slm::measure
