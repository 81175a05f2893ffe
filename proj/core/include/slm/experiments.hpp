#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slm/analytic.hpp"
#include "slm/map.hpp"
#include "slm/measure.hpp"

namespace slm::experiments {

/// Inclusive parameter grid from..to in increments of step.
struct GridSpec {
    double from = 0.0;
    double to = 4.0;
    double step = 0.001;

    void validate() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] double at(std::size_t k) const;
};

enum class BifurcationKind { deterministic, stochastic };

std::string_view to_string(BifurcationKind k) noexcept;

struct BifurcationRow {
    double parameter;
    std::vector<double> terminal_states;
};

struct BifurcationDataset {
    BifurcationKind kind = BifurcationKind::deterministic;
    GridSpec grid;
    double delta_lambda = 0.0;
    std::size_t n_init = 0;
    std::size_t n_iter = 0;
    std::uint64_t seed = 0;
    std::vector<BifurcationRow> rows;
};

/// For each lambda on the grid, n_init uniform initial states iterated
/// n_iter times; the last state of each is kept.
BifurcationDataset deterministic_bifurcation(const GridSpec& grid, std::size_t n_init = 100,
                                             std::size_t n_iter = 1000, std::uint64_t seed = 0);

/// Same protocol under the skew product with lambda ~ U[lb - d, lb + d];
/// every path has its own parameter stream. With d == 0 the rows equal the
/// deterministic ones for the same seed.
BifurcationDataset stochastic_bifurcation(const GridSpec& grid, double delta_lambda,
                                          std::size_t n_init = 100, std::size_t n_iter = 1000,
                                          std::uint64_t seed = 0);

struct EvolutionSnapshot {
    std::uint64_t generation;
    measure::Histogram histogram;
    measure::Moments moments;
};

struct Evolution {
    std::vector<EvolutionSnapshot> snapshots;
    measure::Ensemble final_ensemble;
};

inline const std::vector<std::uint64_t> kFigureCheckpoints{0, 1, 10, 50, 100, 10000};

/// Histograms of the uniform ensemble pushed through P* at each checkpoint.
/// Throws ValidationError unless checkpoints are strictly ascending.
Evolution distribution_evolution(const ParameterDistribution& dist, std::size_t n_particles,
                                 std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                                 std::size_t bins = measure::kDefaultBins);

enum class Verdict { stochastic_greater, stochastic_less, inconclusive };

std::string_view to_string(Verdict v) noexcept;

inline constexpr double kVerdictZ = 3.0;

struct ComparisonReport {
    double lambda_bar = 0.0;
    double delta_lambda = 0.0;
    analytic::RegimeLabel regime{};
    std::size_t period = 0;
    measure::Estimate stochastic_mean;
    double deterministic_mean = 0.0;
    double difference = 0.0;
    double z_score = 0.0;
    Verdict verdict = Verdict::inconclusive;
    double e_log_lambda = 0.0;
    bool preconditions_met = false;
    double drift_z = 0.0;
    measure::Histogram final_histogram;  // last generation, default binning
    measure::RunConfig config;
    std::uint64_t seed = 0;
};

Verdict verdict_for(double z) noexcept;

/// Stochastic long-term mean (pooled over the run window) against the mean
/// of the attracting cycle of S at lambda_bar. Throws RegimeError if the
/// window straddles a regime boundary, NoConvergenceError if the run drifts.
ComparisonReport mean_comparison(double lambda_bar, double delta_lambda, const measure::RunConfig& cfg,
                                 std::uint64_t seed);

struct LemmaCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity
    double reference = 0.0;  // what it is compared against
    double z = 0.0;          // where a standard error applies
    std::string detail;
};

struct LemmaReport {
    double lambda_bar = 0.0;
    double delta_lambda = 0.0;
    analytic::SupportIntervals intervals{};
    std::vector<analytic::LabeledValue> ordering;
    std::vector<measure::ProfilePoint> profile;
    std::vector<double> bound_profile;   // (x_qmax - x_qmin)^2 / h
    std::optional<double> left_slope;    // (E_left - p(lb)) / d, reported only
    std::optional<double> right_slope;   // (E_right - q(lb)) / d, reported only
    std::vector<LemmaCheck> checks;
    measure::RunConfig config;
    std::uint64_t seed = 0;

    [[nodiscard]] bool all_passed() const noexcept;
};

inline constexpr double kLemmaEpsilon = 1e-4;

/// Runs the period-2 verification checks (containment and ordering, the
/// left/right mean identity, the left-peak shift, the V(h)/h profile, the H
/// root ordering and convexity of h on I_p). Throws RegimeError if the
/// window leaves (3, 1 + sqrt 6).
LemmaReport lemma_suite(double lambda_bar, double delta_lambda, const measure::RunConfig& cfg,
                        std::uint64_t seed);

struct FlipflopRow {
    unsigned rho = 0;
    std::size_t period = 0;
    double delta_lambda_requested = 0.0;
    bool exploratory = false;  // rho >= 3: reported, not asserted
    int sign = 0;
    ComparisonReport report;
};

/// lambda_bar used for period 2^rho: 3.208 and 3.508 for rho = 1, 2; for
/// rho >= 3 the centre of the widest run of period-2^rho points found by
/// scanning (3.54409, 3.56995). Throws WindowNotFoundError.
double flipflop_center(unsigned rho);

/// Halves delta_lambda until lambda_bar and both window ends report period
/// 2^rho. Throws WindowNotFoundError after 20 halvings.
double fit_delta(double lambda_bar, double delta_lambda, std::size_t period);

std::vector<FlipflopRow> flipflop_scan(std::span<const unsigned> rho_values,
                                       std::span<const double> delta_lambdas,
                                       const measure::RunConfig& cfg, std::uint64_t seed);

}  // namespace slm::experiments
