#pragma once

#include <cstdint>
#include <vector>

#include "slm/rng.hpp"

namespace slm {

/// Law of the growth parameter. Only the uniform law on
/// [lambda_bar - delta_lambda, lambda_bar + delta_lambda] is implemented;
/// delta_lambda == 0 is the point mass at lambda_bar.
class ParameterDistribution {
public:
    enum class Kind { uniform };

    /// Throws DomainError unless 0 <= lo and hi <= 4 and delta_lambda >= 0.
    static ParameterDistribution uniform(double lambda_bar, double delta_lambda);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double lambda_bar() const noexcept { return lambda_bar_; }
    [[nodiscard]] double delta_lambda() const noexcept { return delta_lambda_; }
    [[nodiscard]] double lower() const noexcept { return lower_; }
    [[nodiscard]] double upper() const noexcept { return upper_; }
    [[nodiscard]] bool is_point_mass() const noexcept { return delta_lambda_ == 0.0; }

    /// g(lambda). For the point mass this returns 0 everywhere; callers that
    /// need the atom use is_point_mass().
    [[nodiscard]] double density(double lambda) const noexcept;

    /// Maps a uniform draw u in (0,1) onto the support. Returns lambda_bar
    /// exactly for the point mass.
    [[nodiscard]] double quantile(double u) const noexcept;

private:
    ParameterDistribution(double lambda_bar, double delta_lambda, double lo, double hi)
        : lambda_bar_(lambda_bar), delta_lambda_(delta_lambda), lower_(lo), upper_(hi) {}

    Kind kind_ = Kind::uniform;
    double lambda_bar_;
    double delta_lambda_;
    double lower_;
    double upper_;
};

/// One realization X_0..X_n of the chain together with the parameters
/// lambda_1..lambda_n it consumed.
struct SamplePath {
    double x0 = 0.0;
    std::vector<double> states;   // n + 1 entries, states[0] == x0
    std::vector<double> lambdas;  // n entries, lambdas[i] drove states[i] -> states[i+1]
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    [[nodiscard]] std::size_t steps() const noexcept { return lambdas.size(); }
};

/// S_lambda(x) with no argument checks; the single evaluation order used
/// everywhere in the library.
[[nodiscard]] constexpr double logistic(double lambda, double x) noexcept
{
    return lambda * x * (1.0 - x);
}

/// S_lambda(x). Throws DomainError unless lambda in [0,4] and x in [0,1].
double logistic_step(double lambda, double x);

/// x0, S(x0), ..., S^n(x0).
std::vector<double> iterate_deterministic(double lambda, double x0, std::size_t n);

/// One parameter draw; always consumes exactly one value of the stream.
double sample_parameter(const ParameterDistribution& dist, RandomStream& rng);

struct StochasticStep {
    double lambda_used;
    double x_next;
};

StochasticStep stochastic_step(const ParameterDistribution& dist, double x, RandomStream& rng);

/// The stream that drives particle/path `stream` for a given seed.
[[nodiscard]] RandomStream parameter_stream(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Orbit of x0 under the skew product. Pure function of its arguments:
/// step k uses parameter_stream(seed, stream).uniform_at(k).
SamplePath generate_path(const ParameterDistribution& dist, double x0, std::size_t n,
                         std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace slm
