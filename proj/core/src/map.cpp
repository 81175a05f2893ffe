#include "slm/map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slm/errors.hpp"
#include "text.hpp"

namespace slm {
namespace {

constexpr double kBoundSlack = 1e-12;

void check_lambda(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 4.0))
        throw DomainError("lambda must lie in [0,4] for [0,1] to be invariant, got " +
                          detail::num(lambda));
}

void check_state(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("state must lie in [0,1], got " + detail::num(x));
}

}  // namespace

ParameterDistribution ParameterDistribution::uniform(double lambda_bar, double delta_lambda)
{
    if (!std::isfinite(lambda_bar) || !std::isfinite(delta_lambda))
        throw DomainError("parameter distribution needs finite lambda_bar and delta_lambda");
    if (delta_lambda < 0.0)
        throw DomainError("delta_lambda must be >= 0, got " + detail::num(delta_lambda));
    double lo = lambda_bar - delta_lambda;
    double hi = lambda_bar + delta_lambda;
    if (lo < -kBoundSlack || hi > 4.0 + kBoundSlack)
        throw DomainError("parameter support [" + detail::num(lo) + ", " + detail::num(hi) +
                          "] must lie inside [0,4] (unit-interval invariance)");
    return ParameterDistribution(lambda_bar, delta_lambda, std::max(lo, 0.0), std::min(hi, 4.0));
}

double ParameterDistribution::density(double lambda) const noexcept
{
    if (is_point_mass() || lambda < lower_ || lambda > upper_)
        return 0.0;
    return 1.0 / (upper_ - lower_);
}

double ParameterDistribution::quantile(double u) const noexcept
{
    if (is_point_mass())
        return lambda_bar_;
    return std::clamp(lower_ + u * (upper_ - lower_), lower_, upper_);
}

double logistic_step(double lambda, double x)
{
    check_lambda(lambda);
    check_state(x);
    return logistic(lambda, x);
}

std::vector<double> iterate_deterministic(double lambda, double x0, std::size_t n)
{
    check_lambda(lambda);
    check_state(x0);
    std::vector<double> orbit;
    orbit.reserve(n + 1);
    orbit.push_back(x0);
    for (std::size_t i = 0; i < n; ++i)
        orbit.push_back(logistic(lambda, orbit.back()));
    return orbit;
}

double sample_parameter(const ParameterDistribution& dist, RandomStream& rng)
{
    return dist.quantile(rng.next_uniform());
}

StochasticStep stochastic_step(const ParameterDistribution& dist, double x, RandomStream& rng)
{
    check_state(x);
    double lambda = sample_parameter(dist, rng);
    return {lambda, logistic(lambda, x)};
}

RandomStream parameter_stream(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return RandomStream(derive_seed(seed, purpose::parameter), stream);
}

SamplePath generate_path(const ParameterDistribution& dist, double x0, std::size_t n,
                         std::uint64_t seed, std::uint64_t stream)
{
    check_state(x0);
    SamplePath path;
    path.x0 = x0;
    path.seed = seed;
    path.stream = stream;
    path.states.reserve(n + 1);
    path.lambdas.reserve(n);
    path.states.push_back(x0);

    RandomStream rng = parameter_stream(seed, stream);
    double x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        double lambda = sample_parameter(dist, rng);
        x = logistic(lambda, x);
        path.lambdas.push_back(lambda);
        path.states.push_back(x);
    }
    return path;
}

}  // namespace slm
