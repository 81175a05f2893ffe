#include "slm/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <system_error>

#include <json.hpp>

#include "slm/errors.hpp"
#include "text.hpp"

namespace slm::io {
namespace {

using nlohmann::ordered_json;

// JSON has no inf/nan; emit them as strings so the document stays valid.
ordered_json number(double v)
{
    if (std::isfinite(v))
        return v;
    return format_double(v);
}

ordered_json estimate(const measure::Estimate& e)
{
    return {{"value", number(e.value)}, {"se", number(e.se)}};
}

ordered_json config(const measure::RunConfig& c)
{
    return {{"particles", c.particles},
            {"generations", c.generations},
            {"window", c.window},
            {"bootstrap_resamples", c.bootstrap_resamples}};
}

ordered_json regime(const analytic::RegimeLabel& r)
{
    return {{"label", std::string(analytic::to_string(r.label))},
            {"lambda_lo", number(r.lower)},
            {"lambda_hi", number(r.upper)}};
}

ordered_json comparison(const experiments::ComparisonReport& r)
{
    return {{"lambda_bar", number(r.lambda_bar)},
            {"delta_lambda", number(r.delta_lambda)},
            {"regime", regime(r.regime)},
            {"period", r.period},
            {"stochastic_mean", estimate(r.stochastic_mean)},
            {"deterministic_mean", number(r.deterministic_mean)},
            {"difference", number(r.difference)},
            {"z_score", number(r.z_score)},
            {"verdict", std::string(experiments::to_string(r.verdict))},
            {"e_log_lambda", number(r.e_log_lambda)},
            {"preconditions_met", r.preconditions_met},
            {"drift_z", number(r.drift_z)},
            {"config", config(r.config)},
            {"seed", r.seed}};
}

std::string dump(const ordered_json& j)
{
    return j.dump(2) + "\n";
}

void split_line(const std::string& line, std::size_t lineno, std::string_view what)
{
    if (line.find(',') != std::string::npos)
        throw ValidationError("ensemble file line " + detail::num(lineno) + ": unexpected " +
                              std::string(what));
}

}  // namespace

std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_histogram_csv(std::ostream& os, const measure::Histogram& h)
{
    os << "bin_lo,bin_hi,count,density\n";
    for (std::size_t b = 0; b < h.bins(); ++b)
        os << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.counts[b] << ','
           << format_double(h.density(b)) << '\n';
}

void write_evolution_csv(std::ostream& os, const experiments::Evolution& ev)
{
    os << "generation,bin_lo,bin_hi,count,density\n";
    for (const auto& snap : ev.snapshots) {
        const auto& h = snap.histogram;
        for (std::size_t b = 0; b < h.bins(); ++b)
            os << snap.generation << ',' << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1])
               << ',' << h.counts[b] << ',' << format_double(h.density(b)) << '\n';
    }
}

void write_bifurcation_csv(std::ostream& os, const experiments::BifurcationDataset& ds)
{
    os << "parameter,init,terminal_state\n";
    for (const auto& row : ds.rows) {
        const std::string p = format_double(row.parameter);
        for (std::size_t i = 0; i < row.terminal_states.size(); ++i)
            os << p << ',' << i << ',' << format_double(row.terminal_states[i]) << '\n';
    }
}

void write_ensemble_csv(std::ostream& os, const measure::Ensemble& e)
{
    os << "# generation=" << e.generation << " base_seed=" << e.base_seed << " size=" << e.size() << '\n';
    os << "x\n";
    for (double x : e.particles)
        os << format_double(x) << '\n';
}

measure::Ensemble read_ensemble_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw ValidationError("ensemble file is empty");
    measure::Ensemble e;
    std::size_t size = 0;
    {
        unsigned long long gen = 0, seed = 0;
        std::size_t n = 0;
        if (std::sscanf(line.c_str(), "# generation=%llu base_seed=%llu size=%zu", &gen, &seed, &n) != 3)
            throw ValidationError("ensemble file line 1: expected '# generation=<n> base_seed=<n> size=<n>'");
        e.generation = gen;
        e.base_seed = seed;
        size = n;
    }
    if (!std::getline(is, line) || line != "x")
        throw ValidationError("ensemble file line 2: expected column header 'x'");
    e.particles.reserve(size);
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        split_line(line, lineno, "extra column");
        double x = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), x);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size())
            throw ValidationError("ensemble file line " + detail::num(lineno) + ": not a number");
        e.particles.push_back(x);
    }
    if (e.particles.size() != size)
        throw ValidationError("ensemble file declares " + detail::num(size) + " particles but holds " +
                              detail::num(e.particles.size()));
    return e;
}

std::string to_json(const experiments::ComparisonReport& r)
{
    return dump(comparison(r));
}

std::string to_json(const experiments::LemmaReport& r)
{
    ordered_json j;
    j["lambda_bar"] = number(r.lambda_bar);
    j["delta_lambda"] = number(r.delta_lambda);
    j["support"] = {{"case", std::string(analytic::to_string(r.intervals.support_case))},
                    {"I_p", {number(r.intervals.p_lo), number(r.intervals.p_hi)}},
                    {"I_q", {number(r.intervals.q_lo), number(r.intervals.q_hi)}}};
    ordered_json chain = ordered_json::array();
    for (const auto& lv : r.ordering)
        chain.push_back({{"label", std::string(lv.label)}, {"value", number(lv.value)}});
    j["ordering"] = chain;
    ordered_json profile = ordered_json::array();
    for (std::size_t k = 0; k < r.profile.size(); ++k) {
        const auto& p = r.profile[k];
        profile.push_back({{"h", number(p.h)},
                           {"variance", estimate(p.variance)},
                           {"ratio", estimate(p.ratio)},
                           {"bound", k < r.bound_profile.size() ? number(r.bound_profile[k]) : ordered_json()}});
    }
    j["profile"] = profile;
    j["left_slope"] = r.left_slope ? number(*r.left_slope) : ordered_json();
    j["right_slope"] = r.right_slope ? number(*r.right_slope) : ordered_json();
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", number(c.value)},
                          {"reference", number(c.reference)},
                          {"z", number(c.z)},
                          {"detail", c.detail}});
    j["checks"] = checks;
    j["all_passed"] = r.all_passed();
    j["config"] = config(r.config);
    j["seed"] = r.seed;
    return dump(j);
}

std::string to_json(std::span<const experiments::FlipflopRow> rows)
{
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        const double se = row.report.stochastic_mean.se;
        arr.push_back({{"rho", row.rho},
                       {"period", row.period},
                       {"exploratory", row.exploratory},
                       {"delta_lambda_requested", number(row.delta_lambda_requested)},
                       {"sign", row.sign},
                       {"ci95", {number(row.report.difference - 1.96 * se), number(row.report.difference + 1.96 * se)}},
                       {"report", comparison(row.report)}});
    }
    return dump({{"rows", arr}});
}

std::string to_json(const experiments::Evolution& ev, const ParameterDistribution& dist)
{
    ordered_json snaps = ordered_json::array();
    for (const auto& s : ev.snapshots)
        snaps.push_back({{"generation", s.generation},
                         {"mean", number(s.moments.mean)},
                         {"second_moment", number(s.moments.second_moment)},
                         {"variance", number(s.moments.variance)},
                         {"standard_error", number(s.moments.standard_error)}});
    return dump({{"lambda_bar", number(dist.lambda_bar())},
                 {"delta_lambda", number(dist.delta_lambda())},
                 {"particles", ev.final_ensemble.size()},
                 {"base_seed", ev.final_ensemble.base_seed},
                 {"snapshots", snaps}});
}

std::string to_json(const experiments::BifurcationDataset& ds)
{
    return dump({{"kind", std::string(experiments::to_string(ds.kind))},
                 {"from", number(ds.grid.from)},
                 {"to", number(ds.grid.to)},
                 {"step", number(ds.grid.step)},
                 {"delta_lambda", number(ds.delta_lambda)},
                 {"n_init", ds.n_init},
                 {"n_iter", ds.n_iter},
                 {"seed", ds.seed},
                 {"rows", ds.rows.size()}});
}

}  // namespace slm::io
