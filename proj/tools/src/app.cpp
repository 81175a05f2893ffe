#include "slm/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "slm/analytic.hpp"
#include "slm/cli/options.hpp"
#include "slm/cli/svg.hpp"
#include "slm/errors.hpp"
#include "slm/experiments.hpp"
#include "slm/io.hpp"

namespace slm::cli {
namespace {

namespace fs = std::filesystem;
using io::format_double;

constexpr const char* kFooter = R"(Defaults:
  seed 20240601; scale desk (2000 particles x 2000 generations, window 1024);
  scale paper is 20000 x 10000, window 8192. Bootstrap resamples: 200.
  delta 0.024 (compare, verify, evolve); flipflop delta list 0.024,0.012; rho 1,2,3.
  bifurcation: kind deterministic, from 0 to 4 step 0.001, n-init 100, n-iter 1000;
  kind stochastic defaults to delta 0.1 over 0.1..3.9.
  evolve: 1000 particles, checkpoints 0,1,10,50,100,10000, 200 bins on [0,1].
  Output directory: --out-dir, else $SLM_OUTPUT_DIR, else the working directory.

Config file (--config): one 'key = value' per line, '#' comments. Keys are the
  long flag names with '_' for '-': lambda_bar, delta, seed, format, out_dir,
  scale, particles, generations, window, kind, from, to, step, n_init, n_iter,
  checkpoints, rho, bins, dump_ensemble. Flags override file values.

Artifacts are named <subcommand>-<lambda_bar>-<delta>-<seed>.<ext>
  (bifurcation-<kind>-<delta>-<seed>, flipflop-rho<r1_r2..>-<d1_d2..>-<seed>).
  histogram csv:    bin_lo,bin_hi,count,density
  evolve csv:       generation,bin_lo,bin_hi,count,density
  bifurcation csv:  parameter,init,terminal_state
  compare csv:      one row of the comparison report fields
  verify csv:       check,passed,value,reference,z,detail
  flipflop csv:     one row per (rho, delta)
  ensemble dump:    '# generation=G base_seed=S size=N' then column x
  json:             the report printed on stdout, also saved when requested

Exit status: 0 success, 2 invalid input, 1 computation failure.)";

struct Artifacts {
    fs::path dir;
    std::string stem;
    std::ostream& err;

    void write(const std::string& suffix, const std::string& content) const
    {
        const fs::path path = dir / (stem + suffix);
        std::ofstream f(path, std::ios::binary);
        f << content;
        f.close();
        if (!f)
            throw std::runtime_error("failed writing '" + path.string() + "'");
        err << path.string() << '\n';
    }
};

fs::path prepare_out_dir(const Options& o)
{
    fs::path dir = ".";
    if (o.out_dir)
        dir = *o.out_dir;
    else if (const char* env = std::getenv(kOutputDirEnv); env && *env)
        dir = env;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ValidationError("output directory '" + dir.string() + "' cannot be created" +
                              (ec ? ": " + ec.message() : std::string()));
    const fs::path probe = dir / ".slm-write-probe";
    {
        std::ofstream f(probe);
        if (!f)
            throw ValidationError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

void require_formats(const std::vector<std::string>& formats, std::initializer_list<std::string_view> allowed,
                     std::string_view command)
{
    for (const auto& f : formats)
        if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
            throw ValidationError(std::string(command) + " cannot produce format '" + f + "'");
}

bool wants(const std::vector<std::string>& formats, std::string_view f)
{
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

double single_delta(const Options& o, double fallback)
{
    if (o.delta.empty())
        return fallback;
    if (o.delta.size() != 1)
        throw ValidationError("delta takes a single value for this subcommand");
    return o.delta.front();
}

double require_lambda_bar(const Options& o)
{
    if (!o.lambda_bar)
        throw ValidationError("lambda_bar is required (--lambda-bar or config key lambda_bar)");
    return *o.lambda_bar;
}

measure::RunConfig run_config(const Options& o)
{
    measure::RunConfig cfg = o.scale == Scale::paper ? measure::paper_scale() : measure::desk_scale();
    if (o.particles)
        cfg.particles = *o.particles;
    if (o.generations)
        cfg.generations = *o.generations;
    if (o.window)
        cfg.window = *o.window;
    cfg.validate();
    return cfg;
}

std::string join(const std::vector<std::string>& parts, char sep)
{
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k)
            out += sep;
        out += parts[k];
    }
    return out;
}

std::string stem_for(std::string_view command, double lambda_bar, double delta, std::uint64_t seed)
{
    return std::string(command) + "-" + format_double(lambda_bar) + "-" + format_double(delta) + "-" +
           std::to_string(seed);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<Marker> analytic_markers(double lambda_bar)
{
    if (lambda_bar > 1.0 && lambda_bar <= analytic::kLambdaC2)
        return {{analytic::nonzero_fixed_point(lambda_bar), "x*(lambda_bar)", "#c0392b"}};
    if (lambda_bar > analytic::kLambdaC2 && lambda_bar <= analytic::kLambdaC4)
        return {{analytic::period2_average(lambda_bar), "(p+q)/2", "#e67e22"}};
    return {};
}

// ---------------------------------------------------------------- subcommands

int cmd_bifurcation(const Options& o, std::ostream& out, std::ostream& err)
{
    const bool stochastic = o.kind == "stochastic";
    if (!stochastic && !o.delta.empty() && single_delta(o, 0.0) != 0.0)
        throw ValidationError("delta applies only to --kind stochastic");
    const double delta = stochastic ? single_delta(o, 0.1) : 0.0;
    experiments::GridSpec grid;
    grid.from = o.from.value_or(stochastic ? delta : 0.0);
    grid.to = o.to.value_or(stochastic ? 4.0 - delta : 4.0);
    grid.step = o.step;
    grid.validate();
    if (grid.from < 0.0 || grid.to > 4.0)
        throw DomainError("bifurcation grid must lie in [0,4]");
    if (stochastic && (grid.from - delta < -1e-12 || grid.to + delta > 4.0 + 1e-12))
        throw DomainError("stochastic grid needs lambda_bar - delta >= 0 and lambda_bar + delta <= 4");
    if (o.n_init == 0)
        throw SizeError("n_init must be >= 1");
    const auto formats = o.formats.empty() ? std::vector<std::string>{"csv"} : o.formats;
    require_formats(formats, {"csv", "json", "svg"}, "bifurcation");
    const Artifacts art{prepare_out_dir(o),
                        "bifurcation-" + o.kind + "-" + format_double(delta) + "-" + std::to_string(o.seed), err};

    const auto ds = stochastic ? experiments::stochastic_bifurcation(grid, delta, o.n_init, o.n_iter, o.seed)
                               : experiments::deterministic_bifurcation(grid, o.n_init, o.n_iter, o.seed);
    const std::string summary = io::to_json(ds);
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        io::write_bifurcation_csv(csv, ds);
        art.write(".csv", csv.str());
    }
    if (wants(formats, "json"))
        art.write(".json", summary);
    if (wants(formats, "svg")) {
        SvgStyle st;
        st.title = stochastic ? "Stochastic bifurcation diagram, delta = " + format_double(delta)
                              : "Bifurcation diagram";
        st.x_label = stochastic ? "lambda_bar" : "lambda";
        st.y_label = "terminal state";
        st.markers = {{analytic::kLambdaC2, "3", "#c0392b"},
                      {analytic::kLambdaC4, "1+sqrt6", "#c0392b"},
                      {analytic::kLambdaC3, "period 3", "#c0392b"}};
        art.write(".svg", render_bifurcation_svg(ds, st));
    }
    out << summary;
    return kExitOk;
}

int cmd_evolve(const Options& o, std::ostream& out, std::ostream& err)
{
    const double lb = require_lambda_bar(o);
    const double delta = single_delta(o, 0.024);
    const auto dist = ParameterDistribution::uniform(lb, delta);
    const std::size_t particles = o.particles.value_or(1000);
    if (particles == 0)
        throw SizeError("particles must be >= 1");
    if (o.bins == 0)
        throw SizeError("bins must be >= 1");
    const std::vector<std::uint64_t> cps = o.checkpoints.value_or(experiments::kFigureCheckpoints);
    if (cps.empty())
        throw ValidationError("checkpoints must not be empty");
    for (std::size_t k = 1; k < cps.size(); ++k)
        if (!(cps[k] > cps[k - 1]))
            throw ValidationError("checkpoints must be strictly ascending");
    const auto formats = o.formats.empty() ? std::vector<std::string>{"csv"} : o.formats;
    require_formats(formats, {"csv", "json", "svg"}, "evolve");
    const Artifacts art{prepare_out_dir(o), stem_for("evolve", lb, delta, o.seed), err};

    const auto ev = experiments::distribution_evolution(dist, particles, cps, o.seed, o.bins);
    const std::string summary = io::to_json(ev, dist);
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        io::write_evolution_csv(csv, ev);
        art.write(".csv", csv.str());
    }
    if (wants(formats, "json"))
        art.write(".json", summary);
    if (wants(formats, "svg")) {
        const auto& last = ev.snapshots.back();
        SvgStyle st;
        st.title = "Generation " + std::to_string(last.generation) + ", lambda ~ U[" + format_double(dist.lower()) +
                   ", " + format_double(dist.upper()) + "]";
        st.y_label = "density";
        st.markers = analytic_markers(lb);
        st.markers.push_back({last.moments.mean, "ensemble mean", "#1f78b4"});
        art.write(".svg", render_histogram_svg(last.histogram, st));
    }
    if (o.dump_ensemble) {
        std::ostringstream csv;
        io::write_ensemble_csv(csv, ev.final_ensemble);
        art.write("-ensemble.csv", csv.str());
    }
    out << summary;
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err)
{
    const double lb = require_lambda_bar(o);
    const double delta = single_delta(o, 0.024);
    const auto dist = ParameterDistribution::uniform(lb, delta);
    analytic::classify_regime(dist.lower(), dist.upper());
    const auto cfg = run_config(o);
    const auto formats = o.formats.empty() ? std::vector<std::string>{"json"} : o.formats;
    require_formats(formats, {"csv", "json", "svg"}, "compare");
    const Artifacts art{prepare_out_dir(o), stem_for("compare", lb, delta, o.seed), err};

    const auto r = experiments::mean_comparison(lb, delta, cfg, o.seed);
    const std::string report = io::to_json(r);
    if (wants(formats, "json"))
        art.write(".json", report);
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        csv << "lambda_bar,delta_lambda,regime,period,stochastic_mean,se,deterministic_mean,difference,z_score,"
               "verdict,e_log_lambda,preconditions_met,drift_z,particles,generations,window,seed\n";
        csv << format_double(r.lambda_bar) << ',' << format_double(r.delta_lambda) << ','
            << analytic::to_string(r.regime.label) << ',' << r.period << ',' << format_double(r.stochastic_mean.value)
            << ',' << format_double(r.stochastic_mean.se) << ',' << format_double(r.deterministic_mean) << ','
            << format_double(r.difference) << ',' << format_double(r.z_score) << ','
            << experiments::to_string(r.verdict) << ',' << format_double(r.e_log_lambda) << ','
            << (r.preconditions_met ? "true" : "false") << ',' << format_double(r.drift_z) << ','
            << r.config.particles << ',' << r.config.generations << ',' << r.config.window << ',' << r.seed << '\n';
        art.write(".csv", csv.str());
    }
    if (wants(formats, "svg")) {
        SvgStyle st;
        st.title = "Final generation, lambda ~ U[" + format_double(dist.lower()) + ", " +
                   format_double(dist.upper()) + "]";
        st.y_label = "density";
        st.markers = {{r.deterministic_mean, "deterministic mean", "#c0392b"},
                      {r.stochastic_mean.value, "stochastic mean", "#1f78b4"}};
        art.write(".svg", render_histogram_svg(r.final_histogram, st));
    }
    out << report;
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err)
{
    const double lb = require_lambda_bar(o);
    const double delta = single_delta(o, 0.024);
    analytic::support_intervals(lb, delta);
    const auto cfg = run_config(o);
    const auto formats = o.formats.empty() ? std::vector<std::string>{"json"} : o.formats;
    require_formats(formats, {"csv", "json"}, "verify");
    const Artifacts art{prepare_out_dir(o), stem_for("verify", lb, delta, o.seed), err};

    const auto r = experiments::lemma_suite(lb, delta, cfg, o.seed);
    const std::string report = io::to_json(r);
    if (wants(formats, "json"))
        art.write(".json", report);
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        csv << "check,passed,value,reference,z,detail\n";
        for (const auto& c : r.checks)
            csv << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_double(c.value) << ','
                << format_double(c.reference) << ',' << format_double(c.z) << ',' << csv_field(c.detail) << '\n';
        art.write(".csv", csv.str());
    }
    out << report;
    return kExitOk;
}

int cmd_flipflop(const Options& o, std::ostream& out, std::ostream& err)
{
    const std::vector<double> deltas = o.delta.empty() ? std::vector<double>{0.024, 0.012} : o.delta;
    if (o.rho.empty())
        throw ValidationError("rho needs at least one value");
    for (unsigned r : o.rho)
        if (r < 1 || r > 6)
            throw DomainError("rho must be in 1..6, got " + std::to_string(r));
    for (double d : deltas)
        if (!(d > 0.0))
            throw DomainError("flipflop delta values must be > 0");
    const auto cfg = run_config(o);
    const auto formats = o.formats.empty() ? std::vector<std::string>{"json"} : o.formats;
    require_formats(formats, {"csv", "json"}, "flipflop");
    std::vector<std::string> rs, ds;
    for (unsigned r : o.rho)
        rs.push_back(std::to_string(r));
    for (double d : deltas)
        ds.push_back(format_double(d));
    const Artifacts art{prepare_out_dir(o),
                        "flipflop-rho" + join(rs, '_') + "-" + join(ds, '_') + "-" + std::to_string(o.seed), err};

    const auto rows = experiments::flipflop_scan(o.rho, deltas, cfg, o.seed);
    const std::string report = io::to_json(rows);
    if (wants(formats, "json"))
        art.write(".json", report);
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        csv << "rho,period,exploratory,lambda_bar,delta_lambda_requested,delta_lambda,stochastic_mean,se,"
               "deterministic_mean,difference,z_score,verdict,sign\n";
        for (const auto& row : rows) {
            const auto& r = row.report;
            csv << row.rho << ',' << row.period << ',' << (row.exploratory ? "true" : "false") << ','
                << format_double(r.lambda_bar) << ',' << format_double(row.delta_lambda_requested) << ','
                << format_double(r.delta_lambda) << ',' << format_double(r.stochastic_mean.value) << ','
                << format_double(r.stochastic_mean.se) << ',' << format_double(r.deterministic_mean) << ','
                << format_double(r.difference) << ',' << format_double(r.z_score) << ','
                << experiments::to_string(r.verdict) << ',' << row.sign << '\n';
        }
        art.write(".csv", csv.str());
    }
    out << report;
    return kExitOk;
}

// Every subcommand option is read as a string and routed through
// apply_setting, so flags and config files share one parser.
struct Command {
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    bool dump = false;
    CLI::Option* dump_flag = nullptr;
    std::string config;
};

void add(Command& c, const std::string& key, const std::string& help)
{
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    c.opts[key] = c.app->add_option(flag, c.raw[key], help);
}

void add_common(Command& c)
{
    add(c, "seed", "RNG seed (default 20240601)");
    add(c, "format", "comma list drawn from csv,json,svg");
    add(c, "out_dir", "artifact directory (default $SLM_OUTPUT_DIR or .)");
    c.app->add_option("--config", c.config, "key = value settings file; flags override it");
}

void add_run(Command& c)
{
    add(c, "scale", "desk or paper");
    add(c, "particles", "ensemble size");
    add(c, "generations", "total generations per run");
    add(c, "window", "pooling window, multiple of 16");
}

Options resolve(const Command& c, const std::string& name)
{
    Options o = c.config.empty() ? Options{} : load_config(c.config);
    o.command = name;
    for (const auto& [key, opt] : c.opts)
        if (opt->count() > 0)
            apply_setting(o, key, c.raw.at(key));
    if (c.dump_flag && c.dump_flag->count() > 0)
        o.dump_ensemble = c.dump;
    return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic logistic map: bifurcation diagrams, ensemble evolution, mean comparisons "
                 "and lemma checks.",
                 "slm"};
    app.footer(kFooter);
    app.require_subcommand(1, 1);

    std::map<std::string, Command> cmds;
    auto make = [&](const std::string& name, const std::string& help) -> Command& {
        Command& c = cmds[name];
        c.app = app.add_subcommand(name, help);
        add_common(c);
        return c;
    };

    Command& bif = make("bifurcation", "terminal states over a parameter grid");
    add(bif, "kind", "deterministic or stochastic");
    add(bif, "delta", "parameter half-width for --kind stochastic (default 0.1)");
    add(bif, "from", "first grid value");
    add(bif, "to", "last grid value");
    add(bif, "step", "grid increment (default 0.001)");
    add(bif, "n_init", "initial states per column (default 100)");
    add(bif, "n_iter", "iterations per initial state (default 1000)");

    Command& evo = make("evolve", "histograms of the ensemble at checkpoint generations");
    add(evo, "lambda_bar", "mean parameter");
    add(evo, "delta", "parameter half-width (default 0.024)");
    add(evo, "particles", "ensemble size (default 1000)");
    add(evo, "checkpoints", "ascending generations (default 0,1,10,50,100,10000)");
    add(evo, "bins", "histogram bins on [0,1] (default 200)");
    evo.dump_flag = evo.app->add_flag("--dump-ensemble", evo.dump, "also write the final ensemble");

    Command& cmp = make("compare", "stochastic mean against the deterministic cycle mean");
    add(cmp, "lambda_bar", "mean parameter");
    add(cmp, "delta", "parameter half-width (default 0.024)");
    add_run(cmp);

    Command& ver = make("verify", "period-2 lemma checks");
    add(ver, "lambda_bar", "mean parameter");
    add(ver, "delta", "parameter half-width (default 0.024)");
    add_run(ver);

    Command& ff = make("flipflop", "sign of the mean difference across period-2^rho windows");
    add(ff, "rho", "comma list of rho values (default 1,2,3)");
    add(ff, "delta", "comma list of half-widths (default 0.024,0.012)");
    add_run(ff);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "slm: error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        for (auto& [name, c] : cmds) {
            if (!c.app->parsed())
                continue;
            const Options o = resolve(c, name);
            if (name == "bifurcation")
                return cmd_bifurcation(o, out, err);
            if (name == "evolve")
                return cmd_evolve(o, out, err);
            if (name == "compare")
                return cmd_compare(o, out, err);
            if (name == "verify")
                return cmd_verify(o, out, err);
            return cmd_flipflop(o, out, err);
        }
    } catch (const ValidationError& e) {
        err << "slm: error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "slm: failure: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace slm::cli
