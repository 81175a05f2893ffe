#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "slm/cli/app.hpp"
#include "slm/cli/options.hpp"
#include "slm/cli/svg.hpp"
#include "slm/errors.hpp"

namespace fs = std::filesystem;
using namespace slm;
using namespace slm::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "slm");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("slm-cli-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int lines(const std::string& s)
{
    return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("config parsing")
{
    const auto o = parse_config("lambda_bar = 3.208\n");
    CHECK(*o.lambda_bar == 3.208);
    CHECK(o.seed == kDefaultSeed);
    CHECK(o.delta.empty());
    CHECK(o.rho == std::vector<unsigned>{1, 2, 3});

    const auto full = parse_config("# comment\n\nlambda_bar=3.5 # trailing\ndelta = 0.01, 0.02\nformat = csv,svg\n"
                                   "checkpoints = 0, 5, 9\nscale = paper\ndump_ensemble = true\n");
    CHECK(full.delta == std::vector<double>{0.01, 0.02});
    CHECK(full.formats == std::vector<std::string>{"csv", "svg"});
    CHECK(*full.checkpoints == std::vector<std::uint64_t>{0, 5, 9});
    CHECK(full.scale == Scale::paper);
    CHECK(full.dump_ensemble);

    auto message = [](std::string_view text) {
        try {
            parse_config(text, "run.cfg");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("lambda_bar = 3.2\nnonsense\n") == "run.cfg line 2: expected 'key = value', got 'nonsense'");
    CHECK(message("colour = red\n") == "run.cfg line 1: unknown key 'colour'");
    CHECK(message("seed = 1\nseed = 2\n") == "run.cfg line 2: key 'seed' given twice");
    CHECK(message("lambda_bar = abc\n").find("line 1: lambda_bar") != std::string::npos);
    CHECK(message("format = pdf\n").find("format") != std::string::npos);
    CHECK(message("seed = -3\n").find("seed") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/slm.cfg"), ValidationError);
}

TEST_CASE("svg rendering")
{
    const auto h = measure::make_histogram(std::vector<double>{0.2, 0.3, 0.3, 0.8}, 10);
    SvgStyle st;
    st.title = "a <test>";
    st.markers = {{0.65625, "(p+q)/2"}};
    const auto svg = render_histogram_svg(h, st);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("a &lt;test&gt;") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg == render_histogram_svg(h, st));

    CHECK_THROWS_AS(render_histogram_svg(measure::Histogram{}, st), EmptyDataError);
    experiments::BifurcationDataset empty;
    CHECK_THROWS_AS(render_bifurcation_svg(empty, st), EmptyDataError);

    const auto ds = experiments::deterministic_bifurcation({2.8, 3.9, 0.01}, 10, 200, 1);
    SvgStyle bs;
    bs.markers = {{3.0, "3"}, {3.449489742783178, "1+sqrt6"}, {3.8284, "period 3"}};
    const auto bsvg = render_bifurcation_svg(ds, bs);
    CHECK(std::count(bsvg.begin(), bsvg.end(), '\n') > 100);
    std::size_t dashed = 0;
    for (auto pos = bsvg.find("stroke-dasharray"); pos != std::string::npos;
         pos = bsvg.find("stroke-dasharray", pos + 1))
        ++dashed;
    CHECK(dashed == 3);
}

TEST_CASE("compare writes a json report")
{
    const auto dir = scratch("compare");
    const auto r = invoke({"compare", "--lambda-bar", "3.208", "--delta", "0.024", "--seed", "7", "--format",
                           "json", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "stochastic_greater");
    const fs::path file = dir / "compare-3.208-0.024-7.json";
    CHECK(fs::exists(file));
    CHECK(slurp(file) == r.out);
    CHECK(r.err == file.string() + "\n");
}

TEST_CASE("exit codes and single-line diagnostics")
{
    const auto straddle = invoke({"compare", "--lambda-bar", "2.95", "--delta", "0.1"});
    CHECK(straddle.code == 2);
    CHECK(lines(straddle.err) == 1);
    CHECK(straddle.err.find("straddles") != std::string::npos);
    CHECK(straddle.out.empty());

    CHECK(invoke({"compare", "--lambda-bar", "3.2", "--wat"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"explode"}).code == 2);
    CHECK(invoke({"compare"}).code == 2);  // lambda_bar missing
    CHECK(invoke({"compare", "--lambda-bar", "3.2", "--window", "100"}).code == 2);
    CHECK(invoke({"verify", "--lambda-bar", "3.3", "--delta", "0.2"}).code == 2);
    CHECK(invoke({"verify", "--lambda-bar", "3.2", "--format", "svg"}).code == 2);
    CHECK(invoke({"bifurcation", "--from", "3", "--to", "2"}).code == 2);
    CHECK(invoke({"evolve", "--lambda-bar", "2", "--checkpoints", "5,1"}).code == 2);
    CHECK(invoke({"flipflop", "--rho", "9"}).code == 2);

    const auto unwritable = invoke({"compare", "--lambda-bar", "3.2", "--out-dir", "/proc/slm-cannot-write"});
    CHECK(unwritable.code == 2);
    CHECK(lines(unwritable.err) == 1);

    // the window sits in one regime, but the run is far too short to settle
    const auto runtime = invoke({"compare", "--lambda-bar", "3", "--delta", "0", "--particles", "2000",
                                 "--generations", "32", "--window", "32", "--out-dir", scratch("rt").string()});
    CHECK(runtime.code == 1);
    CHECK(lines(runtime.err) == 1);

    const auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("20240601") != std::string::npos);
    CHECK(help.out.find("bin_lo,bin_hi,count,density") != std::string::npos);
}

TEST_CASE("config file with overriding flag")
{
    const auto dir = scratch("config");
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "lambda_bar = 3.1\nseed = 5\nparticles = 500\ngenerations = 600\nwindow = 256\n";
    const auto r = invoke({"compare", "--config", cfg.string(), "--lambda-bar", "3.208", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["lambda_bar"] == 3.208);
    CHECK(j["seed"] == 5);
    CHECK(j["config"]["particles"] == 500);
    CHECK(fs::exists(dir / "compare-3.208-0.024-5.json"));

    const fs::path broken = dir / "broken.cfg";
    std::ofstream(broken) << "lambda_bar 3.2\n";
    const auto b = invoke({"compare", "--config", broken.string()});
    CHECK(b.code == 2);
    CHECK(b.err.find("broken.cfg line 1") != std::string::npos);
}

TEST_CASE("bifurcation csv follows the grid protocol")
{
    const auto dir = scratch("bif");
    const auto r = invoke({"bifurcation", "--kind", "deterministic", "--from", "3", "--to", "3.2", "--step", "0.1",
                           "--n-init", "5", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / ("bifurcation-deterministic-0-" + std::to_string(kDefaultSeed) + ".csv"));
    CHECK(csv.rfind("parameter,init,terminal_state\n", 0) == 0);
    CHECK(lines(csv) == 1 + 3 * 5);
    CHECK(csv.find("\n3.1,4,") != std::string::npos);
}

TEST_CASE("artifacts are byte-identical across runs")
{
    const auto a = scratch("det-a"), b = scratch("det-b");
    for (const auto& dir : {a, b}) {
        REQUIRE(invoke({"evolve", "--lambda-bar", "3.208", "--particles", "200", "--checkpoints", "0,10,100",
                        "--format", "csv,json,svg", "--dump-ensemble", "--out-dir", dir.string()})
                    .code == 0);
        REQUIRE(invoke({"bifurcation", "--kind", "stochastic", "--from", "2.9", "--to", "3.3", "--step", "0.05",
                        "--n-init", "20", "--format", "csv,svg", "--out-dir", dir.string()})
                    .code == 0);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        ++files;
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(files == 6);
}

TEST_CASE("output directory from the environment")
{
    const auto dir = scratch("env");
    ::setenv(kOutputDirEnv, dir.string().c_str(), 1);
    const auto r = invoke({"evolve", "--lambda-bar", "2", "--particles", "10", "--checkpoints", "0,3"});
    ::unsetenv(kOutputDirEnv);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / ("evolve-2-0.024-" + std::to_string(kDefaultSeed) + ".csv")));
}
