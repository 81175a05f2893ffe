#include "slm/cli/options.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "slm/errors.hpp"

namespace slm::cli {
namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view what, std::string_view value)
{
    throw ValidationError(std::string(key) + ": " + std::string(what) + " '" + std::string(value) + "'");
}

double to_real(std::string_view key, std::string_view v)
{
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x))
        bad(key, "expected a finite number, got", v);
    return x;
}

std::uint64_t to_count(std::string_view key, std::string_view v)
{
    std::uint64_t n = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), n);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
        bad(key, "expected a non-negative integer, got", v);
    return n;
}

bool to_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    bad(key, "expected true or false, got", v);
}

}  // namespace

const std::vector<std::string_view>& setting_keys()
{
    static const std::vector<std::string_view> keys{
        "lambda_bar", "delta", "seed", "format", "out_dir", "scale", "particles", "generations", "window",
        "kind", "from", "to", "step", "n_init", "n_iter", "checkpoints", "rho", "bins", "dump_ensemble"};
    return keys;
}

void apply_setting(Options& o, std::string_view key, std::string_view value)
{
    const std::string_view v = trim(value);
    if (key == "lambda_bar") {
        o.lambda_bar = to_real(key, v);
    } else if (key == "delta") {
        o.delta.clear();
        for (auto item : split_list(v))
            o.delta.push_back(to_real(key, item));
    } else if (key == "seed") {
        o.seed = to_count(key, v);
    } else if (key == "format") {
        o.formats.clear();
        for (auto item : split_list(v)) {
            if (item != "csv" && item != "json" && item != "svg")
                bad(key, "expected a subset of csv,json,svg, got", item);
            if (std::find(o.formats.begin(), o.formats.end(), item) == o.formats.end())
                o.formats.emplace_back(item);
        }
    } else if (key == "out_dir") {
        if (v.empty())
            bad(key, "expected a directory, got", v);
        o.out_dir = std::filesystem::path(std::string(v));
    } else if (key == "scale") {
        if (v == "desk")
            o.scale = Scale::desk;
        else if (v == "paper")
            o.scale = Scale::paper;
        else
            bad(key, "expected desk or paper, got", v);
    } else if (key == "particles") {
        o.particles = to_count(key, v);
    } else if (key == "generations") {
        o.generations = to_count(key, v);
    } else if (key == "window") {
        o.window = to_count(key, v);
    } else if (key == "kind") {
        if (v != "deterministic" && v != "stochastic")
            bad(key, "expected deterministic or stochastic, got", v);
        o.kind = std::string(v);
    } else if (key == "from") {
        o.from = to_real(key, v);
    } else if (key == "to") {
        o.to = to_real(key, v);
    } else if (key == "step") {
        o.step = to_real(key, v);
    } else if (key == "n_init") {
        o.n_init = to_count(key, v);
    } else if (key == "n_iter") {
        o.n_iter = to_count(key, v);
    } else if (key == "checkpoints") {
        std::vector<std::uint64_t> cps;
        for (auto item : split_list(v))
            cps.push_back(to_count(key, item));
        o.checkpoints = std::move(cps);
    } else if (key == "rho") {
        o.rho.clear();
        for (auto item : split_list(v))
            o.rho.push_back(static_cast<unsigned>(to_count(key, item)));
    } else if (key == "bins") {
        o.bins = to_count(key, v);
    } else if (key == "dump_ensemble") {
        o.dump_ensemble = to_bool(key, v);
    } else {
        throw ValidationError("unknown setting '" + std::string(key) + "'");
    }
}

Options parse_config(std::string_view text, std::string_view source)
{
    Options o;
    std::set<std::string, std::less<>> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = std::string(source) + " line " + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(where + "expected 'key = value', got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const auto& keys = setting_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ValidationError(where + "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second)
            throw ValidationError(where + "key '" + std::string(key) + "' given twice");
        try {
            apply_setting(o, key, line.substr(eq + 1));
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
    return o;
}

Options load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.filename().string());
}

}  // namespace slm::cli
