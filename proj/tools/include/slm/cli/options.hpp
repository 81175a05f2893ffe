#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slm::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kOutputDirEnv = "SLM_OUTPUT_DIR";

enum class Scale { desk, paper };

/// Everything a subcommand needs. Unset optionals fall back to per-subcommand
/// defaults when the command runs.
struct Options {
    std::string command;
    std::optional<double> lambda_bar;
    std::vector<double> delta;  // flipflop accepts several values
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::string> formats;
    std::optional<std::filesystem::path> out_dir;
    Scale scale = Scale::desk;
    std::optional<std::size_t> particles;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> window;
    std::string kind = "deterministic";
    std::optional<double> from;
    std::optional<double> to;
    double step = 0.001;
    std::size_t n_init = 100;
    std::size_t n_iter = 1000;
    std::optional<std::vector<std::uint64_t>> checkpoints;
    std::vector<unsigned> rho{1, 2, 3};
    std::size_t bins = 200;
    bool dump_ensemble = false;
};

/// Keys accepted by config files; each maps to the flag --<key with dashes>.
const std::vector<std::string_view>& setting_keys();

/// Parses `value` into the field named by `key`. Throws ValidationError with
/// a message naming the key.
void apply_setting(Options& opts, std::string_view key, std::string_view value);

/// Flat `key = value` document, `#` starts a comment. Starts from defaults.
/// Throws ValidationError naming the line for malformed lines, unknown or
/// repeated keys and unparsable values.
Options load_config(const std::filesystem::path& path);
Options parse_config(std::string_view text, std::string_view source = "config");

}  // namespace slm::cli
