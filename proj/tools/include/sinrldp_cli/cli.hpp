#pragma once

#include "sinrldp/realization.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sinrldp::cli {

inline constexpr int kExitTypical = 0;
inline constexpr int kExitAnomalous = 1;
inline constexpr int kExitError = 2;

using KeyValues = std::map<std::string, std::string>;

/// Keys accepted in config files; each has a matching --flag with '_' spelled '-'.
const std::vector<std::string>& known_keys();

/// Parses key=value lines; '#' starts a comment, blank lines are skipped.
/// Throws ValidationError naming the line on syntax errors or unknown keys.
KeyValues parse_config_text(std::string_view text);
KeyValues load_config_file(const std::string& path);

/// Typed view of the merged configuration (config file, then flags, then SINRLDP_SEED).
struct Settings {
    NetworkModel model;
    std::size_t spatial_bins = 8;
    std::size_t mark_bins = 8;
    std::uint64_t seed = 1;
    std::optional<std::size_t> replicates;
    std::string out = ".";
    std::size_t threads = 1;
    int verbosity = 0;
};

/// Throws ValidationError on malformed values and on parameters rejected by validate().
Settings resolve_settings(const KeyValues& kv, const char* env_seed);

/// Canonical key=value rendering of the effective settings, in known_keys() order.
/// Output files omit `out` so artifacts do not depend on where they were written.
std::string render_settings(const Settings& s, bool with_output_dir = true);

/// Runs the tool on argv-style arguments (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sinrldp::cli
