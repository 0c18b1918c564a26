#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hyperdyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitInternal = 4;

struct ParamSpec {
    std::string key;
    std::string fallback;  // empty means required
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
    bool needs_seed = false;
};

const std::vector<CommandSpec>& commands();

/// One batch run. Parameters are raw strings; run() checks names and types.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::optional<std::uint64_t> seed;
    std::uint64_t max_words = 200'000'000;
    std::uint64_t max_orbits = 10'000'000;
    double time_limit_s = 3600.0;
};

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::json envelope;
    std::string csv;  // empty when the command has no CSV payload
};

RunOutcome run(const RunConfig& cfg);

/// Applies `key=value` lines (blank lines and # comments allowed) on top of
/// cfg. Global keys are seed, max-words, max-orbits, time-limit-s and
/// command; anything else must be a parameter of cfg.command.
void apply_config_text(RunConfig& cfg, const std::string& text);

// Full command-line entry point used by the hyperdyn executable.
int main_entry(int argc, char** argv);

}  // namespace hyperdyn::cli
