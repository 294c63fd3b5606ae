#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace chiralgate::experiment {

// Bad or missing configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Computation failed after configuration was accepted (non-convergence, NaN).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    bool timestamp = true;
    // Dotted-path config overrides, e.g. {"chain.n_emitters", "8"}.
    std::vector<std::pair<std::string, std::string>> overrides;
};

struct RunReport {
    int exit_code = 0;       // 0 ok, 2 config error, 3 numeric error
    std::string error;       // diagnostic when exit_code != 0
    std::vector<std::string> files_written;
    nlohmann::json summary;  // headline scalars, also written to <prefix>_summary.json
};

nlohmann::json load_config(const std::string& path);
void apply_override(nlohmann::json& config, const std::string& key,
                    const std::string& value);

// Runs one experiment described by `config`. Config errors and numeric
// failures are reported through the exit code; partially written outputs are
// removed on numeric failure.
RunReport run_experiment(nlohmann::json config, const RunOptions& options);
RunReport run_config_file(const std::string& config_path, const RunOptions& options);

}  // namespace chiralgate::experiment
