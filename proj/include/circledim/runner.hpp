#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "circledim/fixtures.hpp"

namespace circledim::runner {

// Exit codes: 0 success, 2 validation error, 3 budget exhausted,
// 4 unreliable diagnostics. Errors are also recorded in results.json.
struct RunOutcome {
    int exit_code = 0;
    nlohmann::json manifest;
    nlohmann::json results;
    std::map<std::string, std::string> csv_files; // name -> content
};

// Validates the config, resolves the system and runs the experiment.
// Artifacts are returned; `run_to_dir` also writes them to disk.
RunOutcome run_config(const nlohmann::json& config);

RunOutcome run_to_dir(const nlohmann::json& config, const std::filesystem::path& outdir);

nlohmann::json default_parameters(const std::string& experiment);

} // namespace circledim::runner
