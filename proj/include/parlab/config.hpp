#pragma once

#include <string>

#include <json.hpp>

namespace parlab {

// Executes a declarative run: build the problem, solve, run each probe, write
// manifest + field CSV + per-probe reports under output_dir. Returns the
// process exit status: 0 when every probe passes, 1 when a probe ran but its
// pass flag is false, 2 on config errors (no artifacts), 3 on compute errors.
int run_config(const nlohmann::json& config);
int run_config_file(const std::string& path);

// Throws ConfigError on schema violations (unknown keys rejected).
void validate_config(const nlohmann::json& config);

} // namespace parlab
