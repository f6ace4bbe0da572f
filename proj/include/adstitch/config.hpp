#pragma once

#include <string>

#include "adstitch/sim.hpp"
#include "adstitch/types.hpp"

namespace adstitch {

// Flat key=value config file; '#' lines are comments, unknown keys are
// errors. Missing file keeps the built-in defaults.
SystemConfig load_config(const std::string& path);

// Environment overrides: ADSTITCH_<UPPERCASED_KEY> wins over the file value.
void apply_env_overrides(SystemConfig& config);

SystemConfig load_config_with_env(const std::string& path);

// World parameter file (JSON object, single line or pretty); unknown keys
// are errors so typos never silently fall back to defaults.
WorldSpec load_world_spec(const std::string& path);

}  // namespace adstitch
