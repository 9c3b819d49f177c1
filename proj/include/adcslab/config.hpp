#pragma once

// JSON scenario, catalog and environment files.
//
// A scenario file has the sections orbit, environment, mass, geometry, gains,
// limits, mode, sim and montecarlo, all optional. Unknown keys are rejected.
// Errors name the offending key path (e.g. "gains.kp") or the line and column
// of a syntax error.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "adcslab/sim.hpp"

namespace adcslab {

/// Directory holding the bundled catalog, environment and scenario files.
/// ADCSLAB_DATA_DIR in the environment takes precedence over the build-time
/// location.
std::filesystem::path data_dir();

/// Built-in scenario for a mode (SAFE falls back to DETUMBLE settings).
Scenario builtin_scenario(ModeKind mode);

MassCatalog parse_catalog(std::string_view json_text, const std::string& source = "catalog");
MassCatalog load_catalog(const std::filesystem::path& path);

/// Orbit, physical constants and atmosphere table; unspecified keys keep the
/// values of `base`.
EnvironmentConfig parse_environment(std::string_view json_text, EnvironmentConfig base = {},
                                    const std::string& source = "environment");
EnvironmentConfig load_environment(const std::filesystem::path& path, EnvironmentConfig base = {});

/// Mode named by "mode.initial", if any.
std::optional<ModeKind> scenario_mode(std::string_view json_text,
                                      const std::string& source = "config");

/// Builds a scenario: the built-in setup for `mode` (or "mode.initial", or
/// DETUMBLE), overlaid with the file contents. `fallback_seed` replaces the
/// built-in seed when the file has no "sim.seed". Relative file references
/// are resolved against `base_dir`, then against data_dir().
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir,
                        std::optional<ModeKind> mode = std::nullopt,
                        const std::string& source = "config",
                        std::optional<std::uint64_t> fallback_seed = std::nullopt);
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<ModeKind> mode = std::nullopt,
                       std::optional<std::uint64_t> fallback_seed = std::nullopt);

/// Reads a whole file; throws ConfigError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace adcslab
