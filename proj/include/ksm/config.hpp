#pragma once

/// @file config.hpp
/// @brief JSON run configurations.
///
/// Every key is validated; unknown keys are errors that name the full key
/// path (e.g. "initial.u0.widht"). See README.md for the schema.

#include "ksm/run_config.hpp"

#include <filesystem>
#include <string>

namespace ksm {

/// Parses and validates a configuration. Relative snapshot paths in
/// initial.*.file resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a configuration (all keys, defaults filled in).
/// parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const RunConfig& config);

}  // namespace ksm
