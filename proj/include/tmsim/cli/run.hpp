#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmsim/cli/config.hpp"

namespace tmsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr int kManifestSchemaVersion = 1;

/// Files produced by one experiment, keyed by file name, plus the manifest
/// fields derived along the way.
struct RunProducts {
  std::map<std::string, std::string> files;
  nlohmann::json derived = nlohmann::json::object();
};

/// Runs the experiment in memory. Throws ConfigError, std::invalid_argument
/// or std::domain_error for bad inputs and NumericalError for failed
/// numerics.
RunProducts execute(const RunConfig& config);

/// Manifest for a finished run (see docs/manifest.schema.json).
nlohmann::json build_manifest(const RunConfig& config, const RunProducts& products);

/// Structural check of a manifest; returns human-readable problems.
std::vector<std::string> validate_manifest(const nlohmann::json& manifest);

/// Validates, executes and writes every output plus manifest.json into
/// config.output_path. Nothing is written unless the whole run succeeds.
/// Returns the process exit code.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace tmsim::cli
