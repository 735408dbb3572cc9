#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tmsim::cli {

enum class Experiment { modes, rates, decohere, bell, chsh_scan, delays, fig2, bpm_run };

std::string_view experiment_name(Experiment e);

/// Malformed config text or an invalid value; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Severity { error, warning };

struct Diagnostic {
  std::string key;
  std::string message;
  Severity severity = Severity::error;
};

enum class ValueKind { number, integer, boolean, text, number_list };

struct KeySpec {
  std::string_view name;
  ValueKind kind;
  std::string_view default_value;  // empty: required or derived
  std::string_view help;
};

/// Every accepted key. Physical quantities carry their unit in the name.
const std::vector<KeySpec>& known_keys();

struct RunConfig {
  Experiment experiment = Experiment::modes;
  std::map<std::string, std::string> parameters;  // as written, minus `experiment` and `seed`
  std::uint64_t seed = 1;
  std::filesystem::path output_path = ".";
  unsigned threads = 1;
  bool quiet = false;

  bool has(const std::string& key) const { return parameters.count(key) != 0; }
  /// Value or the key's default. Throws ConfigError on a malformed value.
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;
};

/// Parses flat `key = value` text; `#` starts a comment. Rejects unknown and
/// duplicate keys and lines without `=`. `experiment` is required.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Semantic checks. Errors block a run; warnings (for example a violated
/// perturbative regime) do not.
std::vector<Diagnostic> validate(const RunConfig& config);

}  // namespace tmsim::cli
