#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chaosim/ensemble.hpp"
#include "chaosim/scenarios.hpp"

namespace chaosim {

struct OutputSpec {
  std::string dir = "chaosim-out";
  bool csv = true;
  bool ndjson = true;
  bool emit_frames = true;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::string name = "custom";
  ScenarioSpec scenario = FreeSpace{};
  EnsembleSpec ensemble;
  OutputSpec output;
  // Runs whose diverged fraction exceeds this are reported as failed.
  double max_diverged_fraction = 1e-3;
  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Validation };

  ConfigError(Kind kind, std::string message, std::string field = {},
              std::size_t line = 0, std::size_t column = 0);

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  Kind kind_;
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

// Parses a JSON config document. Missing keys take their defaults, unknown
// keys are rejected, and the result is fully validated.
RunConfig parse_config(std::string_view text);

// Canonical JSON (sorted keys, every default spelled out).
std::string serialize_config(const RunConfig& config);

// FNV-1a 64 over the compact canonical form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Throws ConfigError(Validation) if the config breaks an invariant.
void validate(const RunConfig& config);

std::vector<std::string> preset_names();
std::optional<RunConfig> find_preset(std::string_view name);

}  // namespace chaosim
