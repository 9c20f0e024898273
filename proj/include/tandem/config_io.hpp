#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tandem/scenario.hpp"

namespace tandem {

/// Bad configuration input. line() is 0 when the problem is not tied to a
/// line of the file (for instance a range error on a default value).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what);

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Parses `key = value` lines over default_paper_config(). `#` starts a
/// comment; blank lines are ignored. Unknown and duplicate keys, unparsable
/// values and out-of-range values throw ConfigError.
ExperimentConfig parse_config_text(std::string_view text);

/// Reads and parses a file; a missing file is a ConfigError too.
ExperimentConfig parse_config(const std::string& path);

/// Every key, one per line, in a form parse_config_text reads back exactly.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace tandem
