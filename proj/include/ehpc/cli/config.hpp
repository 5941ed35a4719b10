#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehpc/sim.hpp"

namespace ehpc::cli {

/// Configuration problem, tagged with the dotted key it concerns (empty when
/// the problem is with the document as a whole).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Every accepted dotted key, in section order.
std::vector<std::string> known_keys();

/// JSON document (an empty or blank document means "all defaults") plus
/// `key=value` overrides. Override keys are dotted paths such as
/// `battery.e_max_joule`; a bare name such as `e_max` is accepted when it
/// identifies exactly one key. Values are parsed as JSON, falling back to a
/// plain string.
ScenarioConfig parse_config_text(const std::string& text,
                                 std::span<const std::string> overrides = {});

/// Reads `path` if given and parses it as above. Throws ConfigError on a
/// missing file, malformed document, unknown key or invalid value.
ScenarioConfig parse_config(const std::optional<std::filesystem::path>& path,
                            std::span<const std::string> overrides = {});

}  // namespace ehpc::cli
