#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "knetsim/common.hpp"

namespace knetsim::config {

enum class KeyType : std::uint8_t { U64, F64, Bool, Str, Enum };

struct KeyInfo {
  std::string key;
  KeyType type = KeyType::Str;
  std::string default_value;
  double min = 0.0;  // numeric keys
  double max = 0.0;
  std::vector<std::string> choices;  // enum keys
  std::string doc;
};

// The full key registry: one documented key per tunable default.
const std::vector<KeyInfo>& schema();
const KeyInfo* find_key(const std::string& key);

// Flat dotted-key configuration. Values are held in canonical string form
// and validated against the schema on every assignment, so unknown keys and
// out-of-range values are rejected at parse time rather than mid-run.
class RunConfig {
public:
  static RunConfig defaults();

  // Parses line-oriented `key = value` text ('#' starts a comment). Throws
  // Error("ParseError"), Error("UnknownKey") or Error("InvalidValue"), each
  // message naming the offending line.
  static RunConfig parse(const std::string& text);

  void set(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double f64(const std::string& key) const;
  bool flag(const std::string& key) const;

  // Cross-field validation (scenario ranges, threshold ordering, ...).
  void validate() const;

  // Deterministic echo: every key, sorted, one per line; re-parses to an
  // equal config.
  std::string emit() const;

  bool operator==(const RunConfig&) const = default;

private:
  std::map<std::string, std::string> values_;
};

}  // namespace knetsim::config
