#ifndef MPBANDIT_CONFIG_H_
#define MPBANDIT_CONFIG_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mpbandit {

// A value in a config file: boolean, number, string or array.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, double, std::string, Array> data;
  int line = 0;

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  bool as_bool() const { return std::get<bool>(data); }
  double as_number() const { return std::get<double>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
};

// Sections of `key = value` lines. Accepts the TOML subset used by the
// experiment files: [section] headers, # comments, basic strings, integers,
// floats (including 1e4 and 1_000 forms), booleans and (nested, possibly
// multi-line) arrays.
class ConfigDocument {
 public:
  using Section = std::map<std::string, ConfigValue, std::less<>>;

  // Throws ConfigError on syntax errors.
  static ConfigDocument Parse(std::string_view text);
  // Throws IoError when the file cannot be read.
  static ConfigDocument ParseFile(const std::string& path);

  const ConfigValue* Find(std::string_view section, std::string_view key) const;
  void Set(const std::string& section, const std::string& key, ConfigValue value);
  // Parses `text` as a single value (used for command-line overrides).
  static ConfigValue ParseValue(std::string_view text);

  const std::map<std::string, Section, std::less<>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, Section, std::less<>> sections_;
};

}  // namespace mpbandit

#endif  // MPBANDIT_CONFIG_H_
