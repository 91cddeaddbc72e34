#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mscale {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat namespaced key-value configuration ("graph.radius = 0.1").
//
// File syntax: one `key = value` per line, `#` starts a comment. Lines of the
// form `#@ key = value` are also read, which lets a CSV written by this tool
// serve as the config of a rerun (its data rows are skipped).
//
// Precedence: declared defaults < config file < command-line flags.
class Config {
 public:
  // Declares a key and its default; only declared keys are accepted.
  void declare(const std::string& key, const std::string& default_value, const std::string& help = {});
  bool declared(const std::string& key) const { return entries_.count(key) > 0; }

  // Throws ConfigError on unknown keys or malformed lines.
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text, const std::string& origin);
  void set(const std::string& key, const std::string& value, const std::string& origin = "flag");

  const std::string& raw(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  // Resolved key/value pairs in key order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
  std::string help_text() const;

 private:
  struct Entry {
    std::string value;
    std::string help;
    std::string origin = "default";
  };
  std::map<std::string, Entry> entries_;
};

std::vector<double> parse_list(const std::string& text);

}  // namespace mscale
