#include "mscale/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace mscale {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void Config::declare(const std::string& key, const std::string& default_value, const std::string& help) {
  entries_[key] = Entry{default_value, help, "default"};
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "' (from " + origin + ")");
  it->second.value = value;
  it->second.origin = origin;
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool csv = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (lineno == 1 && t.rfind("# mscale ", 0) == 0) csv = true;
    if (t.rfind("#@", 0) == 0) {
      t = trim(t.substr(2));
    } else {
      if (const auto hash = t.find('#'); hash != std::string::npos) t = trim(t.substr(0, hash));
      if (t.empty() || csv) continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), origin + ":" + std::to_string(lineno));
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

const std::string& Config::raw(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second.value;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long Config::get_int(const std::string& key) const {
  const std::string& v = raw(key);
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& v = raw(key);
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "' expects an unsigned 64-bit integer, got '" + v + "'");
  return x;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  try {
    return parse_list(raw(key));
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a comma-separated list of numbers, got '" + raw(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> Config::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, e] : entries_) out.emplace_back(k, e.value);
  return out;
}

std::string Config::help_text() const {
  std::ostringstream os;
  for (const auto& [k, e] : entries_) {
    os << "  " << k << " = " << (e.value.empty() ? "\"\"" : e.value);
    if (!e.help.empty()) os << "    # " << e.help;
    os << '\n';
  }
  return os.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad list item '" + item + "'");
  }
  return out;
}

}  // namespace mscale
