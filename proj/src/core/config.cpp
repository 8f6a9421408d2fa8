#include "core/config.hpp"

#include <fstream>

namespace fel::cfg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  RunConfig c;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    c.values_[key] = trim(t.substr(eq + 1));
  }
  return c;
}

void RunConfig::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

bool RunConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_or(const std::string& key,
                              const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

std::string RunConfig::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw Error(ErrorCode::ConfigError, "missing config key '" + key + "'");
  return *v;
}

std::int64_t RunConfig::get_int(const std::string& key,
                                std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stoll(*v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' is not an integer");
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' is not a number");
  }
}

}  // namespace fel::cfg
