#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "core/common.hpp"

namespace fel::cfg {

// Flat key=value configuration. Files may use [section] headers, which
// prefix the keys that follow ("section.key"); '#' starts a comment.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig load(const std::string& path);
  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;  // ConfigError if unset

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fel::cfg
