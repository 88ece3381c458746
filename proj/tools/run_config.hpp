#pragma once

#include <string>
#include <vector>

#include "geograsp/geom.hpp"

namespace geograsp::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Plain-text key=value configuration. Keys must be declared before they can
// be set from a file or an override; anything else is rejected.
class RunConfig {
 public:
  void declare(const std::string& key, const std::string& default_value);

  // "key=value" lines; blank lines and lines starting with '#' are ignored.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  // "--key=value"
  void apply_override(const std::string& arg);

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;

  // Every key in declaration order, "key=value" per line.
  std::string resolved() const;

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  Entry* find(const std::string& key);
  const Entry& get(const std::string& key) const;

  std::vector<Entry> entries_;
};

}  // namespace geograsp::cli
