#include "run_config.hpp"

#include <charconv>
#include <sstream>

#include "geograsp/io.hpp"

namespace geograsp::cli {

void RunConfig::declare(const std::string& key, const std::string& default_value) {
  if (find(key)) throw ConfigError("duplicate key '" + key + "'");
  entries_.push_back({key, default_value});
}

RunConfig::Entry* RunConfig::find(const std::string& key) {
  for (auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

const RunConfig::Entry& RunConfig::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return e;
  throw ConfigError("undeclared key '" + key + "'");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  Entry* e = find(key);
  if (!e) throw ConfigError("unknown key '" + key + "'");
  e->value = value;
}

void RunConfig::load_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t start = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw FormatError(path + ": expected key=value", start);
    const std::string key = line.substr(0, eq);
    if (!find(key)) throw FormatError(path + ": unknown key '" + key + "'", start);
    set(key, line.substr(eq + 1));
  }
}

void RunConfig::apply_override(const std::string& arg) {
  const auto eq = arg.find('=');
  if (arg.rfind("--", 0) != 0 || eq == std::string::npos || eq <= 2)
    throw ConfigError("unrecognized argument '" + arg + "' (overrides take the form --key=value)");
  set(arg.substr(2, eq - 2), arg.substr(eq + 1));
}

const std::string& RunConfig::str(const std::string& key) const { return get(key).value; }

double RunConfig::num(const std::string& key) const {
  const std::string& v = str(key);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("'" + key + "' must be a number, got '" + v + "'");
  return out;
}

long long RunConfig::integer(const std::string& key) const {
  const std::string& v = str(key);
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("'" + key + "' must be an integer, got '" + v + "'");
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& v = str(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("'" + key + "' must be true or false, got '" + v + "'");
}

std::vector<int> RunConfig::ints(const std::string& key) const {
  std::vector<int> out;
  const std::string& v = str(key);
  std::size_t pos = 0;
  while (pos <= v.size() && !v.empty()) {
    const std::size_t end = std::min(v.find(',', pos), v.size());
    int x = 0;
    const auto [p, ec] = std::from_chars(v.data() + pos, v.data() + end, x);
    if (ec != std::errc() || p != v.data() + end)
      throw ConfigError("'" + key + "' must be a comma-separated integer list, got '" + v + "'");
    out.push_back(x);
    pos = end + 1;
  }
  return out;
}

std::string RunConfig::resolved() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + "=" + e.value + "\n";
  return out;
}

}  // namespace geograsp::cli
