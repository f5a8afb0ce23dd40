#include "junction/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace junction {

namespace {

std::string trim(const std::string& s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return {b, e};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
    if (section.empty())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": entry before any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": duplicate key '" + key + "' in [" + section +
                               "]");
    sec[key] = value;
    cfg.entry_lines_[section + "." + key] = line_no;
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str(), path);
}

const std::string* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  return &k->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& what) const {
  auto it = entry_lines_.find(section + "." + key);
  const std::string where =
      it != entry_lines_.end()
          ? origin_ + ":" + std::to_string(it->second)
          : origin_;
  throw std::runtime_error(where + ": [" + section + "] " + key + ": " + what);
}

std::string ConfigFile::require_string(const std::string& section,
                                       const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) {
    throw std::runtime_error(origin_ + ": missing required key '" + key +
                             "' in [" + section + "]");
  }
  return *v;
}

double ConfigFile::require_double(const std::string& section,
                                  const std::string& key) const {
  const std::string v = require_string(section, key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(section, key, "not a number: '" + v + "'");
  }
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  return find(section, key) ? require_double(section, key) : fallback;
}

long long ConfigFile::get_int(const std::string& section, const std::string& key,
                              long long fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long x = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(section, key, "not an integer: '" + *v + "'");
  }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::string low = *v;
  std::transform(low.begin(), low.end(), low.begin(), ::tolower);
  if (low == "true" || low == "yes" || low == "1") return true;
  if (low == "false" || low == "no" || low == "0") return false;
  fail(section, key, "not a boolean: '" + *v + "'");
}

std::vector<double> ConfigFile::get_doubles(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(*v)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(section, key, "not a number in list: '" + item + "'");
    }
  }
  return out;
}

std::vector<int> ConfigFile::get_ints(const std::string& section,
                                      const std::string& key,
                                      const std::vector<int>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const std::string& item : split_list(*v)) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(section, key, "not an integer in list: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> ConfigFile::get_strings(
    const std::string& section, const std::string& key,
    const std::vector<std::string>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  return split_list(*v);
}

}  // namespace junction
