#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

// Flat key-value configuration with [section] headers, '#' comments, and
// comma-separated lists. Grammar:
//
//   file     := { line }
//   line     := blank | comment | section | entry
//   comment  := '#' ...
//   section  := '[' name ']'
//   entry    := key '=' value          (inside a section)
//   value    := scalar | scalar {',' scalar}
//
// Keys are unique per section; parse errors carry line numbers.

namespace junction {

class ConfigFile {
 public:
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");
  static ConfigFile parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string require_string(const std::string& section,
                             const std::string& key) const;
  double require_double(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key,
                            const std::vector<int>& fallback) const;
  std::vector<std::string> get_strings(
      const std::string& section, const std::string& key,
      const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::map<std::string, int> entry_lines_;  // "section.key" -> line number

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const;
  const std::string* find(const std::string& section,
                          const std::string& key) const;
};

}  // namespace junction
