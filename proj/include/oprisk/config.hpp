#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace oprisk {

/*!
 * Flat key = value configuration with [section] headers. Keys are stored as
 * "section.key" ("key" alone before any header); '#' and ';' start comments.
 */
class ConfigFile {
  public:
    ConfigFile() = default;

    static ConfigFile parse(std::istream& in);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const;

  private:
    std::map<std::string, std::string> values_;
};

} // namespace oprisk
