#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace facekit {

// Flat key=value config with optional [section] grouping (keys become
// "section.key"). '#' starts a comment; values may be double-quoted.
class Config {
  public:
    static Config parse(const std::string& text);
    static Config parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace facekit
