#pragma once

#include <map>
#include <string>
#include <vector>

#include "ogt/errors.hpp"

namespace ogt {

// Minimal TOML subset for experiment configs: [sections], `key = value`
// with string/integer/float/bool scalars and flat arrays, `#` comments.
struct TomlTable {
    std::map<std::string, std::string> values;          // "section.key" -> raw scalar
    std::map<std::string, std::vector<std::string>> arrays;

    bool has(const std::string& key) const { return values.count(key) || arrays.count(key); }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::vector<std::string> get_array(const std::string& key) const;
};

TomlTable parse_toml(const std::string& text);
TomlTable load_toml(const std::string& path);

} // namespace ogt
