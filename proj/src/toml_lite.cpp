#include "ogt/toml_lite.hpp"

#include <fstream>
#include <sstream>

namespace ogt {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

// Strips comments outside of quotes.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    char quote = 0;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_str) {
            if (c == quote) in_str = false;
        } else if (c == '"' || c == '\'') {
            in_str = true;
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

} // namespace

std::string TomlTable::get_string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::BadInput, "missing config key " + key);
    return it->second;
}

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

long TomlTable::get_int(const std::string& key, long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        return std::stol(it->second);
    } catch (const std::exception&) {
        fail(ErrorCode::BadInput, "config key " + key + " is not an integer");
    }
}

std::vector<std::string> TomlTable::get_array(const std::string& key) const {
    auto it = arrays.find(key);
    if (it == arrays.end()) fail(ErrorCode::BadInput, "missing config array " + key);
    return it->second;
}

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(ErrorCode::BadInput, "bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::BadInput, "expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string full = section.empty() ? key : section + "." + key;
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                fail(ErrorCode::BadInput, "unterminated array at line " + std::to_string(lineno));
            std::vector<std::string> items;
            std::string body = value.substr(1, value.size() - 2);
            std::string cur;
            bool in_str = false;
            char quote = 0;
            for (char c : body) {
                if (in_str) {
                    if (c == quote) in_str = false;
                    else cur.push_back(c);
                } else if (c == '"' || c == '\'') {
                    in_str = true;
                    quote = c;
                } else if (c == ',') {
                    if (!trim(cur).empty()) items.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur.push_back(c);
                }
            }
            if (!trim(cur).empty()) items.push_back(trim(cur));
            table.arrays[full] = items;
        } else {
            table.values[full] = unquote(value);
        }
    }
    return table;
}

TomlTable load_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

} // namespace ogt
