#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Flat key/value run-configuration format:
//   # comment
//   key = value
//   [section name]        <- per-cell overrides in pipeline configs
//   key = value           <- belongs to the section above
// Keys are trimmed, case-sensitive; later duplicates win.

namespace omniproj {

struct ConfigFile {
    std::map<std::string, std::string> globals;
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> sections;

    bool has(const std::string& key) const { return globals.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = globals.find(key);
        return it == globals.end() ? fallback : it->second;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ConfigFile parse_config(const std::string& text) {
    ConfigFile cfg;
    std::map<std::string, std::string>* target = &cfg.globals;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            cfg.sections.emplace_back(detail::trim(t.substr(1, t.size() - 2)),
                                      std::map<std::string, std::string>{});
            target = &cfg.sections.back().second;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        (*target)[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    return cfg;
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const std::string t = detail::trim(cur);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace omniproj
