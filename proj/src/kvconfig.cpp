#include "zenopm/kvconfig.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace zenopm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

KvConfig KvConfig::parse_string(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        if (cfg.values_.count(key) != 0) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        }
        cfg.values_[key] = trim(line.substr(eq + 1));
        cfg.order_.push_back(key);
    }
    return cfg;
}

bool KvConfig::has(const std::string& key) const {
    return values_.count(key) != 0;
}

std::string KvConfig::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing key " + key);
    return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0') {
        throw ConfigError(origin_ + ": key " + key + " is not a number: " + raw);
    }
    return v;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KvConfig::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    char* end = nullptr;
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0') {
        throw ConfigError(origin_ + ": key " + key + " is not an integer: " + raw);
    }
    return v;
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = get_string(key);
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw ConfigError(origin_ + ": key " + key + " is not a boolean: " + raw);
}

std::vector<double> KvConfig::get_double_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') {
            throw ConfigError(origin_ + ": key " + key + " has a non-numeric element: " + item);
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> KvConfig::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const std::string& k : order_) {
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    }
    return out;
}

}  // namespace zenopm
