#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace zenopm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat, human-diffable key/value text format. Sections ([name]) prefix the
/// keys that follow: "[plant]" + "seed = 3" is addressed as "plant.seed".
/// '#' starts a comment; blank lines are ignored.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;

    /// Keys with the given prefix, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    const std::vector<std::string>& ordered_keys() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    std::string origin_;
};

}  // namespace zenopm
