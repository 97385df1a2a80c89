#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbridge {

// Configuration problem: missing file, bad syntax, unknown key, unparsable
// value.  The command line maps this to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value store.  Later assignments win, so command-line overrides
// are applied by re-setting keys after the file is read.
struct Config {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
};

// Lines of "key = value"; '#' starts a comment; blank lines ignored.
Config parse_config_file(const std::string& path);

// "key=value" fragment from the command line.
void apply_override(Config& config, const std::string& fragment);

// Sorted "key=value" lines; the canonical form that gets hashed.
std::string canonical_string(const Config& config);

// FNV-1a over the canonical form; embedded in CSV headers so outputs can be
// traced back to the exact configuration.
std::uint64_t config_hash(const Config& config);

}  // namespace sbridge
