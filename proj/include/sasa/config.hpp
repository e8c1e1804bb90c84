#pragma once

#include "sasa/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace sasa {

struct KeyDoc {
    std::string key;
    std::string doc;
    bool required = false;
};

/// Flat key=value settings. Files use one `key = value` per line with `#`
/// comments; command-line flags of the same name override file entries.
class RunConfig {
public:
    RunConfig() = default;

    /// Parses a config file. Malformed lines or duplicate keys throw
    /// SchemaError.
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string str_or(const std::string& key, const std::string& fallback) const;
    long int_or(const std::string& key, long fallback) const;
    double real_or(const std::string& key, double fallback) const;

    /// Missing required key or any key outside the schema throws SchemaError
    /// whose message lists the full expected schema.
    void enforce_schema(const std::string& command,
                        const std::vector<KeyDoc>& schema) const;
    std::string require(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

} // namespace sasa
