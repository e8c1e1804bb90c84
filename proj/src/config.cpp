#include "sasa/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sasa {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = line;
        std::size_t hash = body.find('#');
        if (hash != std::string::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw SchemaError(path + ": line " + std::to_string(line_no) +
                              ": expected `key = value`");
        }
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (!valid_key(key)) {
            throw SchemaError(path + ": line " + std::to_string(line_no) +
                              ": bad key `" + key + "`");
        }
        if (value.empty()) {
            throw SchemaError(path + ": line " + std::to_string(line_no) +
                              ": empty value for `" + key + "`");
        }
        if (cfg.kv_.count(key)) {
            throw SchemaError(path + ": line " + std::to_string(line_no) +
                              ": duplicate key `" + key + "`");
        }
        cfg.kv_[key] = value;
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string RunConfig::str_or(const std::string& key,
                              const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

long RunConfig::int_or(const std::string& key, long fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw SchemaError("config key `" + key + "`: not an integer: " + v);
    }
    return out;
}

double RunConfig::real_or(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    double out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw SchemaError("config key `" + key + "`: not a number: " + v);
    }
    return out;
}

std::string RunConfig::require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw SchemaError("missing required key `" + key + "`");
    return it->second;
}

void RunConfig::enforce_schema(const std::string& command,
                               const std::vector<KeyDoc>& schema) const {
    auto render = [&]() {
        std::ostringstream os;
        os << "settings for `" << command << "`:\n";
        for (const auto& d : schema) {
            os << "  " << d.key << (d.required ? " (required)" : "") << "  "
               << d.doc << "\n";
        }
        return os.str();
    };
    for (const auto& [key, value] : kv_) {
        (void)value;
        bool known = false;
        for (const auto& d : schema) {
            if (d.key == key) { known = true; break; }
        }
        if (!known) {
            throw SchemaError("unknown key `" + key + "` for `" + command +
                              "`\n" + render());
        }
    }
    for (const auto& d : schema) {
        if (d.required && !kv_.count(d.key)) {
            throw SchemaError("missing required key `" + d.key + "` for `" +
                              command + "`\n" + render());
        }
    }
}

} // namespace sasa
