#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gpfuse {

// Flat key=value text file. '#' starts a comment; blank lines are ignored.
// Duplicate keys are preserved in order (used for repeated entries such as
// object trajectories).
struct KvFile {
    std::vector<std::pair<std::string, std::string>> entries;

    static KvFile load(const std::filesystem::path& path);
    static KvFile parse_text(const std::string& text);

    // Last occurrence wins for scalar lookups.
    std::optional<std::string> get(const std::string& key) const;
    std::vector<std::string> all(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
};

}  // namespace gpfuse
