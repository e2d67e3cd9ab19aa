#include "gpfuse/kvfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpfuse {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KvFile KvFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

KvFile KvFile::parse_text(const std::string& text) {
    KvFile kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed key=value line: " + line);
        kv.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

std::optional<std::string> KvFile::get(const std::string& key) const {
    std::optional<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out = v;
    return out;
}

std::vector<std::string> KvFile::all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v);
    return out;
}

std::string KvFile::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

long long KvFile::get_int(const std::string& key, long long fallback) const {
    auto v = get(key);
    return v ? std::stoll(*v) : fallback;
}

double KvFile::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? std::stod(*v) : fallback;
}

bool KvFile::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
    throw std::runtime_error("malformed boolean value: " + *v);
}

}  // namespace gpfuse
