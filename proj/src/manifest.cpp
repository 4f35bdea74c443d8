#include <netflow/manifest.hpp>
#include <netflow/network.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace netflow {

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NetworkError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return out;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["tool"] = m.tool;
    j["version"] = m.version;
    j["command"] = m.command;
    j["config"] = m.config;
    j["wall_seconds"] = m.wall_seconds;
    j["notes"] = m.notes;
    j["outputs"] = nlohmann::json::array();
    for (const auto& f : m.outputs)
        j["outputs"].push_back({{"path", f.path}, {"hash", f.hash}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NetworkError("cannot open " + path + " for writing");
    out << j.dump(1) << "\n";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NetworkError("cannot open " + path + " for writing");
    for (size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace netflow
