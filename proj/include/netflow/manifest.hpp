#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace netflow {

struct FileStamp {
    std::string path;  // relative to the manifest's directory
    std::string hash;  // "fnv1a64:<16 hex digits>"
};

// Summary of one tool invocation, written next to its outputs so a run can be
// audited and reproduced.
struct RunManifest {
    std::string tool = "netlab";
    std::string version = "0.1.0";
    std::string command;
    std::map<std::string, std::string> config;
    double wall_seconds = 0.0;
    std::vector<std::string> notes;
    std::vector<FileStamp> outputs;
};

uint64_t fnv1a64(std::string_view data);

// Hashes a file's bytes; throws on read failure.
std::string hash_file(const std::string& path);

void write_manifest(const RunManifest& m, const std::string& path);

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

// Writes rows of pre-formatted cells with a header line.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace netflow
