#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace laborcast {

inline constexpr const char* kLaborcastVersion = "1.0.0";

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a(const std::string& bytes);
std::string digest_hex(std::uint64_t h);

/// Digest of a canonically serialized JSON value (sorted keys, dump()).
std::string digest_json(const nlohmann::json& value);
/// Digest of a file's raw bytes. Throws ArgumentError if unreadable.
std::string digest_file(const std::string& path);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

/// Tamper-evident record of one CLI run: what was read, which seeds were
/// used, what was written, and the exact configuration.
struct RunManifest {
    std::string version = kLaborcastVersion;
    std::string command;
    nlohmann::json config;       // fully resolved configuration
    std::string config_digest;   // digest_json(config)
    std::string input_path;
    std::string input_digest;    // digest_file(input_path)
    std::vector<std::uint64_t> seeds;
    std::vector<StageTiming> timings;
    std::vector<std::string> outputs;  // every file the run wrote, manifest excluded
};

RunManifest make_manifest(const std::string& command, const nlohmann::json& config,
                          const std::string& input_path);

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

void save_manifest(const RunManifest& manifest, const std::string& path);
/// Loads and re-derives the config digest; a mismatch means the record was
/// edited and raises FormatError.
RunManifest load_manifest(const std::string& path);

/// Recomputes the digest of the recorded input file (resolved against the
/// manifest's stored path) and raises FormatError if it changed.
void verify_input_digest(const RunManifest& manifest);

}  // namespace laborcast
