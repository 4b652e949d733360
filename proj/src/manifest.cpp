#include "laborcast/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "laborcast/errors.hpp"

namespace laborcast {

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_json(const nlohmann::json& value) { return digest_hex(fnv1a(value.dump())); }

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return digest_hex(fnv1a(buf.str()));
}

RunManifest make_manifest(const std::string& command, const nlohmann::json& config,
                          const std::string& input_path) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.config_digest = digest_json(config);
    m.input_path = input_path;
    m.input_digest = digest_file(input_path);
    return m;
}

nlohmann::json manifest_to_json(const RunManifest& manifest) {
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& t : manifest.timings)
        timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    return nlohmann::json{{"version", manifest.version},
                          {"command", manifest.command},
                          {"config", manifest.config},
                          {"config_digest", manifest.config_digest},
                          {"input", {{"path", manifest.input_path}, {"digest", manifest.input_digest}}},
                          {"seeds", manifest.seeds},
                          {"timings", std::move(timings)},
                          {"outputs", manifest.outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.version = j.at("version").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.config_digest = j.at("config_digest").get<std::string>();
        m.input_path = j.at("input").at("path").get<std::string>();
        m.input_digest = j.at("input").at("digest").get<std::string>();
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        for (const auto& t : j.at("timings"))
            m.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
        m.outputs = j.at("outputs").get<std::vector<std::string>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << manifest_to_json(manifest).dump(2) << '\n';
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
    RunManifest m = manifest_from_json(j);
    const std::string expect = digest_json(m.config);
    if (m.config_digest != expect)
        throw FormatError("manifest config digest " + m.config_digest +
                          " does not match recomputed " + expect);
    return m;
}

void verify_input_digest(const RunManifest& manifest) {
    const std::string now = digest_file(manifest.input_path);
    if (now != manifest.input_digest)
        throw FormatError("input '" + manifest.input_path + "' digest " + now +
                          " does not match recorded " + manifest.input_digest);
}

}  // namespace laborcast
