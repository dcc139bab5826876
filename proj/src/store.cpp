#include "wnl/store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "wnl/error.hpp"

namespace wnl {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string params_hash(const json& params) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(params.dump())));
    return buf;
}

json StoredRecord::to_json() const {
    return {{"command", command}, {"params_hash", hash}, {"params", params}, {"payload", payload},
            {"timestamp", timestamp}};
}

StoredRecord StoredRecord::from_json(const json& j) {
    StoredRecord r;
    r.command = j.at("command").get<std::string>();
    r.hash = j.at("params_hash").get<std::string>();
    r.params = j.at("params");
    r.payload = j.at("payload");
    r.timestamp = j.value("timestamp", std::string());
    return r;
}

StoredRecord ResultStore::append(const std::string& command, const json& params, const json& payload) const {
    StoredRecord r;
    r.command = command;
    r.hash = params_hash(params);
    r.params = params;
    r.payload = payload;
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    r.timestamp = buf;

    std::string line = r.to_json().dump() + "\n";
    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (!f) throw UsageError("cannot open result store '" + path_ + "' for appending");
    std::size_t wrote = std::fwrite(line.data(), 1, line.size(), f);
    bool ok = wrote == line.size() && std::fflush(f) == 0;
    ok = std::fclose(f) == 0 && ok;
    if (!ok) throw Error("failed to append to result store '" + path_ + "'");
    return r;
}

std::vector<StoredRecord> ResultStore::load() const {
    std::vector<StoredRecord> out;
    std::ifstream in(path_);
    if (!in) return out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(StoredRecord::from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw UsageError("result store '" + path_ + "' line " + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

std::vector<StoredRecord> ResultStore::find(const std::string& command, const std::string& hash) const {
    std::vector<StoredRecord> out;
    for (auto& r : load())
        if ((command.empty() || r.command == command) && (hash.empty() || r.hash == hash)) out.push_back(std::move(r));
    return out;
}

}  // namespace wnl
