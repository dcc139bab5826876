#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace wnl {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// 16 hex digits of fnv1a over the canonical (key-sorted, compact) dump of params.
std::string params_hash(const nlohmann::json& params);

struct StoredRecord {
    std::string command;
    std::string hash;
    nlohmann::json params;
    nlohmann::json payload;
    std::string timestamp;  // UTC, ISO 8601

    nlohmann::json to_json() const;
    static StoredRecord from_json(const nlohmann::json& j);
};

/// Append-only JSON-lines file, one record per line.
class ResultStore {
public:
    explicit ResultStore(std::string path) : path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    /// Appends one line with a single write; returns the stored record.
    StoredRecord append(const std::string& command, const nlohmann::json& params, const nlohmann::json& payload) const;
    /// All records in file order; a missing file is an empty store.
    std::vector<StoredRecord> load() const;
    /// Records whose command equals `command` (all when empty), optionally with a given params hash.
    std::vector<StoredRecord> find(const std::string& command, const std::string& hash = "") const;

private:
    std::string path_;
};

}  // namespace wnl
