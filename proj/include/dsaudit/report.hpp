#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsaudit/common.hpp"

namespace dsaudit {

/// Report emission helpers. Every report carries the hash of the config that
/// produced it: CSV files in a leading "# config=<hash>" comment, JSON files
/// in a "config_hash" field.
void write_csv_report(const std::string& path, const std::string& config_hash,
                      const std::string& header,
                      const std::vector<std::vector<std::string>>& rows);

void write_json_report(const std::string& path, const std::string& config_hash,
                       nlohmann::json body);

struct RunManifest {
    std::string subcommand;
    std::string config_hash;
    std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
    std::map<std::string, std::string> config;
    double wall_seconds = 0.0;
    nlohmann::json stats;  // subcommand-specific counters

    void write(const std::string& path) const;
};

}  // namespace dsaudit
