#include "dsaudit/report.hpp"

#include <fstream>

namespace dsaudit {

using json = nlohmann::json;

void write_csv_report(const std::string& path, const std::string& config_hash,
                      const std::string& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write report: " + path);
    out << "# config=" << config_hash << '\n';
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

void write_json_report(const std::string& path, const std::string& config_hash,
                       json body) {
    body["config_hash"] = config_hash;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write report: " + path);
    out << body.dump(2) << '\n';
}

void RunManifest::write(const std::string& path) const {
    json j{{"subcommand", subcommand},
           {"config_hash", config_hash},
           {"inputs", input_hashes},
           {"config", config},
           {"wall_seconds", wall_seconds},
           {"stats", stats}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace dsaudit
