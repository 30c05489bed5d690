#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <ncr/config.hpp>

namespace ncr::cli {

std::string sha256_hex(const std::string& data);

// Effective configuration as YAML, in a fixed key order.
std::string canonical_config(const RunConfig& c);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string num(double v);

struct Stamp {
    std::string version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string header() const;  // "# ..." line for CSV files
};

class Csv {
public:
    Csv(const Stamp& stamp, std::vector<std::string> columns);
    Csv& row(const std::vector<std::string>& cells);
    std::string str() const { return body_; }

private:
    std::size_t width_;
    std::string body_;
};

}  // namespace ncr::cli
