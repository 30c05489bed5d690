#include "artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace ncr::cli {

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string canonical_config(const RunConfig& c) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "group" << YAML::Value << c.group;
    e << YAML::Key << "seed" << YAML::Value << c.seed;
    e << YAML::Key << "tolerance_scale" << YAML::Value << num(c.tolerance_scale);
    e << YAML::Key << "metric" << YAML::Value << c.metric;
    e << YAML::Key << "orbit" << YAML::Value << c.orbit;
    e << YAML::Key << "reduction" << YAML::Value << c.reduction;
    e << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : c.parameters) e << YAML::Key << k << YAML::Value << num(v);
    e << YAML::EndMap;
    const SolverConfig& s = c.solver;
    e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "method" << YAML::Value << s.method;
    e << YAML::Key << "box" << YAML::Value << YAML::Flow << YAML::BeginSeq << num(s.lo) << num(s.hi) << YAML::EndSeq;
    e << YAML::Key << "box_given" << YAML::Value << s.box_given;
    e << YAML::Key << "n" << YAML::Value << s.n;
    e << YAML::Key << "dt" << YAML::Value << num(s.dt);
    e << YAML::Key << "steps" << YAML::Value << s.steps;
    e << YAML::Key << "cadence" << YAML::Value << s.cadence;
    e << YAML::Key << "samples" << YAML::Value << s.samples;
    e << YAML::Key << "initial" << YAML::Value << s.initial;
    e << YAML::Key << "branch" << YAML::Value << s.branch;
    e << YAML::EndMap;
    e << YAML::Key << "verify" << YAML::Value << YAML::BeginMap << YAML::Key << "points" << YAML::Value
      << c.verify_points << YAML::EndMap;
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, vs] : c.sweep.grid) {
        e << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : vs) e << num(v);
        e << YAML::EndSeq;
    }
    e << YAML::EndMap << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string Stamp::header() const {
    return "# ncr " + version + " seed=" + std::to_string(seed) + " config_sha256=" + config_hash + "\n";
}

Csv::Csv(const Stamp& stamp, std::vector<std::string> columns) : width_(columns.size()), body_(stamp.header()) {
    row(columns);
}

Csv& Csv::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string& c = cells[i];
        bool quote = c.find_first_of(",\"\n") != std::string::npos;
        if (i) body_ += ',';
        if (!quote) {
            body_ += c;
            continue;
        }
        body_ += '"';
        for (char ch : c) {
            if (ch == '"') body_ += '"';
            body_ += ch;
        }
        body_ += '"';
    }
    body_ += '\n';
    return *this;
}

}  // namespace ncr::cli
