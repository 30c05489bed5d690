#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ncr {

struct SolverConfig {
    std::string method = "auto";  // auto, split-step, ode
    bool box_given = false;
    double lo = -20.0;
    double hi = 20.0;
    int n = 1024;
    double dt = 1e-3;
    int steps = 1000;
    int cadence = 0;
    int samples = 401;     // ode output points
    std::string initial;   // expression in the reduced variable; empty uses the closed-form family
    int branch = 1;
};

struct SweepConfig {
    std::map<std::string, std::vector<double>> grid;  // parameter -> values, expanded as a product
    int threads = 0;                                  // 0: hardware concurrency
};

struct RunConfig {
    std::string group = "e2";  // catalog name or definition file path
    std::uint64_t seed = 1;
    double tolerance_scale = 1.0;
    std::string output = "ncr-out";
    std::string metric;
    std::string orbit;
    std::string reduction;
    std::map<std::string, double> parameters;
    SolverConfig solver;
    int verify_points = 1000;
    SweepConfig sweep;
    std::string text;  // canonical source text, hashed into every artifact
};

// Throws ParseError with line and column; unknown keys are rejected.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

}  // namespace ncr
