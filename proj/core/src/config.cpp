#include "ncr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ncr/error.hpp"
#include "ncr/expr_parse.hpp"

namespace ncr {

namespace {

[[noreturn]] void fail(const std::string& source, const YAML::Node& n, const std::string& msg) {
    const YAML::Mark m = n.Mark();
    throw ParseError(source + ": " + msg, m.line >= 0 ? m.line + 1 : 0, m.column >= 0 ? m.column + 1 : 0);
}

void keys(const std::string& source, const YAML::Node& n, const std::string& block,
          std::initializer_list<const char*> allowed) {
    if (!n.IsMap()) fail(source, n, block + " must be a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
        std::string k = kv.first.as<std::string>();
        if (!ok.count(k)) fail(source, kv.first, "unknown key '" + k + "' in " + block);
    }
}

template <class T>
T get(const std::string& source, const YAML::Node& n, const std::string& block, const char* key) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(source, n, block + ": bad value for '" + key + "'");
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError(source + ": " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    RunConfig c;
    c.text = text;
    if (!root || root.IsNull()) return c;
    const std::string& s = source;
    keys(s, root, "config",
         {"group", "seed", "tolerance_scale", "output", "metric", "orbit", "reduction", "parameters", "solver",
          "verify", "sweep"});
    if (root["group"]) c.group = get<std::string>(s, root["group"], "config", "group");
    if (root["seed"]) c.seed = get<std::uint64_t>(s, root["seed"], "config", "seed");
    if (root["tolerance_scale"]) {
        c.tolerance_scale = get<double>(s, root["tolerance_scale"], "config", "tolerance_scale");
        if (!(c.tolerance_scale > 0)) fail(s, root["tolerance_scale"], "tolerance_scale must be positive");
    }
    if (root["output"]) c.output = get<std::string>(s, root["output"], "config", "output");
    if (root["metric"]) c.metric = get<std::string>(s, root["metric"], "config", "metric");
    if (root["orbit"]) c.orbit = get<std::string>(s, root["orbit"], "config", "orbit");
    if (root["reduction"]) c.reduction = get<std::string>(s, root["reduction"], "config", "reduction");
    if (const YAML::Node p = root["parameters"]) {
        if (!p.IsMap()) fail(s, p, "parameters must be a mapping");
        for (const auto& kv : p) c.parameters[kv.first.as<std::string>()] = get<double>(s, kv.second, "parameters", "value");
    }
    if (const YAML::Node b = root["solver"]) {
        keys(s, b, "solver", {"method", "box", "n", "dt", "steps", "cadence", "samples", "initial", "branch"});
        SolverConfig& v = c.solver;
        if (b["method"]) {
            v.method = get<std::string>(s, b["method"], "solver", "method");
            if (v.method != "auto" && v.method != "split-step" && v.method != "ode")
                fail(s, b["method"], "solver: method must be auto, split-step or ode");
        }
        if (b["box"]) {
            const YAML::Node r = b["box"];
            if (!r.IsSequence() || r.size() != 2) fail(s, r, "solver: box must be [lo, hi]");
            v.lo = get<double>(s, r[0], "solver", "box");
            v.hi = get<double>(s, r[1], "solver", "box");
            if (!(v.hi > v.lo)) fail(s, r, "solver: empty box");
            v.box_given = true;
        }
        if (b["n"]) {
            v.n = get<int>(s, b["n"], "solver", "n");
            if (v.n < 64 || (v.n & (v.n - 1)) != 0) fail(s, b["n"], "solver: n must be a power of two >= 64");
        }
        if (b["dt"]) v.dt = get<double>(s, b["dt"], "solver", "dt");
        if (b["steps"]) v.steps = get<int>(s, b["steps"], "solver", "steps");
        if (b["cadence"]) v.cadence = get<int>(s, b["cadence"], "solver", "cadence");
        if (b["samples"]) v.samples = get<int>(s, b["samples"], "solver", "samples");
        if (b["initial"]) {
            v.initial = get<std::string>(s, b["initial"], "solver", "initial");
            try {
                parse_expr(v.initial);
            } catch (const ParseError& e) {
                fail(s, b["initial"], "solver: initial: " + e.message());
            }
        }
        if (b["branch"]) v.branch = get<int>(s, b["branch"], "solver", "branch");
        if (!(v.dt > 0) || v.steps < 0 || v.cadence < 0 || v.samples < 2) fail(s, b, "solver: invalid step settings");
        if (v.branch != 1 && v.branch != -1) fail(s, b["branch"], "solver: branch must be 1 or -1");
    }
    if (const YAML::Node v = root["verify"]) {
        keys(s, v, "verify", {"points"});
        if (v["points"]) c.verify_points = get<int>(s, v["points"], "verify", "points");
        if (c.verify_points < 1) fail(s, v, "verify: points must be positive");
    }
    if (const YAML::Node w = root["sweep"]) {
        keys(s, w, "sweep", {"grid", "threads"});
        if (w["threads"]) c.sweep.threads = get<int>(s, w["threads"], "sweep", "threads");
        if (const YAML::Node g = w["grid"]) {
            if (!g.IsMap()) fail(s, g, "sweep: grid must map parameters to value lists");
            for (const auto& kv : g) {
                if (!kv.second.IsSequence() || kv.second.size() == 0)
                    fail(s, kv.second, "sweep: grid values must be a non-empty list");
                auto& vals = c.sweep.grid[kv.first.as<std::string>()];
                for (const auto& x : kv.second) vals.push_back(get<double>(s, x, "sweep", "grid"));
            }
        }
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

}  // namespace ncr
