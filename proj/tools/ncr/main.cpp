#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include <ncr/error.hpp>
#include <ncr/version.hpp>

#include "commands.hpp"

using namespace ncr;
using namespace ncr::cli;

int main(int argc, char** argv) {
    CLI::App app{"Noncommutative reduction of the cubic NLSE on Lie groups", "ncr"};
    app.set_version_flag("--version", std::string(ncr::version));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> scale;
    app.add_option("--config", config_path, "Run configuration (YAML)");
    app.add_option("--seed", seed, "Random seed for sampled checks");
    app.add_option("--out", out, "Artifact directory");
    app.add_option("--tolerance-scale", scale, "Multiplier applied to every check tolerance")->check(CLI::PositiveNumber);

    struct Verb {
        const char* name;
        const char* help;
        int (*run)(Context&);
    };
    const Verb verbs[] = {
        {"describe", "Print the derived structure of a group", cmd_describe},
        {"check", "Run the invariant suites", cmd_check},
        {"reduce", "Derive the reduced equation", cmd_reduce},
        {"solve", "Integrate the reduced equation", cmd_solve},
        {"verify", "Compare registry items and closed-form solutions with their derivations", cmd_verify},
        {"sweep", "Evaluate the reduction over a parameter grid", cmd_sweep},
    };
    std::string group;
    for (const auto& v : verbs) {
        auto* sub = app.add_subcommand(v.name, v.help);
        sub->add_option("group", group, "Catalog name or definition file");
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    const Verb* chosen = nullptr;
    for (const auto& v : verbs)
        if (app.got_subcommand(v.name)) chosen = &v;

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (!group.empty()) config.group = group;
        if (seed) config.seed = *seed;
        if (out) config.output = *out;
        if (scale) config.tolerance_scale = *scale;
        Context ctx = make_context(std::move(config), std::cout);
        return chosen->run(ctx);
    } catch (const ParseError& e) {
        std::cerr << "ncr: " << e.what() << "\n";
        return kConfigError;
    } catch (const BlockError& e) {
        std::cerr << "ncr: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "ncr: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "ncr: " << e.what() << "\n";
        return kConfigError;
    }
}
