#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <ncr/catalog.hpp>
#include <ncr/config.hpp>

#include "artifacts.hpp"

namespace ncr::cli {

enum ExitCode { kPass = 0, kFail = 1, kConfigError = 2 };

// Failure of one configuration block, reported with exit code 2.
class BlockError : public std::runtime_error {
public:
    BlockError(const std::string& block, const std::string& what) : std::runtime_error(block + ": " + what) {}
};

struct Context {
    RunConfig config;
    GroupDefinition group;
    Binding params;  // every group parameter, 1 unless configured
    Stamp stamp;
    std::filesystem::path out;
    std::ostream* log;

    std::string metric() const;
    std::string orbit() const;
    std::string reduction() const;
};

Context make_context(RunConfig config, std::ostream& log);

int cmd_describe(Context& ctx);
int cmd_check(Context& ctx);
int cmd_reduce(Context& ctx);
int cmd_solve(Context& ctx);
int cmd_verify(Context& ctx);
int cmd_sweep(Context& ctx);

}  // namespace ncr::cli
