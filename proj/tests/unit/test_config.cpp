#include <gtest/gtest.h>

#include <ncr/config.hpp>
#include <ncr/error.hpp>

using namespace ncr;

TEST(Config, Defaults) {
    RunConfig c = parse_run_config("group: e2\n");
    EXPECT_EQ(c.group, "e2");
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.tolerance_scale, 1.0);
    EXPECT_EQ(c.solver.method, "auto");
    EXPECT_EQ(c.solver.n, 1024);
    EXPECT_FALSE(c.solver.box_given);
    EXPECT_TRUE(c.sweep.grid.empty());
}

TEST(Config, FullDocument) {
    RunConfig c = parse_run_config(R"yaml(group: exp-solv-4
seed: 42
tolerance_scale: 2
output: out
reduction: stationary
parameters: {delta1: 1.5, E: -0.25}
solver:
  method: ode
  box: [0.5, 4]
  samples: 99
  branch: -1
  initial: "(exp (* I qp))"
verify:
  points: 50
sweep:
  grid:
    j1: [1, 2, 3]
  threads: 3
)yaml");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.tolerance_scale, 2.0);
    EXPECT_EQ(c.parameters.at("delta1"), 1.5);
    EXPECT_EQ(c.parameters.at("E"), -0.25);
    EXPECT_EQ(c.solver.method, "ode");
    EXPECT_TRUE(c.solver.box_given);
    EXPECT_EQ(c.solver.lo, 0.5);
    EXPECT_EQ(c.solver.hi, 4.0);
    EXPECT_EQ(c.solver.samples, 99);
    EXPECT_EQ(c.solver.branch, -1);
    EXPECT_EQ(c.verify_points, 50);
    EXPECT_EQ(c.sweep.grid.at("j1").size(), 3u);
    EXPECT_EQ(c.sweep.threads, 3);
}

TEST(Config, ErrorsCarryPositions) {
    auto line_of = [](const std::string& text) {
        try {
            parse_run_config(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("group: e2\nsolver:\n  method: ode\n  stepz: 3\n"), 4);
    EXPECT_EQ(line_of("seed: minus one\n"), 1);
    EXPECT_EQ(line_of("group: e2\nsolver:\n  method: euler\n"), 3);
    EXPECT_EQ(line_of("group: e2\nsolver:\n  n: 1000\n"), 3);
    EXPECT_EQ(line_of("tolerance_scale: -1\n"), 1);
    EXPECT_EQ(line_of("group: e2\nsolver:\n  initial: \"(+ qp\"\n"), 3);
    EXPECT_GT(line_of("group: [e2\n"), 0);
}

TEST(Config, MissingFile) {
    try {
        load_run_config("/nonexistent/run.yaml");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}
