#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <ncr/catalog.hpp>
#include <ncr/error.hpp>

using namespace ncr;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const VerifyLine& line(const std::vector<VerifyLine>& lines, const std::string& id) {
    for (const auto& l : lines)
        if (l.id == id) return l;
    throw std::runtime_error("no registry line " + id);
}

int parse_error_line(const std::string& text) {
    try {
        parse_definition(text, "test.yaml");
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

const std::string kMinimal = R"yaml(name: toy
algebra:
  dimension: 2
  brackets: []
chart:
  coordinates:
    - {name: x, generator: 1}
    - {name: y, generator: 2}
  composition: ["(+ a.x b.x)", "(+ a.y b.y)"]
  inverse: ["(* -1 x)", "(* -1 y)"]
)yaml";

}  // namespace

TEST(Catalog, Names) {
    auto names = catalog_names();
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()), (std::set<std::string>{"e2", "exp-solv-4"}));
    try {
        load("unknown");
        FAIL() << "unknown group loaded";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownName);
        EXPECT_NE(std::string(e.what()).find("e2"), std::string::npos);
    }
}

TEST(Catalog, E2Entry) {
    GroupDefinition d = load("e2");
    ASSERT_EQ(d.chart.dim(), 3);
    EXPECT_EQ(d.chart.coords[2].name, "alpha");
    EXPECT_TRUE(d.chart.coords[2].periodic);
    EXPECT_FALSE(d.chart.coords[0].periodic);
    ASSERT_EQ(d.casimirs.size(), 1u);
    EXPECT_EQ(d.casimirs[0], sym("f1") * sym("f1") + sym("f2") * sym("f2"));
    EXPECT_FALSE(d.registry.empty());
    for (const auto& item : d.registry) EXPECT_FALSE(item.where.empty()) << item.id;
}

TEST(Catalog, SolvableEntry) {
    GroupDefinition d = load("exp-solv-4");
    EXPECT_EQ(d.chart.dim(), 4);
    ASSERT_EQ(d.casimirs.size(), 2u);
    EXPECT_EQ(d.casimirs[0], sym("f1"));
    EXPECT_EQ(d.casimirs[1], sym("f1") * sym("f4") - sym("f3") * sym("f2"));
    EXPECT_EQ(d.default_reduction, "stationary");
}

TEST(Catalog, E2Registry) {
    Workspace ws(load("e2"));
    auto lines = verify_entry(ws);
    for (const char* id : {"xi1", "xi2", "xi3", "eta1", "eta2", "eta3", "haar", "scalar-curvature", "laplacian", "casimir",
                           "ell1", "ell2", "ell3", "kernel-phase", "kernel-point-map", "reduced-c2", "reduced-nonlinear"})
        EXPECT_EQ(line(lines, id).status, MatchStatus::Confirmed) << id << ": " << line(lines, id).detail;
    for (const char* id : {"line-element", "reduced-c0", "soliton", "soliton-lift"})
        EXPECT_EQ(line(lines, id).status, MatchStatus::Discrepancy) << id;
    for (const auto& l : lines) EXPECT_NE(l.status, MatchStatus::Error) << l.id << ": " << l.detail;
}

TEST(Catalog, SolvableRegistry) {
    Workspace ws(load("exp-solv-4"));
    auto lines = verify_entry(ws);
    const VerifyLine& xi2 = line(lines, "xi2");
    EXPECT_EQ(xi2.status, MatchStatus::Discrepancy);
    EXPECT_FALSE(xi2.derived.empty());
    for (const char* id : {"xi4", "eta1", "reduced-c0", "amplitude-phase-solution"})
        EXPECT_EQ(line(lines, id).status, MatchStatus::Discrepancy) << id;
    for (const char* id : {"line-element", "ricci44", "laplacian", "casimir1", "casimir2", "linear-solution",
                           "norm-identity"})
        EXPECT_EQ(line(lines, id).status, MatchStatus::Confirmed) << id << ": " << line(lines, id).detail;
}

TEST(Catalog, VerificationIsDeterministic) {
    Workspace a(load("e2"), 9), b(load("e2"), 9);
    auto la = verify_entry(a), lb = verify_entry(b);
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        EXPECT_EQ(la[i].error, lb[i].error);
        EXPECT_EQ(la[i].detail, lb[i].detail);
    }
}

TEST(Catalog, EmptyRegistryGivesEmptyReport) {
    Workspace ws(parse_definition(kMinimal));
    EXPECT_TRUE(verify_entry(ws).empty());
}

TEST(Catalog, SuitesPass) {
    for (const char* name : {"e2", "exp-solv-4"}) {
        Workspace ws(load(name));
        for (const auto& r : run_suites(ws)) EXPECT_TRUE(r.ok) << name << " " << r.suite << "/" << r.name << " " << r.detail;
    }
    Workspace toy(load_definition_file(std::string(NCR_TEST_DATA) + "/abelian2.yaml"));
    auto results = run_suites(toy);
    EXPECT_FALSE(results.empty());
    for (const auto& r : results) EXPECT_TRUE(r.ok) << r.suite << "/" << r.name;
}

TEST(Catalog, CorruptedKernelFailsTransport) {
    Workspace ws(load_definition_file(NCR_CORRUPTED_E2));
    bool transport_failed = false;
    for (const auto& r : run_suites(ws))
        if (r.suite == "transport" && !r.ok) {
            transport_failed = true;
            EXPECT_GT(r.value, 0.1);
            EXPECT_NE(r.detail.find("generator"), std::string::npos);
        }
    EXPECT_TRUE(transport_failed);
}

TEST(Definition, RoundTripOfBundledText) {
    GroupDefinition d = parse_definition(catalog_source("e2"), "e2.yaml");
    EXPECT_EQ(d.name, "e2");
    EXPECT_EQ(d.orbits.size(), 1u);
    EXPECT_EQ(d.reductions.size(), 2u);
    EXPECT_EQ(d.default_reduction, "free");
}

TEST(Definition, ErrorsCarryLines) {
    EXPECT_EQ(parse_error_line(read_file(std::string(NCR_TEST_DATA) + "/malformed.yaml")), 11);

    std::string jacobi = kMinimal;
    jacobi.replace(jacobi.find("dimension: 2\n  brackets: []"), 27,
                   "dimension: 3\n  brackets:\n    - [1, 2, [0, 0, 1]]\n    - [2, 3, [0, 1, 0]]");
    EXPECT_GT(parse_error_line(jacobi), 0);

    std::string unknown_key = kMinimal + "colour: blue\n";
    EXPECT_EQ(parse_error_line(unknown_key), 11);

    std::string bad_generator = kMinimal;
    bad_generator.replace(bad_generator.find("generator: 2"), 12, "generator: 7");
    EXPECT_EQ(parse_error_line(bad_generator), 8);

    std::string stray_symbol = kMinimal;
    stray_symbol.replace(stray_symbol.find("(+ a.y b.y)"), 11, "(+ a.y b.z)");
    EXPECT_EQ(parse_error_line(stray_symbol), 9);

    EXPECT_GT(parse_error_line("name: [unclosed\n"), 0);
}

TEST(Definition, UnknownPresets) {
    GroupDefinition d = load("e2");
    EXPECT_THROW(d.metric("round"), Error);
    EXPECT_THROW(d.reduction("quartic"), Error);
    EXPECT_THROW(d.orbit("singular"), Error);
    EXPECT_THROW(dkernel(parse_definition(kMinimal), "regular"), Error);
}

TEST(Definition, MissingFile) {
    try {
        load_definition_file("/nonexistent/group.yaml");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}
