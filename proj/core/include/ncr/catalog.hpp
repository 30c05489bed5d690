#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ncr/definition.hpp"
#include "ncr/solver.hpp"

namespace ncr {

std::vector<std::string> catalog_names();
// Bundled group definition text; throws UnknownName.
const std::string& catalog_source(const std::string& name);
GroupDefinition load(const std::string& name);
// A catalog name, or otherwise a path to a definition file.
GroupDefinition resolve_group(const std::string& ref);

// Kernel data of a bundled orbit; throws UnsupportedGroup when the orbit has none.
DKernelSpec dkernel(const GroupDefinition& def, const std::string& orbit);

// Derived objects of one definition, computed on first use. Not thread-safe;
// use one workspace per thread.
class Workspace {
public:
    explicit Workspace(GroupDefinition def, std::uint64_t seed = 1);

    const GroupDefinition& definition() const { return def_; }
    std::mt19937_64& rng() { return rng_; }
    SamplingBox box() const { return def_.sampling_box(); }

    const FrameField& left_frame();
    const FrameField& right_frame();
    const CoframeField& right_coframe();
    const DifferentialOperator& laplacian(const std::string& metric);
    const Geometry& geometry(const std::string& metric);
    const OrbitData& orbit(const std::string& name);
    const LambdaRep& rep(const std::string& orbit);
    AnsatzSpec ansatz(const std::string& orbit);
    const Expr& kappa2(const std::string& reduction);
    const ReducedEquation& reduced(const std::string& reduction);
    FullEquation full(const std::string& reduction);
    // Solution families in closed form for the reduced equation.
    SolutionFamily family(const std::string& reduction, int branch = 1);

private:
    GroupDefinition def_;
    std::mt19937_64 rng_;
    std::unique_ptr<FrameField> xi_, eta_;
    std::unique_ptr<CoframeField> sigma_;
    std::map<std::string, DifferentialOperator> laplacians_;
    std::map<std::string, Geometry> geometries_;
    std::map<std::string, OrbitData> orbits_;
    std::map<std::string, LambdaRep> reps_;
    std::map<std::string, Expr> kappas_;
    std::map<std::string, ReducedEquation> reduced_;
};

enum class MatchStatus { Confirmed, Discrepancy, Error };
const char* to_string(MatchStatus s);

struct VerifyLine {
    std::string id;
    std::string kind;
    std::string where;
    MatchStatus status = MatchStatus::Confirmed;
    double error = 0.0;  // max relative difference, or residual magnitude for solutions
    std::string derived;
    std::string note;
    std::string detail;
};

// One line per registry item, comparing each printed form with its derived
// counterpart. Discrepancies are report content, not failures.
std::vector<VerifyLine> verify_entry(Workspace& ws, double tolerance_scale = 1.0);

struct SuiteResult {
    std::string suite;
    std::string name;
    bool ok = true;
    double value = 0.0;
    std::string detail;
};

// Invariant suites: algebra, group, geometry, orbit, transport, reduction, separation.
std::vector<SuiteResult> run_suites(Workspace& ws, double tolerance_scale = 1.0);

}  // namespace ncr
