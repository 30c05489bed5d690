#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncr/geometry.hpp"
#include "ncr/orbit.hpp"
#include "ncr/reduction.hpp"

namespace ncr {

struct OrbitPreset {
    std::vector<Expr> lambda;
    std::vector<int> polarization;  // 0-based generators
    GroupChart chart;               // coordinates adapted to the polarization, h last
    std::optional<DKernelSpec> kernel;
};

struct ReductionPreset {
    std::string orbit;
    std::string metric;
    EquationKind kind = EquationKind::TimeDependent;
    Expr coupling;
    Expr weight{1};
    Expr potential{0};  // in the reduced variable
};

// An eigenrelation op psi = value psi, with op either -i hbar times a left-invariant
// field or a Weyl-quantized Casimir in -i hbar xi.
struct Symmetry {
    enum class Kind { Frame, Casimir } kind = Kind::Frame;
    int index = 0;  // 0-based
    Expr value;
};

// A product-form field phase(g) phi(S(g)) other than the orbit ansatz, with the
// symmetries it diagonalizes and the weight of the equation it is tested against.
struct AnsatzPreset {
    DKernelSpec kernel;
    std::vector<Symmetry> symmetries;
    Expr weight{1};
    std::map<std::string, Range> sample;  // where the field is single-valued
};

// A printed formula to be compared with its derived counterpart.
struct RegistryItem {
    std::string id;
    std::string kind;
    std::string where;
    std::string note;  // known issue with the printed form, if any
    std::string metric;
    std::string orbit;
    std::string reduction;
    std::string coefficient;
    int index = 0;  // 1-based
    std::vector<int> indices;
    Expr expected;
    std::vector<Expr> components;
    std::vector<std::pair<std::vector<std::string>, Expr>> terms;
    std::map<std::string, Expr> relabel;  // applied to the printed form only
    std::map<std::string, Expr> assume;   // applied to both sides
    std::map<std::string, Range> sample;  // overrides of the group sampling box
    int branch = 1;
    int line = 0;
};

struct GroupDefinition {
    std::string name;
    std::string description;
    LieAlgebra algebra;
    std::vector<Expr> casimirs;
    GroupChart chart;
    std::map<std::string, Range> parameters;
    std::map<std::string, MetricSpec> metrics;
    std::map<std::string, OrbitPreset> orbits;
    std::map<std::string, ReductionPreset> reductions;
    std::string default_reduction;  // first one listed
    std::map<std::string, AnsatzPreset> ansatze;
    std::vector<RegistryItem> registry;

    // Chart coordinates, parameters, spectator and time with their sampling ranges.
    SamplingBox sampling_box() const;
    const MetricSpec& metric(const std::string& name) const;
    const OrbitPreset& orbit(const std::string& name) const;
    const ReductionPreset& reduction(const std::string& name) const;
    const AnsatzPreset& ansatz(const std::string& name) const;
};

// Throws ParseError with the line and column of the offending node.
GroupDefinition parse_definition(const std::string& text, const std::string& source = "<input>");
GroupDefinition load_definition_file(const std::string& path);

}  // namespace ncr
