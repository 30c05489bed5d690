#include "ncr/definition.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ncr/error.hpp"
#include "ncr/expr_parse.hpp"

namespace ncr {

SamplingBox GroupDefinition::sampling_box() const {
    SamplingBox box = chart.sampling_box();
    box.set("q", -2.0, 2.0);
    box.set(time_symbol, 0.0, 1.0);
    for (const auto& [name, r] : parameters) box.set(name, r.lo, r.hi);
    return box;
}

const MetricSpec& GroupDefinition::metric(const std::string& n) const {
    auto it = metrics.find(n);
    if (it == metrics.end()) throw Error(ErrorKind::UnknownName, "group " + name + " has no metric named " + n);
    return it->second;
}

const OrbitPreset& GroupDefinition::orbit(const std::string& n) const {
    auto it = orbits.find(n);
    if (it == orbits.end()) throw Error(ErrorKind::UnknownName, "group " + name + " has no orbit named " + n);
    return it->second;
}

const ReductionPreset& GroupDefinition::reduction(const std::string& n) const {
    auto it = reductions.find(n);
    if (it == reductions.end()) throw Error(ErrorKind::UnknownName, "group " + name + " has no reduction named " + n);
    return it->second;
}

const AnsatzPreset& GroupDefinition::ansatz(const std::string& n) const {
    auto it = ansatze.find(n);
    if (it == ansatze.end()) throw Error(ErrorKind::UnknownName, "group " + name + " has no ansatz named " + n);
    return it->second;
}

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        const YAML::Mark m = n.Mark();
        int line = m.line >= 0 ? m.line + 1 : 0;
        int col = m.column >= 0 ? m.column + 1 : 0;
        throw ParseError(source_ + ": " + msg, line, col);
    }

    void keys(const YAML::Node& n, const std::string& what, std::initializer_list<const char*> allowed) const {
        if (!n.IsMap()) fail(n, what + " must be a mapping");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : n) {
            std::string k = kv.first.as<std::string>();
            if (!ok.count(k)) fail(kv.first, "unknown key '" + k + "' in " + what);
        }
    }

    YAML::Node need(const YAML::Node& n, const char* key, const std::string& what) const {
        YAML::Node v = n[key];
        if (!v) fail(n, what + " is missing '" + key + "'");
        return v;
    }

    std::string str(const YAML::Node& n) const {
        if (!n.IsScalar()) fail(n, "expected a scalar");
        return n.Scalar();
    }

    int integer(const YAML::Node& n) const {
        try {
            return n.as<int>();
        } catch (const YAML::Exception&) {
            fail(n, "expected an integer");
        }
    }

    double number(const YAML::Node& n) const {
        try {
            return n.as<double>();
        } catch (const YAML::Exception&) {
            fail(n, "expected a number");
        }
    }

    bool boolean(const YAML::Node& n) const {
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            fail(n, "expected true or false");
        }
    }

    Expr expr(const YAML::Node& n) const {
        if (!n.IsScalar()) fail(n, "expected an expression");
        const YAML::Mark m = n.Mark();
        int col = m.column + 1;
        if (n.Tag() == "!") ++col;  // quoted scalar
        try {
            return parse_expr(n.Scalar(), m.line + 1, col);
        } catch (const ParseError& e) {
            throw ParseError(source_ + ": " + e.message(), e.line(), e.column());
        }
    }

    std::vector<Expr> exprs(const YAML::Node& n) const {
        if (!n.IsSequence()) fail(n, "expected a list of expressions");
        std::vector<Expr> out;
        for (const auto& e : n) out.push_back(expr(e));
        return out;
    }

    Range range(const YAML::Node& n) const {
        if (!n.IsSequence() || n.size() != 2) fail(n, "expected [lo, hi]");
        Range r{number(n[0]), number(n[1])};
        if (!(r.hi > r.lo)) fail(n, "empty range");
        return r;
    }

    std::map<std::string, Expr> substitution(const YAML::Node& n) const {
        if (!n.IsMap()) fail(n, "expected a mapping from symbols to expressions");
        std::map<std::string, Expr> out;
        for (const auto& kv : n) out[kv.first.as<std::string>()] = expr(kv.second);
        return out;
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

GroupChart parse_chart(const Reader& r, const YAML::Node& n, int dim, bool need_inverse,
                       const std::map<std::string, Range>& params) {
    r.keys(n, "chart", {"coordinates", "composition", "inverse"});
    GroupChart c;
    YAML::Node coords = r.need(n, "coordinates", "chart");
    if (!coords.IsSequence()) r.fail(coords, "coordinates must be a list");
    std::set<int> gens;
    for (const auto& cn : coords) {
        r.keys(cn, "coordinate", {"name", "generator", "periodic", "range", "sample"});
        Coordinate co;
        co.name = r.str(r.need(cn, "name", "coordinate"));
        YAML::Node gn = r.need(cn, "generator", "coordinate");
        co.generator = r.integer(gn) - 1;
        if (co.generator < 0 || co.generator >= dim) r.fail(gn, "generator out of range");
        if (!gens.insert(co.generator).second) r.fail(gn, "generator used twice");
        if (cn["periodic"]) co.periodic = r.boolean(cn["periodic"]);
        if (co.periodic) {
            co.lo = 0.0;
            co.hi = 2.0 * M_PI;
        }
        if (cn["range"]) {
            Range rg = r.range(cn["range"]);
            co.lo = rg.lo;
            co.hi = rg.hi;
        }
        if (co.periodic || cn["range"]) {
            co.sample_lo = std::max(co.lo, -2.0);
            co.sample_hi = std::min(co.hi, co.periodic ? co.hi : 2.0);
        }
        if (cn["sample"]) {
            Range rg = r.range(cn["sample"]);
            co.sample_lo = rg.lo;
            co.sample_hi = rg.hi;
        }
        c.coords.push_back(co);
    }
    if (static_cast<int>(c.coords.size()) != dim)
        r.fail(coords, "chart has " + std::to_string(c.coords.size()) + " coordinates, algebra dimension is " +
                           std::to_string(dim));
    YAML::Node comp = r.need(n, "composition", "chart");
    c.composition = r.exprs(comp);
    if (static_cast<int>(c.composition.size()) != dim) r.fail(comp, "composition needs one entry per coordinate");
    std::set<std::string> allowed;
    for (const auto& [p, rg] : params) allowed.insert(p);
    for (const auto& co : c.coords) {
        allowed.insert(GroupChart::left_symbol(co.name));
        allowed.insert(GroupChart::right_symbol(co.name));
    }
    for (std::size_t i = 0; i < c.composition.size(); ++i)
        for (const auto& s : c.composition[i].free_symbols())
            if (!allowed.count(s)) r.fail(comp[i], "composition uses unknown symbol '" + s + "'");
    if (n["inverse"]) {
        c.inverse = r.exprs(n["inverse"]);
        if (static_cast<int>(c.inverse.size()) != dim) r.fail(n["inverse"], "inverse needs one entry per coordinate");
        std::set<std::string> names;
        for (const auto& [p, rg] : params) names.insert(p);
        for (const auto& co : c.coords) names.insert(co.name);
        for (std::size_t i = 0; i < c.inverse.size(); ++i)
            for (const auto& s : c.inverse[i].free_symbols())
                if (!names.count(s)) r.fail(n["inverse"][i], "inverse uses unknown symbol '" + s + "'");
    } else if (need_inverse) {
        r.fail(n, "chart is missing 'inverse'");
    }
    return c;
}

ExprMatrix parse_matrix(const Reader& r, const YAML::Node& n, int dim) {
    if (!n.IsSequence() || static_cast<int>(n.size()) != dim) r.fail(n, "expected a square matrix of the algebra size");
    ExprMatrix m;
    for (const auto& row : n) {
        if (!row.IsSequence() || static_cast<int>(row.size()) != dim) r.fail(row, "matrix row has the wrong length");
        m.push_back(r.exprs(row));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j)
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] !=
                m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                r.fail(n[i][j], "metric matrix is not symmetric");
    return m;
}

DKernelSpec parse_kernel(const Reader& r, const YAML::Node& k) {
    r.keys(k, "kernel", {"phase", "point_map", "measure", "spectator", "variable"});
    DKernelSpec ks;
    ks.phase = r.expr(r.need(k, "phase", "kernel"));
    ks.point_map = r.expr(r.need(k, "point_map", "kernel"));
    ks.measure = k["measure"] ? r.expr(k["measure"]) : Expr(1);
    if (k["spectator"]) ks.spectator = r.str(k["spectator"]);
    if (k["variable"]) ks.variable = r.str(k["variable"]);
    return ks;
}

EquationKind parse_kind(const Reader& r, const YAML::Node& n) {
    std::string k = r.str(n);
    if (k == "time-dependent") return EquationKind::TimeDependent;
    if (k == "stationary") return EquationKind::Stationary;
    r.fail(n, "kind must be time-dependent or stationary");
}

RegistryItem parse_item(const Reader& r, const YAML::Node& n) {
    r.keys(n, "registry item", {"id", "kind", "where", "note", "metric", "orbit", "reduction", "coefficient", "index",
                                "indices", "expected", "relabel", "assume", "sample", "branch"});
    RegistryItem it;
    it.line = n.Mark().line + 1;
    it.id = r.str(r.need(n, "id", "registry item"));
    it.kind = r.str(r.need(n, "kind", "registry item"));
    if (n["where"]) it.where = r.str(n["where"]);
    if (n["note"]) it.note = r.str(n["note"]);
    if (n["metric"]) it.metric = r.str(n["metric"]);
    if (n["orbit"]) it.orbit = r.str(n["orbit"]);
    if (n["reduction"]) it.reduction = r.str(n["reduction"]);
    if (n["coefficient"]) it.coefficient = r.str(n["coefficient"]);
    if (n["index"]) it.index = r.integer(n["index"]);
    if (n["indices"])
        for (const auto& v : n["indices"]) it.indices.push_back(r.integer(v));
    if (n["relabel"]) it.relabel = r.substitution(n["relabel"]);
    if (n["assume"]) it.assume = r.substitution(n["assume"]);
    if (n["sample"])
        for (const auto& kv : n["sample"]) it.sample[kv.first.as<std::string>()] = r.range(kv.second);
    if (n["branch"]) {
        it.branch = r.integer(n["branch"]);
        if (it.branch != 1 && it.branch != -1) r.fail(n["branch"], "branch must be 1 or -1");
    }
    YAML::Node e = r.need(n, "expected", "registry item");
    if (e.IsScalar()) {
        it.expected = r.expr(e);
    } else if (e.IsSequence()) {
        bool terms = e.size() > 0 && e[0].IsMap();
        for (const auto& x : e) {
            if (!terms) {
                it.components.push_back(r.expr(x));
                continue;
            }
            r.keys(x, "operator term", {"derivatives", "coefficient"});
            std::vector<std::string> ds;
            if (x["derivatives"])
                for (const auto& d : x["derivatives"]) ds.push_back(r.str(d));
            it.terms.emplace_back(ds, r.expr(r.need(x, "coefficient", "operator term")));
        }
    } else {
        r.fail(e, "expected must be an expression or a list");
    }
    return it;
}

GroupDefinition build(const Reader& r, const YAML::Node& root) {
    r.keys(root, "group definition",
           {"name", "description", "algebra", "chart", "parameters", "metrics", "orbits", "reductions", "ansatze",
            "registry"});
    GroupDefinition d;
    d.name = r.str(r.need(root, "name", "group definition"));
    if (root["description"]) d.description = r.str(root["description"]);

    YAML::Node alg = r.need(root, "algebra", "group definition");
    r.keys(alg, "algebra", {"dimension", "labels", "brackets", "casimirs"});
    YAML::Node dn = r.need(alg, "dimension", "algebra");
    int n = r.integer(dn);
    if (n < 1) r.fail(dn, "dimension must be positive");
    std::vector<LieAlgebra::Bracket> brackets;
    if (alg["brackets"]) {
        for (const auto& b : alg["brackets"]) {
            if (!b.IsSequence() || b.size() != 3) r.fail(b, "bracket must be [b, c, [components]]");
            LieAlgebra::Bracket br{r.integer(b[0]) - 1, r.integer(b[1]) - 1, {}};
            if (br.b < 0 || br.b >= n || br.c < 0 || br.c >= n || br.b == br.c) r.fail(b, "bracket indices out of range");
            if (!b[2].IsSequence() || static_cast<int>(b[2].size()) != n) r.fail(b[2], "bracket needs n components");
            for (const auto& v : b[2]) {
                try {
                    br.result.push_back(parse_rational(r.str(v)));
                } catch (const ParseError&) {
                    r.fail(v, "structure constant must be rational");
                }
            }
            brackets.push_back(br);
        }
    }
    std::vector<std::string> labels;
    if (alg["labels"])
        for (const auto& l : alg["labels"]) labels.push_back(r.str(l));
    d.algebra = LieAlgebra::from_brackets(n, brackets, labels);
    if (jacobi_residual_exact(d.algebra) != 0) r.fail(alg, "brackets violate the Jacobi identity");
    std::set<std::string> duals;
    for (const auto& f : dual_coordinates(n)) duals.insert(f);
    if (alg["casimirs"]) {
        d.casimirs = r.exprs(alg["casimirs"]);
        for (std::size_t i = 0; i < d.casimirs.size(); ++i)
            for (const auto& s : d.casimirs[i].free_symbols())
                if (!duals.count(s)) r.fail(alg["casimirs"][i], "Casimir uses '" + s + "', expected f1..f" + std::to_string(n));
    }

    if (root["parameters"]) {
        if (!root["parameters"].IsMap()) r.fail(root["parameters"], "parameters must be a mapping");
        for (const auto& kv : root["parameters"]) d.parameters[kv.first.as<std::string>()] = r.range(kv.second);
    }

    d.chart = parse_chart(r, r.need(root, "chart", "group definition"), n, true, d.parameters);

    if (root["metrics"]) {
        for (const auto& kv : root["metrics"]) {
            r.keys(kv.second, "metric", {"upper", "lower"});
            try {
                if (kv.second["upper"])
                    d.metrics[kv.first.as<std::string>()] = MetricSpec::from_upper(parse_matrix(r, kv.second["upper"], n));
                else
                    d.metrics[kv.first.as<std::string>()] =
                        MetricSpec::from_lower(parse_matrix(r, r.need(kv.second, "lower", "metric"), n));
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                r.fail(kv.second, e.what());
            }
        }
    }

    if (root["orbits"]) {
        for (const auto& kv : root["orbits"]) {
            const YAML::Node& o = kv.second;
            r.keys(o, "orbit", {"lambda", "polarization", "chart", "kernel"});
            OrbitPreset p;
            YAML::Node ln = r.need(o, "lambda", "orbit");
            p.lambda = r.exprs(ln);
            if (static_cast<int>(p.lambda.size()) != n) r.fail(ln, "lambda needs one component per generator");
            YAML::Node pn = r.need(o, "polarization", "orbit");
            for (const auto& g : pn) {
                int v = r.integer(g) - 1;
                if (v < 0 || v >= n) r.fail(g, "polarization generator out of range");
                p.polarization.push_back(v);
            }
            p.chart = parse_chart(r, r.need(o, "chart", "orbit"), n, false, d.parameters);
            if (o["kernel"]) p.kernel = parse_kernel(r, o["kernel"]);
            d.orbits[kv.first.as<std::string>()] = p;
        }
    }

    if (root["reductions"]) {
        for (const auto& kv : root["reductions"]) {
            const YAML::Node& x = kv.second;
            r.keys(x, "reduction", {"orbit", "metric", "kind", "coupling", "weight", "potential"});
            ReductionPreset p;
            YAML::Node on = r.need(x, "orbit", "reduction"), mn = r.need(x, "metric", "reduction");
            p.orbit = r.str(on);
            p.metric = r.str(mn);
            if (!d.orbits.count(p.orbit)) r.fail(on, "unknown orbit '" + p.orbit + "'");
            if (!d.metrics.count(p.metric)) r.fail(mn, "unknown metric '" + p.metric + "'");
            if (!d.orbits.at(p.orbit).kernel) r.fail(on, "orbit '" + p.orbit + "' has no kernel");
            p.kind = parse_kind(r, r.need(x, "kind", "reduction"));
            p.coupling = r.expr(r.need(x, "coupling", "reduction"));
            if (x["weight"]) p.weight = r.expr(x["weight"]);
            if (x["potential"]) p.potential = r.expr(x["potential"]);
            if (d.default_reduction.empty()) d.default_reduction = kv.first.as<std::string>();
            d.reductions[kv.first.as<std::string>()] = p;
        }
    }

    if (root["ansatze"]) {
        for (const auto& kv : root["ansatze"]) {
            const YAML::Node& x = kv.second;
            r.keys(x, "ansatz", {"kernel", "symmetries", "weight", "sample"});
            AnsatzPreset p;
            p.kernel = parse_kernel(r, r.need(x, "kernel", "ansatz"));
            if (x["weight"]) p.weight = r.expr(x["weight"]);
            if (x["sample"])
                for (const auto& kv2 : x["sample"]) p.sample[kv2.first.as<std::string>()] = r.range(kv2.second);
            if (x["symmetries"]) {
                for (const auto& sn : x["symmetries"]) {
                    r.keys(sn, "symmetry", {"frame", "casimir", "value"});
                    Symmetry sy;
                    if (sn["frame"]) {
                        sy.index = r.integer(sn["frame"]) - 1;
                        if (sy.index < 0 || sy.index >= n) r.fail(sn["frame"], "frame index out of range");
                    } else {
                        YAML::Node cn = r.need(sn, "casimir", "symmetry");
                        sy.kind = Symmetry::Kind::Casimir;
                        sy.index = r.integer(cn) - 1;
                        if (sy.index < 0 || sy.index >= static_cast<int>(d.casimirs.size()))
                            r.fail(cn, "casimir index out of range");
                    }
                    sy.value = r.expr(r.need(sn, "value", "symmetry"));
                    p.symmetries.push_back(sy);
                }
            }
            d.ansatze[kv.first.as<std::string>()] = p;
        }
    }

    if (root["registry"])
        for (const auto& it : root["registry"]) d.registry.push_back(parse_item(r, it));
    return d;
}

}  // namespace

GroupDefinition parse_definition(const std::string& text, const std::string& source) {
    Reader r(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError(source + ": " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root || !root.IsMap()) throw ParseError(source + ": group definition must be a mapping", 1, 1);
    try {
        return build(r, root);
    } catch (const YAML::Exception& e) {
        throw ParseError(source + ": " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

GroupDefinition load_definition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_definition(ss.str(), path);
}

}  // namespace ncr
