#include "wnl/json_io.hpp"

#include <algorithm>
#include <cmath>

#include "wnl/error.hpp"

namespace wnl {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json point_json(const Point& p, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("missing JSON field '") + key + "'");
    return j.at(key);
}

json log_abs_json(const LogAbsFamily& l) { return {{"scale", l.scale}, {"offset", l.offset}}; }

}  // namespace

json box_to_json(const Box& b) {
    return {{"dimension", b.dim}, {"lo", point_json(b.lo, b.dim)}, {"hi", point_json(b.hi, b.dim)}};
}

Box box_from_json(const json& j) {
    auto lo = field(j, "lo").get<std::vector<double>>();
    auto hi = field(j, "hi").get<std::vector<double>>();
    return make_box(lo, hi);
}

json mesh_to_json(const MeshSpec& m) {
    if (m.kind == MeshSpec::Kind::uniform) return {{"kind", "uniform"}, {"level", m.level}};
    return {{"kind", "graded"},
            {"ratio", m.ratio},
            {"layers", m.layers},
            {"subdivisions", m.subdivisions},
            {"singular_point", m.singular_point}};
}

MeshSpec mesh_from_json(const json& j) {
    MeshSpec m;
    auto kind = field(j, "kind").get<std::string>();
    if (kind == "uniform") {
        m.kind = MeshSpec::Kind::uniform;
        m.level = field(j, "level").get<int>();
    } else if (kind == "graded") {
        m.kind = MeshSpec::Kind::graded;
        m.ratio = field(j, "ratio").get<double>();
        m.layers = field(j, "layers").get<int>();
        m.subdivisions = field(j, "subdivisions").get<int>();
        m.singular_point = field(j, "singular_point").get<double>();
    } else {
        throw UsageError("unknown mesh kind '" + kind + "'");
    }
    return m;
}

json family_to_json(const CubeFamily& f) {
    return {{"box", box_to_json(f.box)},
            {"dyadic_depth", f.dyadic_depth},
            {"shifted", f.shifted},
            {"random_count", f.random_count},
            {"seed", f.seed},
            {"description", f.describe()}};
}

CubeFamily family_from_json(const json& j) {
    CubeFamily f;
    f.box = box_from_json(field(j, "box"));
    f.dyadic_depth = field(j, "dyadic_depth").get<int>();
    f.shifted = field(j, "shifted").get<bool>();
    f.random_count = field(j, "random_count").get<std::size_t>();
    f.seed = field(j, "seed").get<std::uint64_t>();
    return f;
}

json provider_to_json(const Provider& p) {
    json params = std::visit(
        overloaded{[](const ConstantFamily& c) { return json{{"value", c.value}}; },
                   [](const PowerFamily& c) { return json{{"exponent", c.exponent}, {"coef", c.coef}}; },
                   [](const LogAbsFamily& c) { return log_abs_json(c); },
                   [](const IndicatorFamily& c) { return json{{"box", box_to_json(c.box)}}; },
                   [](const RestrictedFamily& c) {
                       return json{{"base", provider_to_json(*c.base)}, {"box", box_to_json(c.box)}};
                   },
                   [](const ProductFamily& c) {
                       json a = json::array();
                       for (const auto& f : c.factors) a.push_back(provider_to_json(*f));
                       return json{{"factors", a}};
                   },
                   [](const ExpScaledBmoFamily& c) { return json{{"s", c.s}, {"base", log_abs_json(c.base)}}; }},
        p.family());
    return {{"family", p.name()}, {"params", params}};
}

Provider provider_from_json(const json& j) {
    auto name = field(j, "family").get<std::string>();
    const json& p = field(j, "params");
    if (name == "constant") return Provider::constant(field(p, "value").get<double>());
    if (name == "power") return Provider::power(field(p, "exponent").get<double>(), field(p, "coef").get<double>());
    if (name == "logabs") return Provider::log_abs(field(p, "scale").get<double>(), field(p, "offset").get<double>());
    if (name == "indicator") return Provider::indicator(box_from_json(field(p, "box")));
    if (name == "restricted")
        return Provider::restricted(provider_from_json(field(p, "base")), box_from_json(field(p, "box")));
    if (name == "product") {
        std::vector<Provider> factors;
        for (const auto& f : field(p, "factors")) factors.push_back(provider_from_json(f));
        return Provider::product(factors);
    }
    if (name == "expbmo") {
        const json& b = field(p, "base");
        return Provider::exp_scaled(field(p, "s").get<double>(),
                                    LogAbsFamily{field(b, "scale").get<double>(), field(b, "offset").get<double>()});
    }
    throw UsageError("unknown provider family '" + name + "'");
}

json grid_to_json(const Grid& g) {
    return {{"dimension", g.dim()}, {"box", box_to_json(g.box())}, {"mesh", mesh_to_json(g.mesh())}};
}

GridPtr grid_from_json(const json& j) {
    Box b = box_from_json(field(j, "box"));
    if (field(j, "dimension").get<int>() != b.dim) throw UsageError("grid dimension does not match its box");
    return std::make_shared<const Grid>(Grid::from_spec(b, mesh_from_json(field(j, "mesh"))));
}

json function_to_json(const GridFunction& f) {
    const Grid& g = f.grid();
    json j = grid_to_json(g);
    json cells = json::array();
    for (std::size_t i = 0; i < g.size(); ++i)
        cells.push_back({{"mid", point_json(g.midpoint(i), g.dim())}, {"measure", g.measure(i)}, {"value", f[i]}});
    j["cells"] = std::move(cells);
    j["provider"] = f.provider() ? provider_to_json(*f.provider()) : json(nullptr);
    return j;
}

GridFunction function_from_json(const json& j) {
    GridPtr g = grid_from_json(j);
    if (j.contains("provider") && !j.at("provider").is_null()) return GridFunction(g, provider_from_json(j.at("provider")));
    const json& cells = field(j, "cells");
    if (cells.size() != g->size()) throw UsageError("cell count does not match the grid spec");
    std::vector<double> v;
    v.reserve(cells.size());
    for (const auto& c : cells) {
        const json& val = field(c, "value");
        if (!val.is_number()) throw UsageError("cell value is not a number");
        v.push_back(val.get<double>());
    }
    return GridFunction(g, std::move(v));
}

json report_json(const std::string& kind, const json& params, double estimate, std::optional<double> ceiling,
                 const std::optional<Box>& extremal_cube, const std::string& family, bool pass) {
    return {{"kind", kind},
            {"params", params},
            {"estimate", estimate},
            {"ceiling", ceiling ? json(*ceiling) : json(nullptr)},
            {"extremal_cube", extremal_cube ? box_to_json(*extremal_cube) : json(nullptr)},
            {"family", family},
            {"pass", pass}};
}

json to_json(const ApReport& r) {
    return report_json("ap-constant", {{"p", r.p}, {"cubes", r.cubes}}, r.estimate, std::nullopt, r.extremal_cube,
                       r.family, true);
}

json to_json(const BmoReport& r) {
    return report_json("bmo-norm", {{"cubes", r.cubes}}, r.estimate, std::nullopt, r.extremal_cube, r.family, true);
}

json to_json(const JNConstants& r) {
    return report_json("jn-check", {{"dimension", r.dim}, {"alpha", r.alpha}, {"bmo", r.bmo}, {"tilt", r.tilt}},
                       r.beta_measured, std::nullopt, r.extremal_cube, r.family, std::isfinite(r.beta_measured));
}

json to_json(const ExpBmoReport& r) {
    return report_json("exp-bmo", {{"s", r.s}, {"s_limit", r.s_limit}, {"p", r.ap.p}}, r.ap.estimate, r.ceiling,
                       r.ap.extremal_cube, r.ap.family, r.pass);
}

json to_json(const RhiReport& r) {
    return report_json("rhi-check", {{"r_w", r.r_w}, {"a2", r.a2}}, r.worst_ratio, 2.0, r.extremal_cube, r.family,
                       r.pass);
}

json to_json(const CzDecomposition& r) {
    json cubes = json::array();
    for (const auto& c : r.cubes)
        cubes.push_back({{"box", box_to_json(c.box)}, {"average", c.average}, {"generation", c.generation}});
    return {{"kind", "cz-decompose"},
            {"root", box_to_json(r.root)},
            {"lambda", r.lambda},
            {"root_average", r.root_average},
            {"cubes", cubes},
            {"unresolved", r.unresolved}};
}

json to_json(const NormEstimate& r) {
    return {{"kind", "op-norm"},
            {"p", r.p},
            {"method", r.method},
            {"estimate", r.value},
            {"witness", r.witness_id},
            {"ceiling", r.method == "witness-lower-bound" ? json(r.ceiling) : json(nullptr)},
            {"warnings", r.warnings},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

json to_json(const ContourConfig& c) {
    return {{"radius", c.radius}, {"nodes", c.nodes}, {"order", c.order}, {"r_prime", c.r_prime},
            {"from_rule", c.from_rule}, {"dimension", c.dim}, {"a2", c.a2}, {"bmo", c.bmo}};
}

ContourConfig contour_config_from_json(const json& j) {
    ContourConfig c;
    c.radius = field(j, "radius").get<double>();
    c.nodes = field(j, "nodes").get<int>();
    c.order = field(j, "order").get<int>();
    c.r_prime = field(j, "r_prime").get<double>();
    c.from_rule = field(j, "from_rule").get<bool>();
    c.dim = field(j, "dimension").get<int>();
    c.a2 = field(j, "a2").get<double>();
    c.bmo = field(j, "bmo").get<double>();
    return c;
}

json to_json(const CommutatorResult& r) {
    double mx = 0.0;
    for (double v : r.output.values()) mx = std::max(mx, std::abs(v));
    return {{"kind", "commutator"},
            {"order", r.order},
            {"method", r.method},
            {"max_abs_output", mx},
            {"imaginary_residue", r.imaginary_residue},
            {"deviation", r.deviation ? json(*r.deviation) : json(nullptr)}};
}

}  // namespace wnl
