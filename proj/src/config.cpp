#include "polyvem/config.hpp"

#include "polyvem/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace polyvem {

namespace {

using nlohmann::json;

// Checked accessor: every key is validated against a whitelist, every error
// names the full path of the offending entry.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_ + ": expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [key, value] : j_.items())
            if (!allowed.count(key))
                throw ConfigError(join(key) + ": unknown key");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Section child(const std::string& key) const
    {
        require(key);
        return Section(j_.at(key), join(key));
    }

    double number(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_number())
            throw ConfigError(join(key) + ": expected a number");
        return j_.at(key).get<double>();
    }
    double number_or(const std::string& key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_number_integer())
            throw ConfigError(join(key) + ": expected an integer");
        return j_.at(key).get<int>();
    }
    int integer_or(const std::string& key, int fallback) const
    {
        return has(key) ? integer(key) : fallback;
    }

    bool boolean_or(const std::string& key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        if (!j_.at(key).is_boolean())
            throw ConfigError(join(key) + ": expected a boolean");
        return j_.at(key).get<bool>();
    }

    std::string str(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_string())
            throw ConfigError(join(key) + ": expected a string");
        return j_.at(key).get<std::string>();
    }
    std::string str_or(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? str(key) : fallback;
    }

    std::vector<double> number_list(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_array())
            throw ConfigError(join(key) + ": expected an array");
        std::vector<double> out;
        for (const auto& v : j_.at(key)) {
            if (!v.is_number())
                throw ConfigError(join(key) + ": expected numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<int> integer_list(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_array())
            throw ConfigError(join(key) + ": expected an array");
        std::vector<int> out;
        for (const auto& v : j_.at(key)) {
            if (!v.is_number_integer())
                throw ConfigError(join(key) + ": expected integers");
            out.push_back(v.get<int>());
        }
        return out;
    }

    std::vector<std::string> string_list(const std::string& key) const
    {
        require(key);
        if (!j_.at(key).is_array())
            throw ConfigError(join(key) + ": expected an array");
        std::vector<std::string> out;
        for (const auto& v : j_.at(key)) {
            if (!v.is_string())
                throw ConfigError(join(key) + ": expected strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    std::string join(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    void require(const std::string& key) const
    {
        if (!has(key))
            throw ConfigError(join(key) + ": missing required key");
    }

    const json& j_;
    std::string path_;
};

json parse_json(const std::string& text)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config: invalid JSON");
    return j;
}

MeshConfig parse_mesh_section(const Section& s)
{
    s.allow({"kind", "counts", "lengths", "twist", "path", "nx", "ny", "nz",
             "lx", "ly", "lz", "pillar_tilt", "horizon_wave", "erosion",
             "pad", "triangulate", "flip", "scale", "extra_horizontal_nodes"});

    MeshConfig mc;
    const std::string kind = s.str("kind");
    if (kind == "twisted2d" || kind == "twisted3d") {
        mc.kind = kind == "twisted2d" ? MeshConfig::Kind::Twisted2D : MeshConfig::Kind::Twisted3D;
        mc.counts = s.integer_list("counts");
        mc.lengths = s.number_list("lengths");
        mc.twist = s.number_or("twist", 0.0);
        const size_t want = mc.kind == MeshConfig::Kind::Twisted2D ? 2 : 3;
        if (mc.counts.size() != want || mc.lengths.size() != want)
            throw ConfigError(s.join("counts") + ": " + kind + " needs "
                              + std::to_string(want) + " entries");
    } else if (kind == "grdecl") {
        mc.kind = MeshConfig::Kind::Grdecl;
        mc.path = s.str("path");
    } else if (kind == "pvmesh") {
        mc.kind = MeshConfig::Kind::Pvmesh;
        mc.path = s.str("path");
    } else if (kind == "layered3d") {
        mc.kind = MeshConfig::Kind::Layered3D;
        mc.layered.nx = s.integer("nx");
        mc.layered.ny = s.integer("ny");
        mc.layered.nz = s.integer("nz");
        mc.layered.lx = s.number("lx");
        mc.layered.ly = s.number("ly");
        mc.layered.lz = s.number("lz");
        mc.layered.pillar_tilt = s.number_or("pillar_tilt", 0.0);
        mc.layered.horizon_wave = s.number_or("horizon_wave", 0.0);
        mc.layered.erosion = s.number_or("erosion", 0.0);
    } else {
        throw ConfigError(s.join("kind") + ": unknown mesh kind '" + kind + "'");
    }

    mc.pad = s.integer_or("pad", 0);
    mc.triangulate = s.boolean_or("triangulate", false);
    mc.flip = s.boolean_or("flip", false);
    if (s.has("scale"))
        mc.scale = s.number_list("scale");
    mc.extra_horizontal_nodes = s.boolean_or("extra_horizontal_nodes", false);
    return mc;
}

MaterialConfig parse_material_scalar(const Section& s)
{
    s.allow({"E", "nu", "lambda", "mu"});
    MaterialConfig m;
    if (s.has("lambda") || s.has("mu")) {
        m.lambda = s.number("lambda");
        m.mu = s.number("mu");
        m.use_lame = true;
    } else {
        m.young = s.number("E");
        m.poisson = s.number("nu");
    }
    return m;
}

// "material" is either one {E, nu}/{lambda, mu} object or an array of them
// (one per cell, in cell order)
MaterialConfig parse_material_value(const json& j, const std::string& path)
{
    if (!j.is_array())
        return parse_material_scalar(Section(j, path));
    if (j.empty())
        throw ConfigError(path + ": empty material list");
    std::vector<MaterialConfig> cells;
    int idx = 0;
    for (const auto& item : j)
        cells.push_back(
            parse_material_scalar(Section(item, path + "[" + std::to_string(idx++) + "]")));
    MaterialConfig m = cells.front();
    m.per_cell = std::move(cells);
    return m;
}

LoadMethod parse_method(const std::string& name, const std::string& path)
{
    if (name == "projection")
        return LoadMethod::Projection;
    if (name == "nodal")
        return LoadMethod::NodalQuadrature;
    if (name == "dgrad")
        return LoadMethod::DiscreteGradient;
    throw ConfigError(path + ": unknown load method '" + name + "'");
}

StabilizationKind parse_stab(const std::string& name, const std::string& path)
{
    if (name == "alpha_g")
        return StabilizationKind::AlphaG;
    if (name == "alpha_n")
        return StabilizationKind::AlphaN;
    if (name == "fem2d")
        return StabilizationKind::FemExact;
    throw ConfigError(path + ": unknown stabilization '" + name + "'");
}

LoadConfig parse_load_section(const Section& s)
{
    s.allow({"kind", "g", "density", "sigma", "method"});
    LoadConfig lc;
    const std::string kind = s.str("kind");
    if (kind == "gravity") {
        lc.kind = CompactionCase::Load::Gravity;
        lc.gravity = s.number_or("g", 9.8);
        lc.density = s.number("density");
    } else if (kind == "top_traction") {
        lc.kind = CompactionCase::Load::TopTraction;
        lc.traction = s.number("sigma");
    } else {
        throw ConfigError(s.join("kind") + ": unknown load kind '" + kind + "'");
    }
    lc.method = parse_method(s.str_or("method", "projection"), s.join("method"));
    return lc;
}

} // namespace

PolyMesh MeshConfig::build() const
{
    PolyMesh mesh;
    switch (kind) {
    case Kind::Twisted2D:
    case Kind::Twisted3D:
        mesh = twisted_cartesian(counts, lengths, twist);
        break;
    case Kind::Grdecl: {
        CornerPointSpec spec = read_grdecl_file(path);
        if (pad > 0)
            spec = pad_embed(spec, pad);
        mesh = build_cornerpoint(spec);
        break;
    }
    case Kind::Layered3D: {
        CornerPointSpec spec = layered_cornerpoint(layered);
        if (pad > 0)
            spec = pad_embed(spec, pad);
        mesh = build_cornerpoint(spec);
        break;
    }
    case Kind::Pvmesh:
        mesh = read_pvmesh(path);
        break;
    }

    if (triangulate)
        mesh = triangulate_faces(mesh);
    if (flip)
        mesh = flip_vertical(mesh);
    if (!scale.empty()) {
        Eigen::VectorXd factors(scale.size());
        for (size_t i = 0; i < scale.size(); ++i)
            factors(i) = scale[i];
        mesh = scale_mesh(mesh, factors);
    }
    if (extra_horizontal_nodes)
        mesh = insert_edge_midnodes(mesh, direction_edge_filter(1));
    return mesh;
}

KelvinMaterial MaterialConfig::material(int dim) const
{
    return use_lame ? isotropic_stiffness(lambda, mu, dim)
                    : isotropic_from_young(young, poisson, dim);
}

std::vector<KelvinMaterial> MaterialConfig::materials(int dim, int n_cells) const
{
    if (per_cell.empty())
        return {material(dim)};
    if (static_cast<int>(per_cell.size()) != n_cells)
        throw ConfigError("material: " + std::to_string(per_cell.size())
                          + " per-cell entries for " + std::to_string(n_cells) + " cells");
    std::vector<KelvinMaterial> out;
    out.reserve(per_cell.size());
    for (const MaterialConfig& m : per_cell)
        out.push_back(m.material(dim));
    return out;
}

CompactionCase SolveConfig::compaction_case(const PolyMesh& mesh) const
{
    const Eigen::MatrixXd box = mesh.bounding_box();
    CompactionCase c;
    c.dim = mesh.dim;
    c.lengths.resize(mesh.dim);
    for (int d = 0; d < mesh.dim; ++d)
        c.lengths[d] = box(d, 1) - box(d, 0);
    c.vertical_origin = box(mesh.dim - 1, 0);
    c.gravity = load.gravity;
    c.density = load.density;
    c.load = load.kind;
    c.traction = load.traction;
    if (material.use_lame) {
        // store the equivalent (E, nu) so the case carries one description
        const double l = material.lambda, m = material.mu;
        c.young = m * (3 * l + 2 * m) / (l + m);
        c.poisson = l / (2 * (l + m));
    } else {
        c.young = material.young;
        c.poisson = material.poisson;
    }
    return c;
}

SolveConfig parse_solve_config(const std::string& json_text)
{
    const json j = parse_json(json_text);
    const Section root(j, "");
    root.allow({"mesh", "material", "load", "stabilization", "tol", "output"});

    SolveConfig sc;
    sc.mesh = parse_mesh_section(root.child("mesh"));
    if (!j.contains("material"))
        throw ConfigError("material: missing required key");
    sc.material = parse_material_value(j.at("material"), "material");
    sc.load = parse_load_section(root.child("load"));
    sc.stabilization = parse_stab(root.str_or("stabilization", "alpha_g"), "stabilization");
    sc.tol = root.number_or("tol", 1e-10);
    if (root.has("output")) {
        const Section out = root.child("output");
        out.allow({"vtk", "summary"});
        sc.out_vtk = out.str_or("vtk", "");
        sc.out_summary = out.str_or("summary", "");
    }
    return sc;
}

GenerateConfig parse_generate_config(const std::string& json_text)
{
    const json j = parse_json(json_text);
    const Section root(j, "");
    root.allow({"mesh", "output"});

    GenerateConfig gc;
    gc.mesh = parse_mesh_section(root.child("mesh"));
    const Section out = root.child("output");
    out.allow({"mesh", "vtk"});
    gc.out_mesh = out.str_or("mesh", "");
    gc.out_vtk = out.str_or("vtk", "");
    if (gc.out_mesh.empty() && gc.out_vtk.empty())
        throw ConfigError("output: at least one of output.mesh / output.vtk required");
    return gc;
}

SweepRunConfig parse_sweep_config(const std::string& json_text)
{
    const json j = parse_json(json_text);
    const Section root(j, "");
    root.allow({"nx", "ny", "length", "twist", "material", "load",
                "aspect_ratios", "methods", "stabilizations", "grids", "output"});

    SweepRunConfig sw;
    SweepRequest& req = sw.request;
    req.nx = root.integer_or("nx", 10);
    req.ny = root.integer_or("ny", 10);

    req.base.dim = 2;
    const double L = root.number_or("length", 15.0);
    req.base.lengths = {L, L};
    req.twist_amplitude = root.number_or("twist", 0.05 * L);

    const MaterialConfig mat = parse_material_scalar(root.child("material"));
    if (mat.use_lame) {
        req.base.young = mat.mu * (3 * mat.lambda + 2 * mat.mu) / (mat.lambda + mat.mu);
        req.base.poisson = mat.lambda / (2 * (mat.lambda + mat.mu));
    } else {
        req.base.young = mat.young;
        req.base.poisson = mat.poisson;
    }

    const LoadConfig load = parse_load_section(root.child("load"));
    if (load.kind != CompactionCase::Load::Gravity)
        throw ConfigError("load.kind: sweeps use the gravity compaction case");
    req.base.gravity = load.gravity;
    req.base.density = load.density;

    req.aspect_ratios = root.number_list("aspect_ratios");
    if (req.aspect_ratios.empty())
        throw ConfigError("aspect_ratios: empty sweep");

    for (const std::string& m : root.string_list("methods"))
        req.methods.push_back(parse_method(m, "methods"));
    if (root.has("stabilizations"))
        for (const std::string& st : root.string_list("stabilizations"))
            req.stabs.push_back(parse_stab(st, "stabilizations"));
    else
        req.stabs = {StabilizationKind::AlphaG};
    if (root.has("grids")) {
        for (const std::string& g : root.string_list("grids")) {
            if (g == "twisted")
                req.grids.push_back(SweepGrid::Twisted);
            else if (g == "extra_nodes")
                req.grids.push_back(SweepGrid::TwistedExtraNodes);
            else
                throw ConfigError("grids: unknown grid '" + g + "'");
        }
    } else {
        req.grids = {SweepGrid::Twisted};
    }
    if (req.methods.empty())
        throw ConfigError("methods: empty list");

    const Section out = root.child("output");
    out.allow({"csv"});
    sw.out_csv = out.str("csv");
    return sw;
}

} // namespace polyvem
