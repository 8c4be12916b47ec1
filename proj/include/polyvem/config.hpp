#pragma once

#include "polyvem/grid_gen.hpp"
#include "polyvem/verify.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyvem {

// Configuration errors carry the path of the offending key
// ("mesh.twst: unknown key").  The CLI maps them to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshConfig {
    enum class Kind { Twisted2D, Twisted3D, Grdecl, Layered3D, Pvmesh } kind = Kind::Twisted2D;

    // twisted grids
    std::vector<int> counts;
    std::vector<double> lengths;
    double twist = 0.0;

    // file-based meshes
    std::string path;

    // layered corner-point generator
    LayeredGridOptions layered;

    // transforms, applied in this order
    int pad = 0;                 // corner-point specs only
    bool triangulate = false;
    bool flip = false;
    std::vector<double> scale;
    bool extra_horizontal_nodes = false; // 2D only

    PolyMesh build() const;
};

struct MaterialConfig {
    double young = 0.0, poisson = 0.0;   // either (E, nu) ...
    double lambda = 0.0, mu = 0.0;       // ... or Lame parameters
    bool use_lame = false;

    // per-cell variants; when non-empty, one entry per cell in cell order
    // and the scalar fields above hold the first entry
    std::vector<MaterialConfig> per_cell;

    KelvinMaterial material(int dim) const;
    /// One entry per cell (or a single global entry when uniform).
    std::vector<KelvinMaterial> materials(int dim, int n_cells) const;
};

struct LoadConfig {
    CompactionCase::Load kind = CompactionCase::Load::Gravity;
    double gravity = 9.8;
    double density = 3000.0;
    double traction = 0.0;
    LoadMethod method = LoadMethod::Projection;
};

struct SolveConfig {
    MeshConfig mesh;
    MaterialConfig material;
    LoadConfig load;
    StabilizationKind stabilization = StabilizationKind::AlphaG;
    double tol = 1e-10;
    std::string out_vtk;        // empty: skip
    std::string out_summary;    // empty: stdout only

    CompactionCase compaction_case(const PolyMesh& mesh) const;
};

struct GenerateConfig {
    MeshConfig mesh;
    std::string out_mesh;   // pvmesh path
    std::string out_vtk;
};

struct SweepRunConfig {
    SweepRequest request;
    std::string out_csv;
};

SolveConfig parse_solve_config(const std::string& json_text);
GenerateConfig parse_generate_config(const std::string& json_text);
SweepRunConfig parse_sweep_config(const std::string& json_text);

} // namespace polyvem
