#include "polyvem/config.hpp"
#include "polyvem/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>

using namespace polyvem;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path()
            / ("polyvem_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("pvmesh round trip")
{
    const PolyMesh mesh = twisted_cartesian({3, 2}, {3.0, 2.0}, 0.08);
    const std::string text = pvmesh_string(mesh);
    const PolyMesh back = parse_pvmesh(text);
    CHECK(back.dim == mesh.dim);
    CHECK(back.num_nodes() == mesh.num_nodes());
    CHECK(back.num_faces() == mesh.num_faces());
    CHECK(back.num_cells() == mesh.num_cells());
    CHECK((back.coords - mesh.coords).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pvmesh_string(back) == text); // stable under re-serialization

    CHECK_THROWS(parse_pvmesh("not a mesh"));
    CHECK_THROWS(parse_pvmesh("polyvem-mesh 1\ndim 2\nnodes 4\n0 0\n"));

    // 3D polyhedral round trip preserves signed cell-face lists
    const PolyMesh poly = triangulate_faces(twisted_cartesian({2, 1, 1}, {2.0, 1.0, 1.0}, 0.04));
    const PolyMesh back3 = parse_pvmesh(pvmesh_string(poly));
    CHECK(back3.num_cells() == poly.num_cells());
    CHECK(back3.num_faces() == poly.num_faces());
    const GeometryCache g0 = compute_geometry(poly);
    const GeometryCache g1 = compute_geometry(back3);
    for (int c = 0; c < poly.num_cells(); ++c)
        CHECK(g1.cell_volume[c] == doctest::Approx(g0.cell_volume[c]).epsilon(1e-15));
}

TEST_CASE("vtk output")
{
    SUBCASE("2D polygons")
    {
        const PolyMesh mesh = twisted_cartesian({2, 2}, {1.0, 1.0}, 0.0);
        VtkFields fields;
        fields.displacement = NodalField::Zero(2 * mesh.num_nodes());
        const std::string vtk = vtk_string(mesh, fields);
        CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
        CHECK(vtk.find("POINTS 9 double") != std::string::npos);
        CHECK(vtk.find("CELL_TYPES 4") != std::string::npos);
        CHECK(vtk.find("\n7\n") != std::string::npos); // VTK_POLYGON
        CHECK(vtk.find("VECTORS displacement double") != std::string::npos);
        // deterministic output
        CHECK(vtk == vtk_string(mesh, fields));
    }

    SUBCASE("3D polyhedra with cell data")
    {
        const PolyMesh mesh = twisted_cartesian({1, 1, 1}, {1.0, 1.0, 1.0}, 0.0);
        VtkFields fields;
        fields.cell_scalars = Eigen::VectorXd::Constant(1, 3.5);
        const std::string vtk = vtk_string(mesh, fields);
        CHECK(vtk.find("CELL_TYPES 1") != std::string::npos);
        CHECK(vtk.find("\n42\n") != std::string::npos); // VTK_POLYHEDRON
        CHECK(vtk.find("SCALARS max_strain double 1") != std::string::npos);
        CHECK(vtk.find("3.5") != std::string::npos);
    }

    SUBCASE("size mismatches are rejected")
    {
        const PolyMesh mesh = twisted_cartesian({1, 1}, {1.0, 1.0}, 0.0);
        VtkFields fields;
        fields.displacement = NodalField::Zero(3);
        CHECK_THROWS(vtk_string(mesh, fields));
    }
}

TEST_CASE("solve config parsing and validation")
{
    const std::string good = R"({
        "mesh": {"kind": "twisted2d", "counts": [4, 4], "lengths": [15.0, 15.0],
                 "twist": 0.75},
        "material": {"E": 3e8, "nu": 0.3},
        "load": {"kind": "gravity", "density": 3000.0, "method": "dgrad"},
        "stabilization": "alpha_n",
        "output": {"vtk": "u.vtk"}
    })";
    const SolveConfig config = parse_solve_config(good);
    CHECK(config.load.method == LoadMethod::DiscreteGradient);
    CHECK(config.stabilization == StabilizationKind::AlphaN);
    const PolyMesh mesh = config.mesh.build();
    CHECK(mesh.num_cells() == 16);
    const CompactionCase c = config.compaction_case(mesh);
    CHECK(c.vertical_length() == doctest::Approx(15.0));
    CHECK(c.density == 3000.0);

    SUBCASE("unknown keys are rejected with their path")
    {
        const std::string bad = R"({
            "mesh": {"kind": "twisted2d", "counts": [4, 4], "lengths": [15, 15],
                     "twst": 0.1},
            "material": {"E": 3e8, "nu": 0.3},
            "load": {"kind": "gravity", "density": 3000.0}
        })";
        CHECK_THROWS_WITH_AS(parse_solve_config(bad), doctest::Contains("mesh.twst"),
                             ConfigError);
    }

    SUBCASE("missing sections are reported")
    {
        CHECK_THROWS_WITH_AS(parse_solve_config(R"({"mesh": {"kind": "pvmesh", "path": "x"}})"),
                             doctest::Contains("material"), ConfigError);
    }

    SUBCASE("bad values are reported")
    {
        const std::string bad_method = R"({
            "mesh": {"kind": "twisted2d", "counts": [2, 2], "lengths": [1, 1]},
            "material": {"E": 1e8, "nu": 0.25},
            "load": {"kind": "gravity", "density": 1.0, "method": "best"}
        })";
        CHECK_THROWS_WITH_AS(parse_solve_config(bad_method),
                             doctest::Contains("unknown load method"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_solve_config("{nope"), doctest::Contains("invalid JSON"),
                             ConfigError);
    }

    SUBCASE("lame parameters instead of E/nu")
    {
        const std::string lame = R"({
            "mesh": {"kind": "twisted2d", "counts": [2, 2], "lengths": [1, 1]},
            "material": {"lambda": 1.73e8, "mu": 1.15e8},
            "load": {"kind": "gravity", "density": 3000.0}
        })";
        const SolveConfig sc = parse_solve_config(lame);
        CHECK(sc.material.use_lame);
        CHECK(sc.material.material(2).C(0, 0) == doctest::Approx(1.73e8 + 2 * 1.15e8));
    }

    SUBCASE("per-cell material list")
    {
        const std::string layered = R"({
            "mesh": {"kind": "twisted2d", "counts": [2, 1], "lengths": [2, 1]},
            "material": [{"E": 1e8, "nu": 0.2}, {"E": 2e8, "nu": 0.3}],
            "load": {"kind": "gravity", "density": 3000.0}
        })";
        const SolveConfig sc = parse_solve_config(layered);
        const std::vector<KelvinMaterial> mats = sc.material.materials(2, 2);
        REQUIRE(mats.size() == 2);
        CHECK(mats[0].C(2, 2) == doctest::Approx(2 * lame_mu(1e8, 0.2)));
        CHECK(mats[1].C(2, 2) == doctest::Approx(2 * lame_mu(2e8, 0.3)));
        CHECK_THROWS_WITH_AS(sc.material.materials(2, 3), doctest::Contains("per-cell"),
                             ConfigError);
    }
}

TEST_CASE("generate and sweep configs")
{
    const GenerateConfig gen = parse_generate_config(R"({
        "mesh": {"kind": "layered3d", "nx": 2, "ny": 2, "nz": 2,
                 "lx": 2.0, "ly": 2.0, "lz": 1.0, "pillar_tilt": 0.1,
                 "horizon_wave": 0.05, "triangulate": true},
        "output": {"vtk": "grid.vtk", "mesh": "grid.pvmesh"}
    })");
    const PolyMesh mesh = gen.mesh.build();
    CHECK(mesh.num_cells() == 8);
    for (const auto& f : mesh.faces)
        CHECK(f.size() == 3);

    CHECK_THROWS_WITH_AS(parse_generate_config(R"({"mesh": {"kind": "twisted2d",
        "counts": [2,2], "lengths": [1,1]}, "output": {}})"),
                         doctest::Contains("output"), ConfigError);

    const SweepRunConfig sweep = parse_sweep_config(R"({
        "nx": 4, "ny": 4, "length": 15.0, "twist": 0.75,
        "material": {"E": 3e8, "nu": 0.3},
        "load": {"kind": "gravity", "density": 3000.0},
        "aspect_ratios": [1.0, 10.0],
        "methods": ["projection", "dgrad"],
        "stabilizations": ["alpha_g", "alpha_n"],
        "grids": ["twisted", "extra_nodes"],
        "output": {"csv": "sweep.csv"}
    })");
    CHECK(sweep.request.aspect_ratios.size() == 2);
    CHECK(sweep.request.methods.size() == 2);
    CHECK(sweep.request.stabs.size() == 2);
    CHECK(sweep.request.grids.size() == 2);
    CHECK(sweep.out_csv == "sweep.csv");

    CHECK_THROWS_WITH_AS(parse_sweep_config(R"({
        "material": {"E": 3e8, "nu": 0.3},
        "load": {"kind": "gravity", "density": 3000.0},
        "aspect_ratios": [],
        "methods": ["projection"],
        "output": {"csv": "s.csv"}
    })"), doctest::Contains("empty sweep"), ConfigError);
}

TEST_CASE("grdecl files read from disk")
{
    TempDir tmp;
    const std::string deck =
        "SPECGRID\n 1 1 1 1 F /\n"
        "COORD\n 0 0 0 0 0 1  1 0 0 1 0 1  0 1 0 0 1 1  1 1 0 1 1 1 /\n"
        "ZCORN\n 4*0.0 4*1.0 /\n";
    write_text_file(tmp.file("cube.grdecl"), deck);
    const CornerPointSpec spec = read_grdecl_file(tmp.file("cube.grdecl"));
    CHECK(spec.nx == 1);
    CHECK(build_cornerpoint(spec).num_nodes() == 8);
    CHECK_THROWS(read_grdecl_file(tmp.file("missing.grdecl")));

    // config-driven build from the same file
    const std::string cfg = R"({
        "mesh": {"kind": "grdecl", "path": ")" + tmp.file("cube.grdecl") + R"("},
        "output": {"vtk": "out.vtk"}
    })";
    const GenerateConfig gen = parse_generate_config(cfg);
    CHECK(gen.mesh.build().num_cells() == 1);
}
