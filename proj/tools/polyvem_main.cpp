#include "polyvem/acceptance.hpp"
#include "polyvem/config.hpp"
#include "polyvem/io.hpp"
#include "polyvem/system.hpp"
#include "polyvem/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

int resolve_threads(int flag_value)
{
    if (flag_value > 0)
        return flag_value;
    if (const char* env = std::getenv("POLYVEM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return 1;
}

std::string out_path(const std::string& out_dir, const std::string& name)
{
    if (name.empty() || out_dir.empty() || std::filesystem::path(name).is_absolute())
        return name;
    std::filesystem::create_directories(out_dir);
    return (std::filesystem::path(out_dir) / name).string();
}

// per-cell Frobenius norm of the projected strain
Eigen::VectorXd cell_strain_norms(const polyvem::PolyMesh& mesh,
                                  const polyvem::AssembledOperator& assembled,
                                  const polyvem::NodalField& u)
{
    Eigen::VectorXd out(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const polyvem::ElementOperators& ops = assembled.element_ops[c];
        Eigen::VectorXd dofs(ops.num_dofs());
        for (int i = 0; i < ops.num_nodes(); ++i)
            dofs.segment(mesh.dim * i, mesh.dim) =
                u.segment(mesh.dim * ops.nodes[i], mesh.dim);
        out(c) = (ops.Wc * dofs).norm();
    }
    return out;
}

int run_generate(const std::string& config_path, const std::string& out_dir)
{
    const polyvem::GenerateConfig config =
        polyvem::parse_generate_config(polyvem::read_text_file(config_path));
    const polyvem::PolyMesh mesh = config.mesh.build();
    polyvem::compute_geometry(mesh); // validates

    if (!config.out_mesh.empty())
        polyvem::write_pvmesh(mesh, out_path(out_dir, config.out_mesh));
    if (!config.out_vtk.empty())
        polyvem::write_vtk(mesh, out_path(out_dir, config.out_vtk));
    std::cout << "generated mesh: " << mesh.num_nodes() << " nodes, "
              << mesh.num_faces() << " faces, " << mesh.num_cells() << " cells\n";
    return exit_ok;
}

int run_solve(const std::string& config_path, const std::string& out_dir,
              int threads, double tol_override)
{
    const polyvem::SolveConfig config =
        polyvem::parse_solve_config(polyvem::read_text_file(config_path));
    const double tol = tol_override > 0 ? tol_override : config.tol;

    const auto t0 = std::chrono::steady_clock::now();
    const polyvem::PolyMesh mesh = config.mesh.build();
    const polyvem::GeometryCache geom = polyvem::compute_geometry(mesh);
    const polyvem::CompactionCase c = config.compaction_case(mesh);

    const polyvem::AssembledOperator assembled = polyvem::assemble_global(
        mesh, geom, config.material.materials(mesh.dim, mesh.num_cells()),
        polyvem::StabilizationChoice{config.stabilization, 0.0}, threads);
    const polyvem::CompactionResult result = polyvem::solve_compaction(
        c, mesh, geom, config.load.method,
        polyvem::StabilizationChoice{config.stabilization, 0.0}, threads, tol, &assembled);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    if (!config.out_vtk.empty()) {
        polyvem::VtkFields fields;
        fields.displacement = result.u;
        fields.cell_scalars = cell_strain_norms(mesh, assembled, result.u);
        polyvem::write_vtk(mesh, out_path(out_dir, config.out_vtk), fields);
    }

    std::ostringstream summary;
    summary.precision(12);
    summary << "dofs " << result.report.dofs << "\n"
            << "residual " << result.report.residual << "\n"
            << "solver " << (result.report.direct ? "direct" : "cg") << "\n"
            << "wall_time_s " << seconds << "\n";
    std::cout << summary.str();
    if (!config.out_summary.empty())
        polyvem::write_text_file(out_path(out_dir, config.out_summary), summary.str());
    return exit_ok;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, int threads)
{
    polyvem::SweepRunConfig config =
        polyvem::parse_sweep_config(polyvem::read_text_file(config_path));
    config.request.threads = threads;

    const std::vector<polyvem::SweepRow> rows = polyvem::aspect_ratio_sweep(config.request);
    polyvem::write_text_file(out_path(out_dir, config.out_csv), polyvem::sweep_csv(rows));

    int failures = 0;
    for (const polyvem::SweepRow& r : rows)
        if (r.failed) {
            ++failures;
            std::cerr << "row failed (ar=" << r.ar << ", " << polyvem::to_string(r.method)
                      << "): " << r.error << "\n";
        }
    std::cout << rows.size() << " rows written\n";
    return failures == 0 ? exit_ok : exit_numeric;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"polyvem: first-order virtual element method for linear elasticity "
                 "on general polyhedral meshes"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    double tol = 0.0;

    CLI::App* generate = app.add_subcommand("generate", "build a mesh and write it out");
    generate->add_option("--config", config_path, "JSON config")->required();
    generate->add_option("--out", out_dir, "output directory");

    CLI::App* solve = app.add_subcommand("solve", "run the full elasticity pipeline");
    solve->add_option("--config", config_path, "JSON config")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--threads", threads, "assembly threads (env POLYVEM_THREADS)");
    solve->add_option("--tol", tol, "solver residual tolerance");

    CLI::App* sweep = app.add_subcommand("sweep", "aspect-ratio sweep, CSV output");
    sweep->add_option("--config", config_path, "JSON config")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--threads", threads, "assembly threads");

    CLI::App* verify = app.add_subcommand("verify-paper", "run the acceptance suite");
    verify->add_option("--threads", threads, "assembly threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return run_generate(config_path, out_dir);
        if (solve->parsed())
            return run_solve(config_path, out_dir, resolve_threads(threads), tol);
        if (sweep->parsed())
            return run_sweep(config_path, out_dir, resolve_threads(threads));
        if (verify->parsed()) {
            const int failed = polyvem::acceptance::run_and_report(
                std::cout, resolve_threads(threads));
            return failed == 0 ? exit_ok : exit_numeric;
        }
    } catch (const polyvem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_ok;
}
