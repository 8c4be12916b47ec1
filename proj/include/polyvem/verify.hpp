#pragma once

#include "polyvem/grid_gen.hpp"
#include "polyvem/kelvin.hpp"
#include "polyvem/loads.hpp"
#include "polyvem/mesh.hpp"
#include "polyvem/system.hpp"
#include "polyvem/vem_core.hpp"

#include <string>
#include <vector>

namespace polyvem {

enum class LoadMethod { Projection, NodalQuadrature, DiscreteGradient };

const char* to_string(LoadMethod m);
const char* to_string(StabilizationKind k);

// Compaction benchmark: homogeneous isotropic block, clamped bottom, rolling
// sides, free top; either its own weight or a uniform compressive load on
// the top surface.  Both have one-dimensional exact solutions.
struct CompactionCase {
    int dim = 2;
    std::vector<double> lengths;       // Lx, Ly[, Lz]; vertical axis is the last
    double gravity = 9.8;              // m/s^2, acts along -vertical
    double density = 3000.0;           // kg/m^3
    double young = 3e8;                // Pa
    double poisson = 0.3;

    enum class Load { Gravity, TopTraction } load = Load::Gravity;
    double traction = 0.0;             // compression magnitude (Pa)

    double vertical_origin = 0.0;      // vertical coordinate of the clamped bottom

    double vertical_length() const { return lengths.back(); }
    KelvinMaterial material() const { return isotropic_from_young(young, poisson, dim); }
    /// Signed coefficient gamma = -g rho / (2 C22); displacement is downward.
    double gamma() const;
};

/// Exact displacement at a point.  Gravity: u_vert = gamma (L^2 - (y-L)^2)
/// with y measured from the clamped bottom (quadratic); TopTraction:
/// u_vert = -(sigma / C_vv) y (linear).  Lateral components are zero.
Eigen::VectorXd compaction_exact(const CompactionCase& c, const Eigen::VectorXd& x);

/// Exact nodal field on a mesh.
NodalField compaction_exact_field(const CompactionCase& c, const PolyMesh& mesh);

/// Bottom clamp + rolling sides (+ top traction for TopTraction loads),
/// with boundary sets identified from the mesh bounding box.
BoundarySpec compaction_bcs(const CompactionCase& c, const PolyMesh& mesh);

struct CompactionResult {
    NodalField u;
    SolveReport report;
};

/// Full pipeline: assemble, apply the case boundary conditions, build the
/// load with the requested method, solve.  Pass `prebuilt` to reuse an
/// operator assembled with the same mesh/material/stabilization.
CompactionResult solve_compaction(const CompactionCase& c, const PolyMesh& mesh,
                                  const GeometryCache& geom, LoadMethod method,
                                  const StabilizationChoice& stab, int threads = 1,
                                  double tol = 1e-10,
                                  const AssembledOperator* prebuilt = nullptr);

// error metrics ------------------------------------------------------------

struct ErrorMetrics {
    double max_abs = 0.0;   // max over nodes of |u_h - u_exact|
    double rel_max = 0.0;   // max_abs / max |u_exact|
    double l2 = 0.0;        // sqrt(sum of squared nodal errors)
};

/// component = -1 compares full vectors, otherwise a single direction.
ErrorMetrics error_metrics(const NodalField& u_h, const NodalField& u_exact,
                           int dim, int component = -1);

// Q1 oracle ----------------------------------------------------------------

/// Energies of the two bubble kernel modes (x1 x2 / (h1 h2) per direction)
/// of the rectangle [-h1,h1]x[-h2,h2], computed with the Q1 quadrature
/// oracle; returns the 2x2 kernel block of the energy a(phi_i, phi_j).
Eigen::Matrix2d q1_kernel_energies(double h1, double h2, const KelvinMaterial& mat);

// aspect-ratio sweep ---------------------------------------------------------

enum class SweepGrid { Twisted, TwistedExtraNodes };
const char* to_string(SweepGrid g);

struct SweepRequest {
    CompactionCase base;                  // square case; x is stretched by AR
    int nx = 10, ny = 10;
    double twist_amplitude = 0.0;         // meters, applied before stretching
    std::vector<double> aspect_ratios;
    std::vector<LoadMethod> methods;
    std::vector<StabilizationKind> stabs;
    std::vector<SweepGrid> grids;
    int threads = 1;
};

struct SweepRow {
    double ar = 1.0;
    LoadMethod method = LoadMethod::Projection;
    StabilizationKind stab = StabilizationKind::AlphaG;
    SweepGrid grid = SweepGrid::Twisted;
    double max_err = 0.0, rel_err = 0.0, l2_err = 0.0;
    double slope = 0.0;                   // log-log fit per series
    bool failed = false;
    std::string error;
};

/// One solve per (AR, method, stab, grid) combination; vertical-displacement
/// errors against the analytic solution and the fitted log-log slope of
/// max_err versus AR per series.  Failures are recorded per row and the
/// sweep continues.
std::vector<SweepRow> aspect_ratio_sweep(const SweepRequest& req);

/// The twisted (optionally extra-node) sweep grid at a given aspect ratio.
PolyMesh sweep_mesh(const SweepRequest& req, double ar, SweepGrid grid);

/// CSV with header ar,method,stab,grid,max_err,rel_err,l2_err,slope.
std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace polyvem
