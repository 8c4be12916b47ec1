#include "polyvem/verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace polyvem {

const char* to_string(LoadMethod m)
{
    switch (m) {
    case LoadMethod::Projection: return "projection";
    case LoadMethod::NodalQuadrature: return "nodal";
    case LoadMethod::DiscreteGradient: return "dgrad";
    }
    return "?";
}

const char* to_string(StabilizationKind k)
{
    switch (k) {
    case StabilizationKind::AlphaG: return "alpha_g";
    case StabilizationKind::AlphaN: return "alpha_n";
    case StabilizationKind::FemExact: return "fem2d";
    case StabilizationKind::Custom: return "custom";
    }
    return "?";
}

const char* to_string(SweepGrid g)
{
    return g == SweepGrid::Twisted ? "twisted" : "extra_nodes";
}

double CompactionCase::gamma() const
{
    const double c22 = lame_lambda(young, poisson) + 2.0 * lame_mu(young, poisson);
    return -gravity * density / (2.0 * c22);
}

Eigen::VectorXd compaction_exact(const CompactionCase& c, const Eigen::VectorXd& x)
{
    const int v = c.dim - 1;
    const double L = c.vertical_length();
    const double y = x(v) - c.vertical_origin;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(c.dim);
    if (c.load == CompactionCase::Load::Gravity) {
        u(v) = c.gamma() * (L * L - (y - L) * (y - L));
    } else {
        const double czz = lame_lambda(c.young, c.poisson) + 2.0 * lame_mu(c.young, c.poisson);
        u(v) = -(c.traction / czz) * y;
    }
    return u;
}

NodalField compaction_exact_field(const CompactionCase& c, const PolyMesh& mesh)
{
    NodalField u(c.dim * mesh.num_nodes());
    for (int n = 0; n < mesh.num_nodes(); ++n)
        u.segment(c.dim * n, c.dim) = compaction_exact(c, mesh.coords.col(n));
    return u;
}

BoundarySpec compaction_bcs(const CompactionCase& c, const PolyMesh& mesh)
{
    const int d = mesh.dim;
    const int v = d - 1;
    const Eigen::MatrixXd box = mesh.bounding_box();
    const double tol = 1e-9 * (box.col(1) - box.col(0)).norm();

    BoundarySpec bcs;
    std::vector<char> clamped(mesh.num_nodes(), 0);
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        if (std::abs(mesh.coords(v, n) - box(v, 0)) <= tol) {
            bcs.fix_node(n, Eigen::VectorXd::Zero(d), d);
            clamped[n] = 1;
        }
    }
    for (int axis = 0; axis < v; ++axis) {
        std::vector<int> side;
        for (int n = 0; n < mesh.num_nodes(); ++n) {
            if (clamped[n])
                continue;
            const double x = mesh.coords(axis, n);
            if (std::abs(x - box(axis, 0)) <= tol || std::abs(x - box(axis, 1)) <= tol)
                side.push_back(n);
        }
        bcs.add_rolling(side, axis, d);
    }

    if (c.load == CompactionCase::Load::TopTraction) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
        t(v) = -c.traction;
        for (int f = 0; f < mesh.num_faces(); ++f) {
            if (!mesh.is_boundary_face(f))
                continue;
            bool on_top = true;
            for (int n : mesh.faces[f])
                on_top = on_top && std::abs(mesh.coords(v, n) - box(v, 1)) <= tol;
            if (on_top)
                bcs.add_traction(f, t);
        }
    }
    return bcs;
}

CompactionResult solve_compaction(const CompactionCase& c, const PolyMesh& mesh,
                                  const GeometryCache& geom, LoadMethod method,
                                  const StabilizationChoice& stab, int threads, double tol,
                                  const AssembledOperator* prebuilt)
{
    if (mesh.dim != c.dim)
        throw std::invalid_argument("solve_compaction: case/mesh dimension mismatch");

    const KelvinMaterial mat = c.material();
    AssembledOperator local;
    if (!prebuilt)
        local = assemble_global(mesh, geom, {mat}, stab, threads);
    const AssembledOperator& assembled = prebuilt ? *prebuilt : local;

    const int v = c.dim - 1;
    NodalField load = NodalField::Zero(c.dim * mesh.num_nodes());
    if (c.load == CompactionCase::Load::Gravity) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(c.dim);
        f(v) = -c.density * c.gravity;
        const VectorFieldFn body = [f](const Eigen::VectorXd&) { return f; };
        switch (method) {
        case LoadMethod::Projection:
            load = load_projection(body, mesh, geom, assembled.element_ops);
            break;
        case LoadMethod::NodalQuadrature:
            load = load_nodal_quadrature(body, mesh, geom);
            break;
        case LoadMethod::DiscreteGradient: {
            // potential of the body force, shifted to vanish at the free top
            const double top = mesh.bounding_box()(v, 1);
            CellField psi(mesh.num_cells());
            for (int e = 0; e < mesh.num_cells(); ++e)
                psi(e) = c.density * c.gravity * (top - geom.cell_centroid(v, e));
            load = discrete_gradient(psi, mesh, geom);
            break;
        }
        }
    }

    const BoundarySpec bcs = compaction_bcs(c, mesh);
    const LinearSystem sys = apply_bcs(assembled.K, load, bcs, mesh, geom);
    CompactionResult res;
    res.u = solve(sys, tol, &res.report);
    return res;
}

ErrorMetrics error_metrics(const NodalField& u_h, const NodalField& u_exact,
                           int dim, int component)
{
    if (u_h.size() != u_exact.size())
        throw std::invalid_argument("error_metrics: field size mismatch");
    const int n = static_cast<int>(u_h.size()) / dim;

    ErrorMetrics m;
    double exact_max = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < dim; ++k) {
            if (component >= 0 && k != component)
                continue;
            const double e = u_h(dim * i + k) - u_exact(dim * i + k);
            m.max_abs = std::max(m.max_abs, std::abs(e));
            exact_max = std::max(exact_max, std::abs(u_exact(dim * i + k)));
            sum2 += e * e;
        }
    }
    m.l2 = std::sqrt(sum2);
    m.rel_max = exact_max > 0 ? m.max_abs / exact_max : m.max_abs;
    return m;
}

Eigen::Matrix2d q1_kernel_energies(double h1, double h2, const KelvinMaterial& mat)
{
    Eigen::Matrix<double, 2, 4> corners;
    corners << -h1, h1, h1, -h1,
               -h2, -h2, h2, h2;
    const Eigen::MatrixXd K = fem_q1_stiffness(corners, mat);

    // bubble x1 x2 / (h1 h2) at the corners, in perimeter order
    const double phi[4] = {1.0, -1.0, 1.0, -1.0};
    Eigen::Matrix2d E = Eigen::Matrix2d::Zero();
    for (int di = 0; di < 2; ++di) {
        for (int dj = 0; dj < 2; ++dj) {
            Eigen::VectorXd ui = Eigen::VectorXd::Zero(8);
            Eigen::VectorXd uj = Eigen::VectorXd::Zero(8);
            for (int a = 0; a < 4; ++a) {
                ui(2 * a + di) = phi[a];
                uj(2 * a + dj) = phi[a];
            }
            E(di, dj) = ui.dot(K * uj);
        }
    }
    return E;
}

PolyMesh sweep_mesh(const SweepRequest& req, double ar, SweepGrid grid)
{
    const double L = req.base.vertical_length();
    PolyMesh mesh = twisted_cartesian({req.nx, req.ny}, {L, L}, req.twist_amplitude);
    if (ar != 1.0)
        mesh = scale_mesh(mesh, Eigen::Vector2d(ar, 1.0));
    if (grid == SweepGrid::TwistedExtraNodes)
        mesh = insert_edge_midnodes(mesh, direction_edge_filter(1));
    return mesh;
}

std::vector<SweepRow> aspect_ratio_sweep(const SweepRequest& req)
{
    if (req.aspect_ratios.empty())
        throw std::invalid_argument("aspect_ratio_sweep: empty sweep");
    if (req.base.dim != 2)
        throw std::invalid_argument("aspect_ratio_sweep: 2D cases only");

    std::vector<SweepRow> rows;
    for (SweepGrid grid : req.grids) {
        for (StabilizationKind stab : req.stabs) {
            for (LoadMethod method : req.methods) {
                const size_t first = rows.size();
                for (double ar : req.aspect_ratios) {
                    SweepRow row;
                    row.ar = ar;
                    row.method = method;
                    row.stab = stab;
                    row.grid = grid;
                    try {
                        const PolyMesh mesh = sweep_mesh(req, ar, grid);
                        const GeometryCache geom = compute_geometry(mesh);
                        CompactionCase c = req.base;
                        c.lengths = {ar * c.vertical_length(), c.vertical_length()};
                        const CompactionResult res = solve_compaction(
                            c, mesh, geom, method, StabilizationChoice{stab, 0.0},
                            req.threads);
                        const NodalField exact = compaction_exact_field(c, mesh);
                        const ErrorMetrics m = error_metrics(res.u, exact, 2, 1);
                        row.max_err = m.max_abs;
                        row.rel_err = m.rel_max;
                        row.l2_err = m.l2;
                    } catch (const std::exception& e) {
                        row.failed = true;
                        row.error = e.what();
                        row.max_err = row.rel_err = row.l2_err =
                            std::numeric_limits<double>::quiet_NaN();
                    }
                    rows.push_back(std::move(row));
                }
                // least-squares slope of log(max_err) vs log(ar) per series
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                int cnt = 0;
                for (size_t i = first; i < rows.size(); ++i) {
                    if (rows[i].failed || !(rows[i].max_err > 0))
                        continue;
                    const double lx = std::log(rows[i].ar), ly = std::log(rows[i].max_err);
                    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
                    ++cnt;
                }
                const double denom = cnt * sxx - sx * sx;
                const double slope = (cnt >= 2 && std::abs(denom) > 1e-300)
                    ? (cnt * sxy - sx * sy) / denom : 0.0;
                for (size_t i = first; i < rows.size(); ++i)
                    rows[i].slope = slope;
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream out;
    out.precision(17);
    out << "ar,method,stab,grid,max_err,rel_err,l2_err,slope\n";
    for (const SweepRow& r : rows) {
        out << r.ar << ',' << to_string(r.method) << ',' << to_string(r.stab) << ','
            << to_string(r.grid) << ',' << r.max_err << ',' << r.rel_err << ','
            << r.l2_err << ',' << r.slope << '\n';
    }
    return out.str();
}

} // namespace polyvem
