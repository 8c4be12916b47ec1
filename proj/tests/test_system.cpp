#include "polyvem/system.hpp"

#include "polyvem/grid_gen.hpp"

#include <doctest.h>

#include <random>

using namespace polyvem;

namespace {

const KelvinMaterial mat2 = isotropic_from_young(3e8, 0.3, 2);
const KelvinMaterial mat3 = isotropic_from_young(3e8, 0.3, 3);

std::vector<int> boundary_nodes(const PolyMesh& mesh)
{
    std::vector<char> on(mesh.num_nodes(), 0);
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (mesh.is_boundary_face(f))
            for (int n : mesh.faces[f])
                on[n] = 1;
    std::vector<int> out;
    for (int n = 0; n < mesh.num_nodes(); ++n)
        if (on[n])
            out.push_back(n);
    return out;
}

} // namespace

TEST_CASE("global assembly")
{
    SUBCASE("single cell equals the element matrix")
    {
        const PolyMesh mesh = twisted_cartesian({1, 1}, {1.0, 1.0}, 0.0);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator assembled =
            assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());
        const ElementOperators& ops = assembled.element_ops[0];
        const Eigen::MatrixXd K_elem = element_stiffness(
            ops, mat2, mesh, StabilizationChoice::alpha_g());
        // element dofs follow the perimeter node order; map to global dofs
        const Eigen::MatrixXd K_glob(assembled.K);
        for (int i = 0; i < ops.num_nodes(); ++i)
            for (int j = 0; j < ops.num_nodes(); ++j)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        CHECK(K_glob(2 * ops.nodes[i] + a, 2 * ops.nodes[j] + b)
                              == K_elem(2 * i + a, 2 * j + b));
    }

    SUBCASE("row sums vanish: translations in the kernel")
    {
        const PolyMesh mesh = twisted_cartesian({2, 1}, {2.0, 1.0}, 0.0);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator assembled =
            assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());
        NodalField t = NodalField::Zero(assembled.K.rows());
        for (int n = 0; n < mesh.num_nodes(); ++n)
            t(2 * n) = 1.0;
        CHECK((assembled.K * t).cwiseAbs().maxCoeff()
              <= 1e-10 * Eigen::MatrixXd(assembled.K).norm());
    }

    SUBCASE("global matrix is symmetric positive semidefinite")
    {
        const PolyMesh mesh = twisted_cartesian({3, 3}, {1.0, 1.0}, 0.02);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator assembled =
            assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());
        const Eigen::MatrixXd K(assembled.K);
        CHECK((K - K.transpose()).norm() <= 1e-12 * K.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
    }

    SUBCASE("threaded assembly is identical to serial")
    {
        const PolyMesh mesh = twisted_cartesian({4, 4, 3}, {2.0, 2.0, 1.0}, 0.03);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator serial =
            assemble_global(mesh, geom, {mat3}, StabilizationChoice::alpha_g(), 1);
        const AssembledOperator threaded =
            assemble_global(mesh, geom, {mat3}, StabilizationChoice::alpha_g(), 2);
        CHECK((Eigen::MatrixXd(serial.K) - Eigen::MatrixXd(threaded.K)).norm() == 0.0);
    }

    SUBCASE("per-cell materials and size checking")
    {
        const PolyMesh mesh = twisted_cartesian({2, 1}, {2.0, 1.0}, 0.0);
        const GeometryCache geom = compute_geometry(mesh);
        CHECK_THROWS(assemble_global(mesh, geom, {mat2, mat2, mat2},
                                     StabilizationChoice::alpha_g()));
        const AssembledOperator two =
            assemble_global(mesh, geom, {mat2, mat2}, StabilizationChoice::alpha_g());
        CHECK(two.K.rows() == 2 * mesh.num_nodes());
    }
}

TEST_CASE("boundary conditions")
{
    const PolyMesh mesh = twisted_cartesian({2, 2}, {2.0, 2.0}, 0.0);
    const GeometryCache geom = compute_geometry(mesh);
    const AssembledOperator assembled =
        assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());

    SUBCASE("doubly constrained dofs are rejected")
    {
        BoundarySpec bcs;
        bcs.fix_node(0, Eigen::Vector2d::Zero(), 2);
        CHECK_THROWS(bcs.add_rolling({0}, 0, 2));
    }

    SUBCASE("traction forces sum to traction times area")
    {
        int face = -1;
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (mesh.is_boundary_face(f))
                face = f;
        BoundarySpec bcs;
        bcs.fix_node(0, Eigen::Vector2d::Zero(), 2); // keep the system reduced
        const Eigen::Vector2d t(3.0, -1.0);
        bcs.add_traction(face, t);
        const LinearSystem sys = apply_bcs(assembled.K, NodalField(), bcs, mesh, geom);

        NodalField full = NodalField::Zero(2 * mesh.num_nodes());
        for (size_t i = 0; i < sys.free_dofs.size(); ++i)
            full(sys.free_dofs[i]) = sys.rhs(i);
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int n = 0; n < mesh.num_nodes(); ++n)
            sum += full.segment(2 * n, 2);
        // node 0 is clamped; it may carry part of the traction, so compare
        // against the assembled contribution
        Eigen::Vector2d direct = Eigen::Vector2d::Zero();
        for (int n : mesh.faces[face])
            if (n != 0)
                direct += face_node_integral(mesh, geom, face, n) * t;
        CHECK((sum - direct).norm() <= 1e-12 * direct.norm());

        // partition of unity over the whole face
        double fni_sum = 0.0;
        for (int n : mesh.faces[face])
            fni_sum += face_node_integral(mesh, geom, face, n);
        CHECK(fni_sum == doctest::Approx(geom.face_area[face]).epsilon(1e-13));

        BoundarySpec bad;
        bad.fix_node(0, Eigen::Vector2d::Zero(), 2);
        bad.add_traction(100, t);
        CHECK_THROWS(apply_bcs(assembled.K, NodalField(), bad, mesh, geom));
    }

    SUBCASE("all-dof Dirichlet leaves an empty system")
    {
        BoundarySpec bcs;
        for (int n = 0; n < mesh.num_nodes(); ++n)
            bcs.fix_node(n, Eigen::Vector2d(1.0, 2.0), 2);
        const LinearSystem sys = apply_bcs(assembled.K, NodalField(), bcs, mesh, geom);
        CHECK(sys.K.rows() == 0);
        const NodalField u = solve(sys);
        for (int n = 0; n < mesh.num_nodes(); ++n) {
            CHECK(u(2 * n) == 1.0);
            CHECK(u(2 * n + 1) == 2.0);
        }
    }

    SUBCASE("unconstrained systems are reported singular")
    {
        BoundarySpec bcs;
        const LinearSystem sys = apply_bcs(assembled.K, NodalField(), bcs, mesh, geom);
        CHECK_THROWS_WITH_AS(solve(sys), doctest::Contains("singular system"),
                             std::runtime_error);
    }
}

TEST_CASE("solve")
{
    SUBCASE("zero right-hand side gives zero")
    {
        const PolyMesh mesh = twisted_cartesian({2, 2}, {1.0, 1.0}, 0.0);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator assembled =
            assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());
        BoundarySpec bcs;
        bcs.fix_node(0, Eigen::Vector2d::Zero(), 2);
        const NodalField u = solve(apply_bcs(assembled.K, NodalField(), bcs, mesh, geom));
        CHECK(u.norm() == 0.0);
    }

    SUBCASE("cube under gravity with clamped bottom")
    {
        const PolyMesh mesh = twisted_cartesian({1, 1, 1}, {1.0, 1.0, 1.0}, 0.0);
        const GeometryCache geom = compute_geometry(mesh);
        const AssembledOperator assembled =
            assemble_global(mesh, geom, {mat3}, StabilizationChoice::alpha_g());
        BoundarySpec bcs;
        for (int n = 0; n < mesh.num_nodes(); ++n)
            if (mesh.coords(2, n) == 0.0)
                bcs.fix_node(n, Eigen::Vector3d::Zero(), 3);
        NodalField f = NodalField::Zero(3 * mesh.num_nodes());
        for (int n = 0; n < mesh.num_nodes(); ++n)
            f(3 * n + 2) = -1000.0;
        SolveReport report;
        const NodalField u = solve(apply_bcs(assembled.K, f, bcs, mesh, geom), 1e-10, &report);
        CHECK(report.residual <= 1e-10);
        CHECK(u.allFinite());
        CHECK(u.cwiseAbs().maxCoeff() > 0.0);
    }

    SUBCASE("indefinite matrices are rejected")
    {
        LinearSystem sys;
        sys.full_size = 4;
        sys.free_dofs = {0, 1};
        sys.full_values = Eigen::VectorXd::Zero(4);
        sys.K.resize(2, 2);
        std::vector<Eigen::Triplet<double>> trip = {{0, 0, 1.0}, {1, 1, -1.0}};
        sys.K.setFromTriplets(trip.begin(), trip.end());
        sys.rhs = Eigen::Vector2d(1.0, 1.0);
        CHECK_THROWS(solve(sys));
    }
}

TEST_CASE("equilibrium of reactions under full Dirichlet")
{
    // clamp the whole boundary, apply a body load, check that the reaction
    // forces balance the applied load
    const PolyMesh mesh = twisted_cartesian({4, 4}, {1.0, 1.0}, 0.02);
    const GeometryCache geom = compute_geometry(mesh);
    const AssembledOperator assembled =
        assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());

    NodalField f = NodalField::Zero(2 * mesh.num_nodes());
    for (int n = 0; n < mesh.num_nodes(); ++n)
        f.segment(2 * n, 2) = geom.total_volume() / mesh.num_nodes()
            * Eigen::Vector2d(0.3, -1.0);

    BoundarySpec bcs;
    for (int n : boundary_nodes(mesh))
        bcs.fix_node(n, Eigen::Vector2d::Zero(), 2);
    const LinearSystem sys = apply_bcs(assembled.K, f, bcs, mesh, geom);
    const NodalField u = solve(sys, 1e-12);

    const NodalField reactions = assembled.K * u - f;
    // reactions live on constrained dofs only
    for (size_t i = 0; i < sys.free_dofs.size(); ++i)
        CHECK(std::abs(reactions(sys.free_dofs[i])) <= 1e-10 * f.cwiseAbs().maxCoeff());
    Eigen::Vector2d total = Eigen::Vector2d::Zero();
    for (int n = 0; n < mesh.num_nodes(); ++n)
        total += reactions.segment(2 * n, 2);
    Eigen::Vector2d applied = Eigen::Vector2d::Zero();
    for (int n = 0; n < mesh.num_nodes(); ++n)
        applied += f.segment(2 * n, 2);
    CHECK((total + applied).norm() <= 1e-10 * applied.norm());
}

TEST_CASE("patch test on a random polygon mesh")
{
    // Voronoi-like irregular mesh is overkill here; a twisted grid with
    // midnodes exercises polygonal cells
    const PolyMesh base = twisted_cartesian({4, 4}, {2.0, 2.0}, 0.06);
    const PolyMesh mesh = insert_edge_midnodes(base, direction_edge_filter(1));
    const GeometryCache geom = compute_geometry(mesh);
    const AssembledOperator assembled =
        assemble_global(mesh, geom, {mat2}, StabilizationChoice::alpha_g());

    std::mt19937 rng(19);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::Matrix2d A;
    A << unif(rng), unif(rng), unif(rng), unif(rng);
    const Eigen::Vector2d b(unif(rng), unif(rng));

    BoundarySpec bcs;
    for (int n : boundary_nodes(mesh))
        bcs.fix_node(n, A * mesh.coords.col(n) + b, 2);
    const NodalField u = solve(apply_bcs(assembled.K, NodalField(), bcs, mesh, geom), 1e-12);

    double err = 0.0, scale = 0.0;
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        const Eigen::Vector2d exact = A * mesh.coords.col(n) + b;
        err = std::max(err, (u.segment(2 * n, 2) - exact).norm());
        scale = std::max(scale, exact.norm());
    }
    CHECK(err <= 1e-9 * scale);
}
