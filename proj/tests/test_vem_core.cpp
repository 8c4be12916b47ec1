#include "polyvem/vem_core.hpp"

#include "polyvem/grid_gen.hpp"
#include "polyvem/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace polyvem;

namespace {

Eigen::Matrix2d q1_kernel_energies_probe(double h1, double h2, double lambda, double mu)
{
    return q1_kernel_energies(h1, h2, isotropic_stiffness(lambda, mu, 2));
}

PolyMesh rectangle_cell(double h1, double h2)
{
    Eigen::MatrixXd coords(2, 4);
    coords << -h1, h1, h1, -h1,
              -h2, -h2, h2, h2;
    std::vector<std::vector<int>> faces = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    std::vector<std::vector<CellFace>> cells = {{{0, 1}, {1, 1}, {2, 1}, {3, 1}}};
    return build_mesh(coords, std::move(faces), std::move(cells));
}

PolyMesh unit_cube()
{
    LayeredGridOptions opt;
    opt.nx = opt.ny = opt.nz = 1;
    opt.lx = opt.ly = opt.lz = 1.0;
    return build_cornerpoint(layered_cornerpoint(opt));
}

// dof vector of the bilinear bubble x1 x2 / (h1 h2) acting in `direction`;
// local node order follows the cell perimeter
Eigen::VectorXd bubble_dofs(const ElementOperators& ops, const PolyMesh& mesh,
                            double h1, double h2, int direction)
{
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ops.num_dofs());
    for (int i = 0; i < ops.num_nodes(); ++i) {
        const Eigen::Vector2d x = mesh.coords.col(ops.nodes[i]);
        u(2 * i + direction) = x(0) * x(1) / (h1 * h2);
    }
    return u;
}

Eigen::VectorXd affine_dofs(const ElementOperators& ops, const PolyMesh& mesh,
                            const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    const int d = ops.dim;
    Eigen::VectorXd u(ops.num_dofs());
    for (int i = 0; i < ops.num_nodes(); ++i)
        u.segment(d * i, d) = A * mesh.coords.col(ops.nodes[i]) + b;
    return u;
}

} // namespace

TEST_CASE("q vectors of the rectangle")
{
    const double h1 = 2.0, h2 = 0.5;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const Eigen::MatrixXd q = q_vectors(mesh, geom, 0);

    // hand evaluation of the |f|/2 rule: corner at (sx h1, sy h2) gets
    // q = (sx h2, sy h1)
    const std::vector<int> loop = mesh.cell_nodes(0);
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d x = mesh.coords.col(loop[i]);
        CHECK(q(i, 0) == doctest::Approx((x(0) > 0 ? 1 : -1) * h2).epsilon(1e-14));
        CHECK(q(i, 1) == doctest::Approx((x(1) > 0 ? 1 : -1) * h1).epsilon(1e-14));
    }
    CHECK(q.colwise().sum().norm() == doctest::Approx(0.0)); // sum q = 0
}

TEST_CASE("q moment identity on the unit cube")
{
    const PolyMesh mesh = unit_cube();
    const GeometryCache geom = compute_geometry(mesh);
    const Eigen::MatrixXd q = q_vectors(mesh, geom, 0);
    const std::vector<int> nodes = mesh.cell_nodes(0);

    // sum_i q^i (x) x_i = |E| I
    Eigen::Matrix3d moment = Eigen::Matrix3d::Zero();
    for (size_t i = 0; i < nodes.size(); ++i)
        moment += q.row(i).transpose() * mesh.coords.col(nodes[i]).transpose();
    CHECK((moment - geom.cell_volume[0] * Eigen::Matrix3d::Identity()).norm()
          <= 1e-12);
    CHECK(q.colwise().sum().norm() <= 1e-14);
}

TEST_CASE("rectangle Nc^T Nc closed form")
{
    const double h1 = 3.0, h2 = 0.4;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);

    Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
    expect.diagonal() << 4 * h1 * h1, 4 * h2 * h2, 2 * (h1 * h1 + h2 * h2);
    CHECK((ops.Nc.transpose() * ops.Nc - expect).norm() <= 1e-12 * expect.norm());
}

TEST_CASE("projection reproduces affine fields on the unit cube")
{
    const PolyMesh mesh = unit_cube();
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
        b(i) = unif(rng);
        for (int j = 0; j < 3; ++j)
            A(i, j) = unif(rng);
    }
    const Eigen::VectorXd dofs = affine_dofs(ops, mesh, A, b);
    CHECK((ops.P * dofs - dofs).cwiseAbs().maxCoeff() <= 1e-13 * dofs.norm());
}

TEST_CASE("rectangle bubble lies in the projection kernel")
{
    const double h1 = 1.5, h2 = 0.5;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);

    for (int dir = 0; dir < 2; ++dir) {
        const Eigen::VectorXd u = bubble_dofs(ops, mesh, h1, h2, dir);
        CHECK((ops.Wc * u).norm() <= 1e-14);
        CHECK((ops.Wr * u).norm() <= 1e-14);
        CHECK((ops.P * u).norm() <= 1e-14);
    }
}

TEST_CASE("stabilization coefficients on rectangles")
{
    const KelvinMaterial mat = isotropic_from_young(3e8, 0.3, 2);
    const double trC = mat.trace();

    SUBCASE("alpha_G closed form and square special case")
    {
        for (double eps : {1.0, 2.0, 10.0, 100.0}) {
            const double h2 = 0.5, h1 = eps * h2;
            const PolyMesh mesh = rectangle_cell(h1, h2);
            const GeometryCache geom = compute_geometry(mesh);
            const ElementOperators ops = element_projections(mesh, geom, 0);
            const double alpha = stabilization_alpha(ops, mat, StabilizationKind::AlphaG);
            CHECK(alpha == doctest::Approx((2.0 / 3.0) * trC / (eps + 1.0 / eps))
                               .epsilon(1e-13));
            if (eps == 1.0)
                CHECK(alpha == doctest::Approx(trC / 3.0).epsilon(1e-13));
        }
    }

    SUBCASE("alpha_N from the definition")
    {
        // substituting the diagonal Nc^T Nc gives
        // alpha_N = (2 lambda + 6 mu)/9 (S + 2/S) with S = eps + 1/eps
        for (double eps : {1.0, 2.0, 10.0}) {
            const double h2 = 0.5, h1 = eps * h2;
            const PolyMesh mesh = rectangle_cell(h1, h2);
            const GeometryCache geom = compute_geometry(mesh);
            const ElementOperators ops = element_projections(mesh, geom, 0);
            const double alpha = stabilization_alpha(ops, mat, StabilizationKind::AlphaN);
            const double S = eps + 1.0 / eps;
            CHECK(alpha == doctest::Approx(trC / 9.0 * (S + 2.0 / S)).epsilon(1e-13));
        }
    }

    SUBCASE("scales match the singular values of Nc")
    {
        const double h1 = 2.5, h2 = 0.5;
        const PolyMesh mesh = rectangle_cell(h1, h2);
        const GeometryCache geom = compute_geometry(mesh);
        const ElementOperators ops = element_projections(mesh, geom, 0);
        const StabilizationScales s = stabilization_scales(ops);
        const double vol = geom.cell_volume[0];
        CHECK(stabilization_alpha(ops, mat, StabilizationKind::AlphaG)
              == doctest::Approx(vol * trC / (s.lambda_arithm * s.lambda_arithm)));
        CHECK(stabilization_alpha(ops, mat, StabilizationKind::AlphaN)
              == doctest::Approx(vol * trC / (9.0 * s.lambda_harm * s.lambda_harm)));

        // arithm^2 = trace(Nc^T Nc) = sum of squared singular values
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ops.Nc);
        CHECK(s.lambda_arithm
              == doctest::Approx(svd.singularValues().norm()).epsilon(1e-13));
    }
}

TEST_CASE("alpha invariance under rigid rotation")
{
    const KelvinMaterial mat = isotropic_from_young(3e8, 0.3, 2);
    const double h1 = 4.0, h2 = 0.5;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);
    const double ag = stabilization_alpha(ops, mat, StabilizationKind::AlphaG);
    const double an = stabilization_alpha(ops, mat, StabilizationKind::AlphaN);

    const double angle = 0.7361;
    Eigen::Matrix2d R;
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    PolyMesh rotated = mesh;
    rotated.coords = R * rotated.coords;
    const GeometryCache geom_r = compute_geometry(rotated);
    const ElementOperators ops_r = element_projections(rotated, geom_r, 0);
    CHECK(stabilization_alpha(ops_r, mat, StabilizationKind::AlphaG)
          == doctest::Approx(ag).epsilon(1e-12));
    CHECK(stabilization_alpha(ops_r, mat, StabilizationKind::AlphaN)
          == doctest::Approx(an).epsilon(1e-12));
}

TEST_CASE("element stiffness")
{
    const KelvinMaterial mat = isotropic_from_young(3e8, 0.3, 2);
    const double h1 = 1.0, h2 = 0.5;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);
    const Eigen::MatrixXd K = element_stiffness(ops, mat, mesh,
                                                StabilizationChoice::alpha_g());

    SUBCASE("rigid modes are in the kernel")
    {
        const double scale = K.norm();
        for (int dir = 0; dir < 2; ++dir) {
            Eigen::VectorXd t = Eigen::VectorXd::Zero(8);
            for (int i = 0; i < 4; ++i)
                t(2 * i + dir) = 1.0;
            CHECK((K * t).norm() <= 1e-10 * scale);
        }
        Eigen::VectorXd rot(8); // infinitesimal rotation (-y, x)
        for (int i = 0; i < 4; ++i) {
            const Eigen::Vector2d x = mesh.coords.col(ops.nodes[i]);
            rot(2 * i) = -x(1);
            rot(2 * i + 1) = x(0);
        }
        CHECK((K * rot).norm() <= 1e-10 * scale);
    }

    SUBCASE("kernel dimension equals the rigid modes")
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        const Eigen::VectorXd ev = eig.eigenvalues();
        int zero_modes = 0;
        for (int i = 0; i < ev.size(); ++i)
            if (std::abs(ev(i)) <= 1e-10 * ev.maxCoeff())
                ++zero_modes;
        CHECK(zero_modes == 3);
        CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff()); // PSD
    }

    SUBCASE("bubble stabilization energy is 4 alpha per direction")
    {
        // unit-scale material so the consistency part cannot swamp the
        // stabilization energy with cancellation noise
        const KelvinMaterial unit_mat = isotropic_stiffness(1.0, 1.0, 2);
        const double alpha = 0.37; // any positive scalar
        const Eigen::MatrixXd Kc = element_stiffness(ops, unit_mat, mesh,
                                                     StabilizationChoice::custom(alpha));
        for (int dir = 0; dir < 2; ++dir) {
            const Eigen::VectorXd u = bubble_dofs(ops, mesh, h1, h2, dir);
            // (I - P) u = u for the bubble, so the energy is alpha |u|^2 = 4 alpha
            CHECK(u.dot(Kc * u) == doctest::Approx(4.0 * alpha).epsilon(1e-12));
        }
    }
}

TEST_CASE("consistency energy matches the Q1 oracle on linear fields")
{
    const KelvinMaterial mat = isotropic_stiffness(1.0, 1.0, 2);
    const double h = 0.5; // unit square
    const PolyMesh mesh = rectangle_cell(h, h);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);

    Eigen::Matrix<double, 2, 4> corners;
    for (int i = 0; i < 4; ++i)
        corners.col(i) = mesh.coords.col(ops.nodes[i]);
    const Eigen::MatrixXd Kq1 = fem_q1_stiffness(corners, mat);
    const Eigen::MatrixXd Kc = ops.volume * ops.Wc.transpose() * mat.C * ops.Wc;

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d A;
        A << unif(rng), unif(rng), unif(rng), unif(rng);
        const Eigen::VectorXd u = affine_dofs(ops, mesh, A, Eigen::Vector2d::Zero());
        CHECK(u.dot(Kc * u)
              == doctest::Approx(u.dot(Kq1 * u)).epsilon(1e-12));
    }
}

TEST_CASE("fem-exact stabilization reproduces Q1 on rectangles")
{
    const KelvinMaterial mat = isotropic_from_young(3e8, 0.3, 2);
    const double h1 = 2.0, h2 = 0.5;
    const PolyMesh mesh = rectangle_cell(h1, h2);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);

    Eigen::Matrix<double, 2, 4> corners;
    for (int i = 0; i < 4; ++i)
        corners.col(i) = mesh.coords.col(ops.nodes[i]);
    const Eigen::MatrixXd Kq1 = fem_q1_stiffness(corners, mat);
    const Eigen::MatrixXd K = element_stiffness(ops, mat, mesh,
                                                StabilizationChoice::fem_exact());
    CHECK((K - Kq1).norm() <= 1e-12 * Kq1.norm());
}

TEST_CASE("golden element stiffness pins the dof ordering")
{
    // rectangle [-2,2]x[-0.5,0.5], lambda=2, mu=1, alpha_G; frozen entries
    // guard the node-major / direction-minor dof layout and the assembly
    const PolyMesh mesh = rectangle_cell(2.0, 0.5);
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);
    const KelvinMaterial mat = isotropic_stiffness(2.0, 1.0, 2);
    const Eigen::MatrixXd K = element_stiffness(ops, mat, mesh,
                                                StabilizationChoice::alpha_g());

    REQUIRE(ops.nodes == std::vector<int>{0, 1, 2, 3});
    CHECK(K(0, 0) == doctest::Approx(1.6421568627450978).epsilon(1e-12));
    CHECK(K(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(K(1, 1) == doctest::Approx(4.4546568627450984).epsilon(1e-12));
    CHECK(K(0, 4) == doctest::Approx(-0.8578431372549018).epsilon(1e-12));
    CHECK(K(2, 7) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(K(7, 7) == doctest::Approx(4.4546568627450984).epsilon(1e-12));
    CHECK(K.trace() == doctest::Approx(24.38725490196078).epsilon(1e-12));
}

TEST_CASE("3D element stiffness kernel holds exactly the six rigid modes")
{
    const KelvinMaterial mat = isotropic_from_young(3e8, 0.3, 3);
    LayeredGridOptions opt;
    opt.nx = opt.ny = opt.nz = 1;
    opt.lx = 1.3; opt.ly = 0.9; opt.lz = 0.6;
    opt.pillar_tilt = 0.05;
    const PolyMesh mesh = triangulate_faces(build_cornerpoint(layered_cornerpoint(opt)));
    const GeometryCache geom = compute_geometry(mesh);
    const ElementOperators ops = element_projections(mesh, geom, 0);
    const Eigen::MatrixXd K = element_stiffness(ops, mat, mesh,
                                                StabilizationChoice::alpha_n());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    const Eigen::VectorXd ev = eig.eigenvalues();
    int zero_modes = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) <= 1e-10 * ev.maxCoeff())
            ++zero_modes;
    CHECK(zero_modes == 6);
    CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff());

    // (I - P) annihilates affine dof vectors
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
        b(i) = unif(rng);
        for (int j = 0; j < 3; ++j)
            A(i, j) = unif(rng);
    }
    const Eigen::VectorXd dofs = affine_dofs(ops, mesh, A, b);
    const Eigen::VectorXd rem = dofs - ops.P * dofs;
    CHECK(rem.cwiseAbs().maxCoeff() <= 1e-12 * dofs.norm());
}

TEST_CASE("fem-exact mode is limited to 2D quadrilaterals")
{
    const KelvinMaterial mat3 = isotropic_from_young(3e8, 0.3, 3);
    const PolyMesh cube = unit_cube();
    const GeometryCache geom = compute_geometry(cube);
    const ElementOperators ops = element_projections(cube, geom, 0);
    CHECK_THROWS(element_stiffness(ops, mat3, cube, StabilizationChoice::fem_exact()));
}

TEST_CASE("Q1 oracle kernel integrals match the closed forms")
{
    // int |d phi / d x1|^2 = (4/3)/eps and int |d phi / d x2|^2 = (4/3) eps
    // for phi = x1 x2 / (h1 h2); recovered from two material choices
    for (double eps : {1.0, 2.0, 5.0}) {
        const double h2 = 0.5, h1 = eps * h2;

        // lambda = 0, mu = 1/2: a_ii = int phi_{,i}^2 + (1/2) int phi_{,j}^2
        const Eigen::Matrix2d e1 = q1_kernel_energies_probe(h1, h2, 0.0, 0.5);
        // lambda = 1, mu = 1/2: adds int phi_{,i}^2 on the diagonal
        const Eigen::Matrix2d e2 = q1_kernel_energies_probe(h1, h2, 1.0, 0.5);

        const double i1 = e2(0, 0) - e1(0, 0); // = int phi_{,1}^2
        const double i2 = e2(1, 1) - e1(1, 1); // = int phi_{,2}^2
        CHECK(i1 == doctest::Approx(4.0 / 3.0 / eps).epsilon(1e-13));
        CHECK(i2 == doctest::Approx(4.0 / 3.0 * eps).epsilon(1e-13));
        CHECK(std::abs(e1(0, 1)) <= 1e-13); // kernel block is diagonal

        // direct check of the elasticity kernel energies against the
        // quadrature: a_ii = (lambda + 2 mu) int phi_{,i}^2 + mu int phi_{,j}^2
        const double lambda = 1.0, mu = 0.5;
        CHECK(e2(0, 0) == doctest::Approx((lambda + 2 * mu) * i1 + mu * i2).epsilon(1e-12));
        CHECK(e2(1, 1) == doctest::Approx((lambda + 2 * mu) * i2 + mu * i1).epsilon(1e-12));
    }
}

TEST_CASE("Q1 oracle rejects degenerate quadrilaterals and keeps rigid modes")
{
    const KelvinMaterial mat = isotropic_stiffness(1.0, 1.0, 2);
    Eigen::Matrix<double, 2, 4> corners;
    corners << 0, 1, 1, 0,
               0, 0, 1, 1;
    const Eigen::MatrixXd K = fem_q1_stiffness(corners, mat);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(8);
    for (int i = 0; i < 4; ++i)
        t(2 * i) = 1.0;
    CHECK((K * t).norm() <= 1e-12 * K.norm());

    Eigen::Matrix<double, 2, 4> bad = corners;
    bad.col(2) = bad.col(0); // collapsed corner
    CHECK_THROWS(fem_q1_stiffness(bad, mat));
}
