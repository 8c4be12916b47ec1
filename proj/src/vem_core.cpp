#include "polyvem/vem_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polyvem {

namespace {

const double sqrt2 = std::sqrt(2.0);

// Kelvin coordinates of sym(e_l (x) g): column block pattern shared by Wc
// (with g the averaged basis gradient) and, transposed, by Nc (with g = r_i).
void fill_sym_block(Eigen::Ref<Eigen::MatrixXd> block, const Eigen::VectorXd& g, int dim)
{
    block.setZero();
    if (dim == 2) {
        block(0, 0) = g(0);
        block(2, 0) = g(1) / sqrt2;
        block(1, 1) = g(1);
        block(2, 1) = g(0) / sqrt2;
    } else {
        block(0, 0) = g(0);
        block(4, 0) = g(2) / sqrt2;
        block(5, 0) = g(1) / sqrt2;
        block(1, 1) = g(1);
        block(3, 1) = g(2) / sqrt2;
        block(5, 1) = g(0) / sqrt2;
        block(2, 2) = g(2);
        block(3, 2) = g(1) / sqrt2;
        block(4, 2) = g(0) / sqrt2;
    }
}

} // namespace

Eigen::MatrixXd q_vectors(const PolyMesh& mesh, const GeometryCache& geom, int cell)
{
    const int d = mesh.dim;
    const std::vector<int> nodes = mesh.cell_nodes(cell);
    const int n = static_cast<int>(nodes.size());

    std::vector<int> local(mesh.num_nodes(), -1);
    for (int i = 0; i < n; ++i)
        local[nodes[i]] = i;

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, d);
    for (const CellFace& cf : mesh.cells[cell]) {
        const std::vector<double> fni = face_node_integrals(mesh, geom, cf.face);
        const Eigen::VectorXd n_out = cf.sign * geom.face_normal.col(cf.face);
        const auto& fn = mesh.faces[cf.face];
        for (size_t j = 0; j < fn.size(); ++j)
            q.row(local[fn[j]]) += fni[j] * n_out.transpose();
    }
    return q;
}

ElementOperators element_projections(const PolyMesh& mesh, const GeometryCache& geom, int cell)
{
    ElementOperators ops;
    ops.cell = cell;
    ops.dim = mesh.dim;
    ops.nodes = mesh.cell_nodes(cell);
    ops.volume = geom.cell_volume[cell];
    if (!(ops.volume > 0))
        throw std::runtime_error("element_projections: degenerate cell " + std::to_string(cell));

    const int d = ops.dim;
    const int n = ops.num_nodes();
    const int nd = ops.num_dofs();
    const int k = kelvin_size(d);
    const int krot = rotation_size(d);

    ops.q = q_vectors(mesh, geom, cell);
    ops.r.resize(n, d);
    for (int i = 0; i < n; ++i)
        ops.r.row(i) = (mesh.coords.col(ops.nodes[i]) - geom.cell_node_average.col(cell)).transpose();

    ops.Wc.resize(k, nd);
    ops.Wr.resize(d + krot, nd);
    ops.Nc.resize(nd, k);
    ops.Nr.resize(nd, d + krot);

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd g = ops.q.row(i).transpose() / ops.volume;
        const Eigen::VectorXd r = ops.r.row(i).transpose();

        fill_sym_block(ops.Wc.block(0, d * i, k, d), g, d);

        Eigen::MatrixXd nc_t(k, d);
        fill_sym_block(nc_t, r, d);
        ops.Nc.block(d * i, 0, d, k) = nc_t.transpose();

        // rigid part: translations then the sqrt(2)-scaled rotation vector
        ops.Wr.block(0, d * i, d + krot, d).setZero();
        ops.Nr.block(d * i, 0, d, d + krot).setZero();
        ops.Wr.block(0, d * i, d, d) = Eigen::MatrixXd::Identity(d, d) / n;
        ops.Nr.block(d * i, 0, d, d) = Eigen::MatrixXd::Identity(d, d);
        if (d == 2) {
            // skew part of <grad nu> for a unit dof, as a rotation scalar
            ops.Wr(2, 2 * i + 0) = -g(1) / sqrt2;
            ops.Wr(2, 2 * i + 1) = g(0) / sqrt2;
            // displacement of a unit rotation at r
            ops.Nr(2 * i + 0, 2) = -r(1) / sqrt2;
            ops.Nr(2 * i + 1, 2) = r(0) / sqrt2;
        } else {
            // columns (1/sqrt2) g x e_l
            ops.Wr.block(3, 3 * i + 0, 3, 1) << 0, g(2) / sqrt2, -g(1) / sqrt2;
            ops.Wr.block(3, 3 * i + 1, 3, 1) << -g(2) / sqrt2, 0, g(0) / sqrt2;
            ops.Wr.block(3, 3 * i + 2, 3, 1) << g(1) / sqrt2, -g(0) / sqrt2, 0;
            // rows (1/sqrt2) e_m x r
            ops.Nr.block(3 * i + 0, 3, 1, 3) << 0, r(2) / sqrt2, -r(1) / sqrt2;
            ops.Nr.block(3 * i + 1, 3, 1, 3) << -r(2) / sqrt2, 0, r(0) / sqrt2;
            ops.Nr.block(3 * i + 2, 3, 1, 3) << r(1) / sqrt2, -r(0) / sqrt2, 0;
        }
    }

    ops.P = ops.Nc * ops.Wc + ops.Nr * ops.Wr;
    return ops;
}

Eigen::VectorXd ElementOperators::projected_dof_at(int local_node, int direction,
                                                   const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& node_average) const
{
    const int col = dim * local_node + direction;
    const Eigen::MatrixXd Q = sym_of_kelvin(Wc.col(col));
    const Eigen::MatrixXd Om = skew_of_rotation(Wr.col(col).tail(rotation_size(dim)), dim);
    return Wr.col(col).head(dim) + (Q + Om) * (x - node_average);
}

StabilizationScales stabilization_scales(const ElementOperators& ops)
{
    const Eigen::MatrixXd NtN = ops.Nc.transpose() * ops.Nc;
    StabilizationScales s;
    s.lambda_arithm = std::sqrt(NtN.trace());
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(NtN);
    if (!lu.isInvertible())
        throw std::runtime_error("stabilization_scales: singular Nc^T Nc (degenerate cell)");
    s.lambda_harm = 1.0 / std::sqrt(lu.inverse().trace());
    return s;
}

double stabilization_alpha(const ElementOperators& ops, const KelvinMaterial& mat,
                           StabilizationKind kind)
{
    const double trC = mat.trace();
    switch (kind) {
    case StabilizationKind::AlphaG: {
        const double trNtN = (ops.Nc.transpose() * ops.Nc).trace();
        return ops.volume * trC / trNtN;
    }
    case StabilizationKind::AlphaN: {
        const StabilizationScales s = stabilization_scales(ops);
        return ops.volume * trC / (9.0 * s.lambda_harm * s.lambda_harm);
    }
    default:
        throw std::invalid_argument("stabilization_alpha: kind has no scalar coefficient");
    }
}

Eigen::MatrixXd element_stiffness(const ElementOperators& ops, const KelvinMaterial& mat,
                                  const PolyMesh& mesh, const StabilizationChoice& stab)
{
    if (kelvin_size(ops.dim) != mat.C.rows())
        throw std::invalid_argument("element_stiffness: material dimension mismatch");

    const int nd = ops.num_dofs();
    const Eigen::MatrixXd ImP = Eigen::MatrixXd::Identity(nd, nd) - ops.P;
    Eigen::MatrixXd K = ops.volume * ops.Wc.transpose() * mat.C * ops.Wc;

    if (stab.kind == StabilizationKind::FemExact) {
        if (ops.dim != 2 || ops.num_nodes() != 4)
            throw std::invalid_argument("element_stiffness: FemExact requires 2D 4-node cells");
        Eigen::Matrix<double, 2, 4> corners;
        for (int i = 0; i < 4; ++i)
            corners.col(i) = mesh.coords.col(ops.nodes[i]);
        const Eigen::MatrixXd S = fem_q1_stiffness(corners, mat);
        K += ImP.transpose() * S * ImP;
    } else {
        const double alpha = stab.kind == StabilizationKind::Custom
            ? stab.custom_alpha
            : stabilization_alpha(ops, mat, stab.kind);
        if (!(alpha > 0))
            throw std::runtime_error("element_stiffness: non-positive stabilization");
        K += alpha * ImP.transpose() * ImP;
    }

    K = 0.5 * (K + K.transpose());
    if (!K.allFinite() || K.diagonal().minCoeff() < -1e-12 * K.norm())
        throw std::runtime_error("element_stiffness: non-PSD result (cell "
                                 + std::to_string(ops.cell) + ")");
    return K;
}

Eigen::MatrixXd fem_q1_stiffness(const Eigen::Matrix<double, 2, 4>& corners,
                                 const KelvinMaterial& mat)
{
    if (mat.C.rows() != 3)
        throw std::invalid_argument("fem_q1_stiffness: expected 2D material");

    const double gp[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
    const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(8, 8);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double xi = gp[a], eta = gp[b];
            // bilinear shape gradients on [-1,1]^2, corners in perimeter order
            Eigen::Matrix<double, 2, 4> dN;
            dN << -(1 - eta), (1 - eta), (1 + eta), -(1 + eta),
                  -(1 - xi), -(1 + xi), (1 + xi), (1 - xi);
            dN *= 0.25;

            const Eigen::Matrix2d J = corners * dN.transpose();
            const double detJ = J.determinant();
            if (!(detJ > 0))
                throw std::runtime_error("fem_q1_stiffness: degenerate quadrilateral");
            const Eigen::Matrix<double, 2, 4> grad = J.inverse().transpose() * dN;

            Eigen::Matrix<double, 3, 8> B;
            B.setZero();
            for (int i = 0; i < 4; ++i) {
                B(0, 2 * i) = grad(0, i);
                B(2, 2 * i) = grad(1, i) / sqrt2;
                B(1, 2 * i + 1) = grad(1, i);
                B(2, 2 * i + 1) = grad(0, i) / sqrt2;
            }
            K += gw[a] * gw[b] * detJ * B.transpose() * mat.C * B;
        }
    }
    return K;
}

} // namespace polyvem
