#include "polyvem/loads.hpp"

#include <stdexcept>
#include <vector>

namespace polyvem {

NodalField load_projection(const VectorFieldFn& f, const PolyMesh& mesh,
                           const GeometryCache& geom,
                           const std::vector<ElementOperators>& ops)
{
    const int d = mesh.dim;
    NodalField out = NodalField::Zero(d * mesh.num_nodes());

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const ElementOperators& op = ops[c];
        const Eigen::VectorXd favg = f(geom.cell_centroid.col(c));
        const Eigen::VectorXd xc = geom.cell_centroid.col(c);
        const Eigen::VectorXd xbar = geom.cell_node_average.col(c);
        for (int i = 0; i < op.num_nodes(); ++i) {
            // integral of the projected basis function; the same weight in
            // every direction, so evaluate it for direction 0
            const double m = op.volume * op.projected_dof_at(i, 0, xc, xbar)(0);
            out.segment(d * op.nodes[i], d) += m * favg;
        }
    }
    return out;
}

NodalField load_nodal_quadrature(const VectorFieldFn& f, const PolyMesh& mesh,
                                 const GeometryCache& geom)
{
    const int d = mesh.dim;
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.num_nodes());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const std::vector<int> nodes = mesh.cell_nodes(c);
        const double w = geom.cell_volume[c] / static_cast<double>(nodes.size());
        for (int n : nodes)
            weight(n) += w;
    }

    NodalField out(d * mesh.num_nodes());
    for (int n = 0; n < mesh.num_nodes(); ++n)
        out.segment(d * n, d) = weight(n) * f(mesh.coords.col(n));
    return out;
}

Eigen::SparseMatrix<double> divergence_matrix(const PolyMesh& mesh, const GeometryCache& geom,
                                              FaceRange range)
{
    const int d = mesh.dim;
    std::vector<Eigen::Triplet<double>> trip;

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double inv_vol = 1.0 / geom.cell_volume[c];
        for (const CellFace& cf : mesh.cells[c]) {
            if (range == FaceRange::InteriorOnly && mesh.is_boundary_face(cf.face))
                continue;
            const std::vector<double> fni = face_node_integrals(mesh, geom, cf.face);
            const Eigen::VectorXd n_out = cf.sign * geom.face_normal.col(cf.face);
            const auto& fn = mesh.faces[cf.face];
            for (size_t j = 0; j < fn.size(); ++j)
                for (int k = 0; k < d; ++k)
                    trip.emplace_back(c, d * fn[j] + k, inv_vol * fni[j] * n_out(k));
        }
    }

    Eigen::SparseMatrix<double> D(mesh.num_cells(), d * mesh.num_nodes());
    D.setFromTriplets(trip.begin(), trip.end());
    return D;
}

Eigen::SparseMatrix<double> gradient_matrix(const PolyMesh& mesh, const GeometryCache& geom,
                                            BoundaryJumps boundary)
{
    const int d = mesh.dim;
    std::vector<Eigen::Triplet<double>> trip;

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto [cell_minus, cell_plus] = mesh.face_neighbors[f];
        if (cell_plus < 0 && boundary == BoundaryJumps::Omit)
            continue;
        const std::vector<double> fni = face_node_integrals(mesh, geom, f);
        const auto& fn = mesh.faces[f];
        for (size_t j = 0; j < fn.size(); ++j) {
            for (int k = 0; k < d; ++k) {
                const double w = geom.face_normal(k, f) * fni[j];
                if (cell_plus >= 0)
                    trip.emplace_back(d * fn[j] + k, cell_plus, w);
                trip.emplace_back(d * fn[j] + k, cell_minus, -w);
            }
        }
    }

    Eigen::SparseMatrix<double> G(d * mesh.num_nodes(), mesh.num_cells());
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

CellField discrete_divergence(const NodalField& u, const PolyMesh& mesh,
                              const GeometryCache& geom)
{
    if (u.size() != mesh.dim * mesh.num_nodes())
        throw std::invalid_argument("discrete_divergence: field size mismatch");
    return divergence_matrix(mesh, geom) * u;
}

NodalField discrete_gradient(const CellField& psi, const PolyMesh& mesh,
                             const GeometryCache& geom, BoundaryJumps boundary)
{
    if (psi.size() != mesh.num_cells())
        throw std::invalid_argument("discrete_gradient: cell field size mismatch");
    return gradient_matrix(mesh, geom, boundary) * psi;
}

NodalField discrete_gradient(const FaceLoad& jumps, const PolyMesh& mesh,
                             const GeometryCache& geom)
{
    const int d = mesh.dim;
    NodalField out = NodalField::Zero(d * mesh.num_nodes());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.is_boundary_face(f))
            continue;
        const double g = jumps.jumps(f);
        const std::vector<double> fni = face_node_integrals(mesh, geom, f);
        const auto& fn = mesh.faces[f];
        for (size_t j = 0; j < fn.size(); ++j)
            out.segment(d * fn[j], d) += g * fni[j] * geom.face_normal.col(f);
    }
    return out;
}

NodalField face_supported_load(const FaceLoad& load, const PolyMesh& mesh,
                               const GeometryCache& geom)
{
    if (!load.has_vectors())
        throw std::invalid_argument("face_supported_load: face vectors required");
    const int d = mesh.dim;
    NodalField out = NodalField::Zero(d * mesh.num_nodes());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.is_boundary_face(f))
            continue;
        const std::vector<double> fni = face_node_integrals(mesh, geom, f);
        const auto& fn = mesh.faces[f];
        for (size_t j = 0; j < fn.size(); ++j)
            out.segment(d * fn[j], d) += fni[j] * load.vectors.col(f);
    }
    return out;
}

} // namespace polyvem
