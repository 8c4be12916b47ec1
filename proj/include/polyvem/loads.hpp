#pragma once

#include "polyvem/mesh.hpp"
#include "polyvem/vem_core.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace polyvem {

// A vector value per node, flattened node-major / direction-minor to match
// the global dof ordering.  Displacements (m) or nodal forces (N).
using NodalField = Eigen::VectorXd;

// One scalar per cell (potentials, divergence values).
using CellField = Eigen::VectorXd;

// Data attached to interior faces: a scalar jump g_f = psi(E_f^+) - psi(E_f^-)
// or a constant face vector.  Entries for boundary faces are ignored.
struct FaceLoad {
    Eigen::VectorXd jumps;     // n_faces, scalar per face
    Eigen::MatrixXd vectors;   // dim x n_faces, constant vector per face

    bool has_vectors() const { return vectors.size() > 0; }
};

using VectorFieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Load assembly through the projection operator: each node receives
/// sum_{cells E ni node} m_i^eta pi0_E(f), with the weight m_i^eta the
/// integral of the projected basis function (direction-independent).  The
/// cell average pi0(f) is evaluated by the midpoint rule at the centroid,
/// exact for constant and affine f.
NodalField load_projection(const VectorFieldFn& f, const PolyMesh& mesh,
                           const GeometryCache& geom,
                           const std::vector<ElementOperators>& ops);

/// First-order nodal quadrature: f_eta = (sum_{E ni eta} |E|/n_E) f(x_eta).
NodalField load_nodal_quadrature(const VectorFieldFn& f, const PolyMesh& mesh,
                                 const GeometryCache& geom);

enum class FaceRange { All, InteriorOnly };

/// How a cell potential behaves across boundary faces: ZeroExterior treats
/// the outside as potential 0 (the jump is -psi_E, making the gradient minus
/// the exact transpose of the volume-weighted divergence); Omit drops
/// boundary faces entirely.  With the potential shifted to vanish at the
/// free surface and the remaining boundaries carried by Dirichlet/rolling
/// conditions, ZeroExterior reproduces the projection and nodal loads
/// exactly on undisturbed Cartesian grids.
enum class BoundaryJumps { ZeroExterior, Omit };

/// Discrete divergence operator as a sparse matrix, n_cells x (d n_nodes):
/// (ddiv u)_E = (1/|E|) sum_{f in F(E)} sum_{eta in f} (u_eta . n_out) int_f phi_eta.
/// Exact cell average of div u for fields in the virtual space (planar faces).
Eigen::SparseMatrix<double> divergence_matrix(const PolyMesh& mesh, const GeometryCache& geom,
                                              FaceRange range = FaceRange::All);

/// Discrete gradient operator as a sparse matrix, (d n_nodes) x n_cells:
/// [dgrad psi]_{eta,k} = sum_f (psi+ - psi-) (e_k . n_f) int_f phi_eta,
/// equal to minus the transpose of the volume-weighted divergence assembled
/// over the same face range.
Eigen::SparseMatrix<double> gradient_matrix(const PolyMesh& mesh, const GeometryCache& geom,
                                            BoundaryJumps boundary = BoundaryJumps::ZeroExterior);

/// Apply the discrete divergence to a nodal field.
CellField discrete_divergence(const NodalField& u, const PolyMesh& mesh,
                              const GeometryCache& geom);

/// Nodal forces from a cell potential via the discrete gradient.
NodalField discrete_gradient(const CellField& psi, const PolyMesh& mesh,
                             const GeometryCache& geom,
                             BoundaryJumps boundary = BoundaryJumps::ZeroExterior);

/// Nodal forces from prescribed interior-face jumps g_f (the local form
/// g_f = f_face . dr_f; no global potential needed).
NodalField discrete_gradient(const FaceLoad& jumps, const PolyMesh& mesh,
                             const GeometryCache& geom);

/// Nodal forces of a 2D-Dirac load with constant vector per interior face:
/// f_{eta,k} = sum_f (fvec_f . e_k) int_f phi_eta.  Reduces to the discrete
/// gradient when fvec_f = g_f n_f.
NodalField face_supported_load(const FaceLoad& load, const PolyMesh& mesh,
                               const GeometryCache& geom);

} // namespace polyvem
