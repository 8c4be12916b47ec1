#pragma once

#include "polyvem/kelvin.hpp"
#include "polyvem/mesh.hpp"

#include <Eigen/Dense>
#include <vector>

namespace polyvem {

// Per-element first-order VEM operators.
//
// Element degrees of freedom are the nodal displacements, ordered
// node-major / direction-minor: (node0,x),(node0,y)[,(node0,z)],(node1,x),...
// with nodes in PolyMesh::cell_nodes order.
//
// q holds the integrated basis gradients q^i = sum_{f ni i} (int_f phi_i) n_f
// (units m^(d-1)); the projection matrices use their cell averages q^i/|E|.
// W_c maps dofs to the Kelvin coordinates of the projected constant strain,
// W_r to rigid-body coordinates (translations then the rotation vector);
// N_c and N_r embed those coordinates back into dofs.  P = N_c W_c + N_r W_r
// is the projection onto affine displacements expressed dof-to-dof.
struct ElementOperators {
    int cell = -1;
    int dim = 0;
    std::vector<int> nodes;   // global node indices, local order
    double volume = 0.0;

    Eigen::MatrixXd q;        // n x d
    Eigen::MatrixXd r;        // n x d, x_i - xbar_E
    Eigen::MatrixXd Wc;       // k x dn
    Eigen::MatrixXd Wr;       // (d + krot) x dn
    Eigen::MatrixXd Nc;       // dn x k
    Eigen::MatrixXd Nr;       // dn x (d + krot)
    Eigen::MatrixXd P;        // dn x dn

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_dofs() const { return dim * num_nodes(); }

    /// Value of the projected affine displacement of a unit dof
    /// (local node, direction) at point x.
    Eigen::VectorXd projected_dof_at(int local_node, int direction,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& node_average) const;
};

enum class StabilizationKind {
    AlphaG,    // |E| tr(C) / tr(Nc^T Nc)
    AlphaN,    // (1/9) |E| tr(C) tr((Nc^T Nc)^-1)
    FemExact,  // exact Q1 kernel energy; 2D quadrilaterals only
    Custom,    // caller-provided scalar
};

struct StabilizationChoice {
    StabilizationKind kind = StabilizationKind::AlphaG;
    double custom_alpha = 0.0;

    static StabilizationChoice alpha_g() { return {StabilizationKind::AlphaG, 0.0}; }
    static StabilizationChoice alpha_n() { return {StabilizationKind::AlphaN, 0.0}; }
    static StabilizationChoice fem_exact() { return {StabilizationKind::FemExact, 0.0}; }
    static StabilizationChoice custom(double alpha) { return {StabilizationKind::Custom, alpha}; }
};

/// Characteristic lengths built from the singular values s_i of Nc:
/// arithm = sqrt(sum s_i^2), harm = 1 / sqrt(sum s_i^-2), so that
/// alpha_G = |E| tr(C) / arithm^2 and alpha_N = |E| tr(C) / (9 harm^2).
struct StabilizationScales {
    double lambda_arithm = 0.0;
    double lambda_harm = 0.0;
};

/// Integrated basis gradients of a cell, one row per local node.
Eigen::MatrixXd q_vectors(const PolyMesh& mesh, const GeometryCache& geom, int cell);

/// Assemble the projection operators of a cell (everything except the
/// stiffness matrix).  Throws on degenerate cells (|E| = 0).
ElementOperators element_projections(const PolyMesh& mesh, const GeometryCache& geom, int cell);

/// Scalar stabilization coefficient for S = alpha I.  Throws for AlphaN on
/// cells with singular Nc^T Nc and for FemExact/Custom (no scalar form).
double stabilization_alpha(const ElementOperators& ops, const KelvinMaterial& mat,
                           StabilizationKind kind);

/// The singular-value length scales of Nc (see StabilizationScales).
StabilizationScales stabilization_scales(const ElementOperators& ops);

/// Element stiffness K_E = |E| Wc^T C Wc + (I-P)^T S (I-P).
/// For FemExact (2D, 4-node cells only) S is the exact Q1 stiffness of the
/// element; otherwise S = alpha I with alpha from stabilization_alpha.
Eigen::MatrixXd element_stiffness(const ElementOperators& ops, const KelvinMaterial& mat,
                                  const PolyMesh& mesh, const StabilizationChoice& stab);

/// Exact Q1 stiffness of a convex quadrilateral (2D), 8x8, computed with
/// 3x3 tensor Gauss quadrature of the isoparametric bilinear element.
/// Corner order must follow the perimeter.  Also the oracle the tests use.
Eigen::MatrixXd fem_q1_stiffness(const Eigen::Matrix<double, 2, 4>& corners,
                                 const KelvinMaterial& mat);

} // namespace polyvem
