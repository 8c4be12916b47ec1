#pragma once

#include "polyvem/loads.hpp"
#include "polyvem/mesh.hpp"
#include "polyvem/vem_core.hpp"

#include <Eigen/Sparse>
#include <map>
#include <vector>

namespace polyvem {

// Boundary conditions.  Dirichlet prescribes a dof value; rolling fixes the
// normal component of a node set on an axis-aligned boundary (free
// tangential); Neumann applies a constant traction vector on a boundary
// face.  A dof may be constrained by at most one condition.
struct BoundarySpec {
    std::map<int, double> dirichlet;                       // dof -> value
    std::vector<std::pair<int, Eigen::VectorXd>> tractions; // (boundary face, Pa)

    /// Clamp every direction of a node to the given values.
    void fix_node(int node, const Eigen::VectorXd& value, int dim);
    /// Rolling: zero displacement in `axis` for each node in the set.
    void add_rolling(const std::vector<int>& nodes, int axis, int dim);
    /// Constant traction on a boundary face.
    void add_traction(int face, const Eigen::VectorXd& traction);

    bool empty() const { return dirichlet.empty(); }
};

// Reduced symmetric system after Dirichlet elimination.
struct LinearSystem {
    Eigen::SparseMatrix<double> K;   // free dofs only
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;      // reduced index -> full dof
    Eigen::VectorXd full_values;     // prescribed values, 0 on free dofs
    int full_size = 0;

    /// Expand a reduced solution to the full dof vector (prescribed values
    /// filled in).
    NodalField expand(const Eigen::VectorXd& x_free) const;
};

struct AssembledOperator {
    Eigen::SparseMatrix<double> K;           // full dof space
    std::vector<ElementOperators> element_ops;
};

/// Assemble the global stiffness matrix.  `materials` has one entry per cell
/// or a single entry used for all cells.  Elements are processed with a
/// deterministic summation order regardless of thread count (default 1;
/// the per-element stiffness computations run concurrently, the scatter-add
/// is serial in cell order).
AssembledOperator assemble_global(const PolyMesh& mesh, const GeometryCache& geom,
                                  const std::vector<KelvinMaterial>& materials,
                                  const StabilizationChoice& stab, int threads = 1);

/// Eliminate constrained dofs and add Neumann tractions to the load vector.
/// Throws on out-of-range or doubly-constrained dofs.
LinearSystem apply_bcs(const Eigen::SparseMatrix<double>& K, const NodalField& load,
                       const BoundarySpec& bcs, const PolyMesh& mesh,
                       const GeometryCache& geom);

struct SolveReport {
    double residual = 0.0;    // ||Kx-b|| / ||b||
    int dofs = 0;
    bool direct = true;
};

/// Solve the reduced SPD system: sparse Cholesky (LDLT) up to 2e5 dofs,
/// preconditioned conjugate gradients beyond.  Returns the full nodal field.
/// Throws "singular system: rigid modes unconstrained" when no constraint
/// was applied, and reports the residual on breakdown or non-convergence.
NodalField solve(const LinearSystem& sys, double tol = 1e-10, SolveReport* report = nullptr);

} // namespace polyvem
