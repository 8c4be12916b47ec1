#include "polyvem/system.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <stdexcept>
#include <string>
#include <thread>

namespace polyvem {

void BoundarySpec::fix_node(int node, const Eigen::VectorXd& value, int dim)
{
    for (int k = 0; k < dim; ++k) {
        if (!dirichlet.emplace(dim * node + k, value(k)).second)
            throw std::invalid_argument("BoundarySpec: dof constrained twice (node "
                                        + std::to_string(node) + ")");
    }
}

void BoundarySpec::add_rolling(const std::vector<int>& nodes, int axis, int dim)
{
    for (int node : nodes) {
        if (!dirichlet.emplace(dim * node + axis, 0.0).second)
            throw std::invalid_argument("BoundarySpec: dof constrained twice (node "
                                        + std::to_string(node) + ")");
    }
}

void BoundarySpec::add_traction(int face, const Eigen::VectorXd& traction)
{
    tractions.emplace_back(face, traction);
}

AssembledOperator assemble_global(const PolyMesh& mesh, const GeometryCache& geom,
                                  const std::vector<KelvinMaterial>& materials,
                                  const StabilizationChoice& stab, int threads)
{
    const int n_cells = mesh.num_cells();
    if (materials.size() != 1 && static_cast<int>(materials.size()) != n_cells)
        throw std::invalid_argument("assemble_global: need 1 or n_cells materials");
    const auto mat_of = [&](int c) -> const KelvinMaterial& {
        return materials.size() == 1 ? materials[0] : materials[c];
    };

    AssembledOperator out;
    out.element_ops.resize(n_cells);
    std::vector<Eigen::MatrixXd> K_elem(n_cells);

    const auto work = [&](int begin, int end) {
        for (int c = begin; c < end; ++c) {
            try {
                out.element_ops[c] = element_projections(mesh, geom, c);
                K_elem[c] = element_stiffness(out.element_ops[c], mat_of(c), mesh, stab);
            } catch (const std::exception& e) {
                throw std::runtime_error("assemble_global: cell " + std::to_string(c)
                                         + ": " + e.what());
            }
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || n_cells < 2 * threads) {
        work(0, n_cells);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const int chunk = (n_cells + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t * chunk, std::min(n_cells, (t + 1) * chunk));
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& err : errors)
            if (err)
                std::rethrow_exception(err);
    }

    // serial scatter-add in cell order: result independent of thread count
    const int d = mesh.dim;
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < n_cells; ++c) {
        const ElementOperators& op = out.element_ops[c];
        for (int i = 0; i < op.num_nodes(); ++i)
            for (int j = 0; j < op.num_nodes(); ++j)
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        trip.emplace_back(d * op.nodes[i] + a, d * op.nodes[j] + b,
                                          K_elem[c](d * i + a, d * j + b));
    }
    out.K.resize(d * mesh.num_nodes(), d * mesh.num_nodes());
    out.K.setFromTriplets(trip.begin(), trip.end());
    return out;
}

LinearSystem apply_bcs(const Eigen::SparseMatrix<double>& K, const NodalField& load,
                       const BoundarySpec& bcs, const PolyMesh& mesh,
                       const GeometryCache& geom)
{
    const int d = mesh.dim;
    const int n_dofs = static_cast<int>(K.rows());

    NodalField rhs_full = load.size() == 0 ? NodalField::Zero(n_dofs) : load;
    if (rhs_full.size() != n_dofs)
        throw std::invalid_argument("apply_bcs: load vector size mismatch");

    for (const auto& [face, traction] : bcs.tractions) {
        if (face < 0 || face >= mesh.num_faces() || !mesh.is_boundary_face(face))
            throw std::invalid_argument("apply_bcs: traction on non-boundary face "
                                        + std::to_string(face));
        const std::vector<double> fni = face_node_integrals(mesh, geom, face);
        const auto& fn = mesh.faces[face];
        for (size_t j = 0; j < fn.size(); ++j)
            rhs_full.segment(d * fn[j], d) += fni[j] * traction;
    }

    LinearSystem sys;
    sys.full_size = n_dofs;
    sys.full_values = Eigen::VectorXd::Zero(n_dofs);
    std::vector<int> reduced(n_dofs, -1);
    for (const auto& [dof, value] : bcs.dirichlet) {
        if (dof < 0 || dof >= n_dofs)
            throw std::invalid_argument("apply_bcs: constrained dof out of range");
        sys.full_values(dof) = value;
        reduced[dof] = -2;
    }
    sys.free_dofs.reserve(n_dofs - bcs.dirichlet.size());
    for (int i = 0; i < n_dofs; ++i) {
        if (reduced[i] == -1) {
            reduced[i] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(i);
        }
    }

    const int n_free = static_cast<int>(sys.free_dofs.size());
    sys.rhs.resize(n_free);
    for (int i = 0; i < n_free; ++i)
        sys.rhs(i) = rhs_full(sys.free_dofs[i]);

    // K_ff x_f = b_f - K_fc x_c
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < K.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            const int r = reduced[it.row()];
            const int c = reduced[it.col()];
            if (r >= 0 && c >= 0)
                trip.emplace_back(r, c, it.value());
            else if (r >= 0 && c == -2)
                sys.rhs(r) -= it.value() * sys.full_values(it.col());
        }
    }
    sys.K.resize(n_free, n_free);
    sys.K.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

NodalField LinearSystem::expand(const Eigen::VectorXd& x_free) const
{
    NodalField full = full_values;
    for (size_t i = 0; i < free_dofs.size(); ++i)
        full(free_dofs[i]) = x_free(i);
    return full;
}

NodalField solve(const LinearSystem& sys, double tol, SolveReport* report)
{
    const int n = static_cast<int>(sys.K.rows());
    if (n == sys.full_size && n > 0)
        throw std::runtime_error("singular system: rigid modes unconstrained");

    SolveReport rep;
    rep.dofs = n;

    Eigen::VectorXd x;
    if (n == 0) {
        x.resize(0);
    } else if (sys.rhs.norm() == 0.0) {
        x = Eigen::VectorXd::Zero(n);
    } else if (n <= 200000) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(sys.K);
        if (chol.info() != Eigen::Success)
            throw std::runtime_error("solve: factorization failed (matrix not SPD?)");
        if (chol.vectorD().minCoeff() <= 0.0)
            throw std::runtime_error("solve: matrix not positive definite");
        x = chol.solve(sys.rhs);
    } else {
        rep.direct = false;
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(tol * 1e-2);
        cg.setMaxIterations(20 * n);
        cg.compute(sys.K);
        x = cg.solve(sys.rhs);
        if (cg.info() != Eigen::Success)
            throw std::runtime_error("solve: CG did not converge, error "
                                     + std::to_string(cg.error()));
    }

    if (n > 0) {
        const double bnorm = sys.rhs.norm();
        rep.residual = bnorm > 0 ? (sys.K * x - sys.rhs).norm() / bnorm : 0.0;
        if (rep.residual > tol)
            throw std::runtime_error("solve: residual " + std::to_string(rep.residual)
                                     + " exceeds tolerance");
    }
    if (report)
        *report = rep;
    return sys.expand(x);
}

} // namespace polyvem
