#pragma once

#include <Eigen/Dense>

namespace polyvem {

// Kelvin representation of symmetric and skew-symmetric tensors.
//
// A symmetric d x d tensor maps to a vector of length 3 (d=2) or 6 (d=3)
// with sqrt(2) on the shear entries, so that the tensor scalar product
// A:B = trace(A^T B) equals the plain dot product of the Kelvin vectors.
// Component order in 3D: [a11, a22, a33, s2*a23, s2*a13, s2*a12],
// in 2D: [a11, a22, s2*a12].
//
// A skew-symmetric tensor maps to a rotation vector (3 components in 3D,
// 1 in 2D), scaled by sqrt(2) so the same scalar-product correspondence
// holds; the represented matrix acts as A x = (1/sqrt(2)) a_hat x x.

using KelvinVec = Eigen::VectorXd;

/// Number of Kelvin components for symmetric tensors in dimension d.
inline int kelvin_size(int dim) { return dim == 2 ? 3 : 6; }

/// Number of rotation-vector components in dimension d.
inline int rotation_size(int dim) { return dim == 2 ? 1 : 3; }

/// Kelvin vector of a symmetric matrix. Throws if S is not symmetric
/// to 1e-12 (relative to its norm).
KelvinVec kelvin_of_sym(const Eigen::MatrixXd& S);

/// Inverse map: symmetric d x d matrix from its Kelvin vector.
Eigen::MatrixXd sym_of_kelvin(const KelvinVec& v);

/// Rotation vector of a skew-symmetric matrix (sqrt(2)-scaled axis).
Eigen::VectorXd rotation_of_skew(const Eigen::MatrixXd& A);

/// Skew-symmetric matrix represented by a rotation vector.
Eigen::MatrixXd skew_of_rotation(const Eigen::VectorXd& r, int dim);

// Stiffness tensor in Kelvin representation.  C maps Kelvin strain to
// Kelvin stress; symmetric positive definite by the ellipticity condition.
struct KelvinMaterial {
    Eigen::MatrixXd C;        // k x k, k = kelvin_size(dim), units Pa
    double lambda = 0.0;      // kept when built from Lame parameters
    double mu = 0.0;

    int dim() const { return C.rows() == 3 ? 2 : 3; }
    double trace() const { return C.trace(); }
};

/// Isotropic stiffness from Lame parameters.  2D uses plane strain.
/// Requires mu > 0 and lambda > -2 mu / d (positive definiteness).
KelvinMaterial isotropic_stiffness(double lambda, double mu, int dim);

/// Isotropic stiffness from Young's modulus and Poisson ratio.
KelvinMaterial isotropic_from_young(double young, double poisson, int dim);

/// Lame parameters from (E, nu).
inline double lame_lambda(double young, double poisson)
{
    return young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
}
inline double lame_mu(double young, double poisson)
{
    return young / (2.0 * (1.0 + poisson));
}

/// Elastic energy density eps^T C eps (>= 0, zero iff eps = 0).
double energy_density(const KelvinVec& strain, const KelvinMaterial& mat);

} // namespace polyvem
