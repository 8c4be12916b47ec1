#include "polyvem/kelvin.hpp"

#include <cmath>
#include <stdexcept>

namespace polyvem {

namespace {
const double sqrt2 = std::sqrt(2.0);
}

KelvinVec kelvin_of_sym(const Eigen::MatrixXd& S)
{
    const int d = static_cast<int>(S.rows());
    if (S.cols() != d || (d != 2 && d != 3))
        throw std::invalid_argument("kelvin_of_sym: expected 2x2 or 3x3 matrix");

    const double scale = std::max(S.norm(), 1.0);
    if ((S - S.transpose()).norm() > 1e-12 * scale)
        throw std::invalid_argument("kelvin_of_sym: matrix is not symmetric");

    KelvinVec v(kelvin_size(d));
    if (d == 2) {
        v << S(0, 0), S(1, 1), sqrt2 * S(0, 1);
    } else {
        v << S(0, 0), S(1, 1), S(2, 2),
             sqrt2 * S(1, 2), sqrt2 * S(0, 2), sqrt2 * S(0, 1);
    }
    return v;
}

Eigen::MatrixXd sym_of_kelvin(const KelvinVec& v)
{
    if (v.size() == 3) {
        Eigen::MatrixXd S(2, 2);
        S << v(0), v(2) / sqrt2,
             v(2) / sqrt2, v(1);
        return S;
    }
    if (v.size() == 6) {
        Eigen::MatrixXd S(3, 3);
        S << v(0), v(5) / sqrt2, v(4) / sqrt2,
             v(5) / sqrt2, v(1), v(3) / sqrt2,
             v(4) / sqrt2, v(3) / sqrt2, v(2);
        return S;
    }
    throw std::invalid_argument("sym_of_kelvin: expected 3 or 6 components");
}

Eigen::VectorXd rotation_of_skew(const Eigen::MatrixXd& A)
{
    const int d = static_cast<int>(A.rows());
    const double scale = std::max(A.norm(), 1.0);
    if ((A + A.transpose()).norm() > 1e-12 * scale)
        throw std::invalid_argument("rotation_of_skew: matrix is not skew-symmetric");

    Eigen::VectorXd r(rotation_size(d));
    if (d == 2) {
        r << sqrt2 * A(1, 0);
    } else {
        // axis vector w with A x = w x x, scaled by sqrt(2)
        r << sqrt2 * A(2, 1), sqrt2 * A(0, 2), sqrt2 * A(1, 0);
    }
    return r;
}

Eigen::MatrixXd skew_of_rotation(const Eigen::VectorXd& r, int dim)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    if (dim == 2) {
        const double w = r(0) / sqrt2;
        A(1, 0) = w;
        A(0, 1) = -w;
    } else {
        const Eigen::Vector3d w = r.head<3>() / sqrt2;
        A << 0, -w(2), w(1),
             w(2), 0, -w(0),
             -w(1), w(0), 0;
    }
    return A;
}

KelvinMaterial isotropic_stiffness(double lambda, double mu, int dim)
{
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("isotropic_stiffness: dim must be 2 or 3");
    if (!(mu > 0.0) || !(lambda > -2.0 * mu / dim))
        throw std::invalid_argument("isotropic_stiffness: parameters violate ellipticity");

    const int k = kelvin_size(dim);
    KelvinMaterial mat;
    mat.lambda = lambda;
    mat.mu = mu;
    mat.C = 2.0 * mu * Eigen::MatrixXd::Identity(k, k);
    // lambda couples the normal components only; shear entries already carry
    // the correct factor because of the sqrt(2) Kelvin scaling.
    mat.C.topLeftCorner(dim, dim).array() += lambda;
    return mat;
}

KelvinMaterial isotropic_from_young(double young, double poisson, int dim)
{
    return isotropic_stiffness(lame_lambda(young, poisson), lame_mu(young, poisson), dim);
}

double energy_density(const KelvinVec& strain, const KelvinMaterial& mat)
{
    if (strain.size() != mat.C.rows())
        throw std::invalid_argument("energy_density: strain/material dimension mismatch");
    return strain.dot(mat.C * strain);
}

} // namespace polyvem
