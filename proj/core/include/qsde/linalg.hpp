#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qsde {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Kronecker product with the left factor as the slow index.
Matrix kron(const Matrix& a, const Matrix& b);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// exp(a) by scaling-and-squaring with a degree 13 Padé approximant.
/// The squaring threshold is theta_13 = 5.37 on the 1-norm.
Matrix expm(const Matrix& a);

/// 1-norm (max column absolute sum).
double one_norm(const Matrix& a);

/// Matrix unit |row><col| of the given shape.
Matrix matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index row,
                   Eigen::Index col);

/// Standard basis vector e_i of C^n.
Vector basis_vector(Eigen::Index n, Eigen::Index i);

}  // namespace qsde
