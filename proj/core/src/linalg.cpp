#include "qsde/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qsde {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double one_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index row,
                   Eigen::Index col) {
  Matrix e = Matrix::Zero(rows, cols);
  e(row, col) = 1.0;
  return e;
}

Vector basis_vector(Eigen::Index n, Eigen::Index i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

namespace {

// Higham (2005) degree-13 Padé coefficients.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double norm = one_norm(a);
  if (norm == 0.0) return Matrix::Identity(n, n);
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  const Matrix x = a / std::ldexp(1.0, squarings);

  const Matrix id = Matrix::Identity(n, n);
  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x4 * x2;
  const auto& b = kPade13;

  const Matrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) +
                         b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
  const Matrix u = x * u_inner;
  const Matrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 +
                   b[4] * x4 + b[2] * x2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

}  // namespace qsde
