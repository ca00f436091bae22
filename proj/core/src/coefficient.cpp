#include "qsde/coefficient.hpp"

#include <cmath>
#include <string>

#include "qsde/errors.hpp"
#include "qsde/noise_model.hpp"

namespace qsde {

void InitialSpace::validate(double tol) const {
  if (!involution) return;
  const Matrix& j = *involution;
  if (j.rows() != m || j.cols() != m) {
    throw StructureError("involution must be " + std::to_string(m) + "x" +
                         std::to_string(m));
  }
  const double defect =
      (j * j.conjugate() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > tol) {
    throw StructureError("involution is not involutive: |J conj(J) - I| = " +
                         std::to_string(defect));
  }
}

const Matrix& InitialSpace::require_involution() const {
  if (!involution) throw StructureError("no conjugation structure");
  return *involution;
}

Vector dagger_coordinates(const Matrix& involution, const Vector& x) {
  return involution * x.conjugate();
}

Coefficient::Coefficient(Eigen::Index d, Eigen::Index m)
    : d_(d), m_(m),
      theta_(static_cast<std::size_t>((d + 1) * (d + 1)), Matrix::Zero(m, m)) {
  if (d < 0 || m < 0) throw DimensionError("negative dimension");
}

Coefficient::Coefficient(Eigen::Index d, std::vector<Matrix> theta)
    : d_(d), theta_(std::move(theta)) {
  if (d < 0) throw DimensionError("negative noise dimension");
  const auto expected = static_cast<std::size_t>((d + 1) * (d + 1));
  if (theta_.size() != expected) {
    throw DimensionError("coefficient needs " + std::to_string(expected) +
                         " slices, got " + std::to_string(theta_.size()));
  }
  m_ = theta_.front().rows();
  for (const auto& t : theta_) {
    if (t.rows() != m_ || t.cols() != m_) {
      throw DimensionError("coefficient slices must all be " +
                           std::to_string(m_) + "x" + std::to_string(m_));
    }
  }
}

const Matrix& Coefficient::theta(Eigen::Index mu, Eigen::Index nu) const {
  return theta_[static_cast<std::size_t>(mu * dhat() + nu)];
}

Matrix& Coefficient::theta(Eigen::Index mu, Eigen::Index nu) {
  return theta_[static_cast<std::size_t>(mu * dhat() + nu)];
}

void Coefficient::check_slot(const Vector& zeta) const {
  if (zeta.size() != dhat()) {
    throw DimensionError("k^ vector has size " + std::to_string(zeta.size()) +
                         ", expected " + std::to_string(dhat()));
  }
}

Matrix Coefficient::slice(const Vector& zeta_prime, const Vector& zeta) const {
  check_slot(zeta_prime);
  check_slot(zeta);
  Matrix out = Matrix::Zero(m_, m_);
  for (Eigen::Index mu = 0; mu < dhat(); ++mu) {
    const Complex left = std::conj(zeta_prime(mu));
    if (left == Complex(0.0)) continue;
    for (Eigen::Index nu = 0; nu < dhat(); ++nu) {
      if (zeta(nu) == Complex(0.0)) continue;
      out += (left * zeta(nu)) * theta(mu, nu);
    }
  }
  return out;
}

Matrix Coefficient::psi(const Vector& c_prime, const Vector& c) const {
  return slice(hat(c_prime), hat(c));
}

Matrix Coefficient::column(const Vector& zeta) const {
  check_slot(zeta);
  Matrix out = Matrix::Zero(m_ * dhat(), m_);
  for (Eigen::Index mu = 0; mu < dhat(); ++mu) {
    Matrix block = Matrix::Zero(m_, m_);
    for (Eigen::Index nu = 0; nu < dhat(); ++nu) block += zeta(nu) * theta(mu, nu);
    for (Eigen::Index i = 0; i < m_; ++i) {
      out.row(i * dhat() + mu) = block.row(i);
    }
  }
  return out;
}

bool Coefficient::operator==(const Coefficient& other) const {
  if (d_ != other.d_ || m_ != other.m_) return false;
  for (std::size_t k = 0; k < theta_.size(); ++k) {
    if (theta_[k] != other.theta_[k]) return false;
  }
  return true;
}

MatrixValuedMap::MatrixValuedMap(Eigen::Index rows, Eigen::Index cols,
                                 std::vector<Matrix> images)
    : rows_(rows), cols_(cols), images_(std::move(images)) {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].rows() != rows || images_[i].cols() != cols) {
      throw DimensionError("map image " + std::to_string(i) + " is " +
                           std::to_string(images_[i].rows()) + "x" +
                           std::to_string(images_[i].cols()) + ", expected " +
                           std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
}

MatrixValuedMap MatrixValuedMap::diagonal_embedding(Eigen::Index m) {
  std::vector<Matrix> images;
  images.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) images.push_back(matrix_unit(m, m, i, i));
  return MatrixValuedMap(m, m, std::move(images));
}

Matrix MatrixValuedMap::apply(const Vector& x) const {
  if (x.size() != source_dim()) throw DimensionError("map: argument size");
  Matrix out = Matrix::Zero(rows_, cols_);
  for (Eigen::Index i = 0; i < source_dim(); ++i) out += x(i) * (*this)[i];
  return out;
}

MatrixValuedMap MatrixValuedMap::compose(const Matrix& transfer) const {
  if (transfer.rows() != source_dim()) {
    throw DimensionError("compose: transfer has " +
                         std::to_string(transfer.rows()) + " rows, map has " +
                         std::to_string(source_dim()) + " inputs");
  }
  std::vector<Matrix> images;
  images.reserve(static_cast<std::size_t>(transfer.cols()));
  for (Eigen::Index i = 0; i < transfer.cols(); ++i) {
    images.push_back(apply(transfer.col(i)));
  }
  return MatrixValuedMap(rows_, cols_, std::move(images));
}

Matrix MatrixValuedMap::vectorized() const {
  Matrix out(rows_ * cols_, source_dim());
  for (Eigen::Index i = 0; i < source_dim(); ++i) {
    out.col(i) = (*this)[i].reshaped();
  }
  return out;
}

double MatrixValuedMap::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& image : images_) sum += image.squaredNorm();
  return std::sqrt(sum);
}

MatrixValuedMap MatrixValuedMap::operator-(const MatrixValuedMap& other) const {
  if (other.rows_ != rows_ || other.cols_ != cols_ ||
      other.source_dim() != source_dim()) {
    throw DimensionError("map difference: shape mismatch");
  }
  std::vector<Matrix> images;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    images.push_back(images_[i] - other.images_[i]);
  }
  return MatrixValuedMap(rows_, cols_, std::move(images));
}

bool MatrixValuedMap::operator==(const MatrixValuedMap& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ ||
      images_.size() != other.images_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != other.images_[i]) return false;
  }
  return true;
}

Coefficient conjugate(const Coefficient& phi, const InitialSpace& space) {
  const Matrix& j = space.require_involution();
  if (j.rows() != phi.space_dim()) {
    throw DimensionError("conjugate: involution does not match coefficient");
  }
  Coefficient out(phi.noise_dim(), phi.space_dim());
  for (Eigen::Index mu = 0; mu < phi.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < phi.dhat(); ++nu) {
      out.theta(mu, nu) = j * phi.theta(nu, mu).conjugate() * j.conjugate();
    }
  }
  return out;
}

InitialMap conjugate(const InitialMap& kappa, const InitialSpace& space) {
  const Matrix& j = space.require_involution();
  if (j.rows() != kappa.source_dim()) {
    throw DimensionError("conjugate: involution does not match initial map");
  }
  // x^dagger = e_i  <=>  x = J e_i.
  std::vector<Matrix> images;
  for (Eigen::Index i = 0; i < kappa.source_dim(); ++i) {
    images.push_back(kappa.apply(j.col(i)).adjoint());
  }
  return InitialMap(kappa.cols(), kappa.rows(), std::move(images));
}

Coefficient lift(const Coefficient& phi, Eigen::Index n) {
  if (n < 1) throw DimensionError("lift: level must be >= 1");
  if (n == 1) return phi;
  const Matrix id = Matrix::Identity(n * n, n * n);
  std::vector<Matrix> theta;
  for (Eigen::Index mu = 0; mu < phi.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < phi.dhat(); ++nu) {
      theta.push_back(kron(phi.theta(mu, nu), id));
    }
  }
  return Coefficient(phi.noise_dim(), std::move(theta));
}

InitialMap lift(const InitialMap& kappa, Eigen::Index n) {
  if (n < 1) throw DimensionError("lift: level must be >= 1");
  if (n == 1) return kappa;
  std::vector<Matrix> images;
  for (Eigen::Index i = 0; i < kappa.source_dim(); ++i) {
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        images.push_back(kron(kappa[i], matrix_unit(n, n, a, b)));
      }
    }
  }
  return InitialMap(kappa.rows() * n, kappa.cols() * n, std::move(images));
}

std::vector<double> lift_level_norms(const Coefficient& phi, const Vector& zeta,
                                     Eigen::Index max_level) {
  std::vector<double> norms;
  for (Eigen::Index n = 1; n <= max_level; ++n) {
    norms.push_back(spectral_norm(lift(phi, n).column(zeta)));
  }
  return norms;
}

CompositionBound composition_bound_check(const MatrixValuedMap& psi,
                                         std::span<const Matrix> columns,
                                         Eigen::Index dhat) {
  const Eigen::Index m = psi.source_dim();
  for (const auto& col : columns) {
    if (col.rows() != m * dhat || col.cols() != m) {
      throw DimensionError("composition_bound_check: column shape");
    }
  }
  const auto n = static_cast<Eigen::Index>(columns.size());

  // Apply phi_n first; each earlier column adds its k^ factor in front of
  // the factors already produced.
  Matrix chain = Matrix::Identity(m, m);
  Eigen::Index trailing = 1;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    chain = kron(columns[static_cast<std::size_t>(k)],
                 Matrix::Identity(trailing, trailing)) *
            chain;
    trailing *= dhat;
  }
  const Matrix composite =
      kron(psi.vectorized(), Matrix::Identity(trailing, trailing)) * chain;

  CompositionBound out;
  out.lhs = spectral_norm(composite);
  out.rhs = std::pow(static_cast<double>(dhat), 0.5 * static_cast<double>(n)) *
            spectral_norm(psi.vectorized());
  for (const auto& col : columns) out.rhs *= spectral_norm(col);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace qsde
