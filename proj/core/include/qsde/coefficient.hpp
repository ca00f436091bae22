#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qsde/linalg.hpp"

namespace qsde {

/// The source space V = C^m of a QSDE, optionally with an antilinear
/// involution x -> x^dagger given in coordinates by J * conj(x).
struct InitialSpace {
  Eigen::Index m = 0;
  std::optional<Matrix> involution;

  /// Throws StructureError unless J is m x m with J * conj(J) = I.
  void validate(double tol = 1e-12) const;
  /// The involution, or StructureError("no conjugation structure").
  const Matrix& require_involution() const;
};

/// Coordinates of x^dagger.
Vector dagger_coordinates(const Matrix& involution, const Vector& x);

/// The QSDE coefficient phi stored by basis slices:
/// theta(mu, nu) = phi^{f_mu}_{f_nu} acting on coordinates of V, so that
/// phi^{zeta'}_{zeta} = sum_{mu,nu} conj(zeta'_mu) zeta_nu theta(mu, nu).
class Coefficient {
 public:
  Coefficient() = default;
  /// Zero coefficient.
  Coefficient(Eigen::Index d, Eigen::Index m);
  /// `theta` holds (d+1)^2 square matrices in row-major (mu, nu) order.
  Coefficient(Eigen::Index d, std::vector<Matrix> theta);

  Eigen::Index noise_dim() const { return d_; }
  Eigen::Index dhat() const { return d_ + 1; }
  Eigen::Index space_dim() const { return m_; }

  const Matrix& theta(Eigen::Index mu, Eigen::Index nu) const;
  Matrix& theta(Eigen::Index mu, Eigen::Index nu);

  /// phi^{zeta'}_{zeta}: antilinear in zeta', linear in zeta.
  Matrix slice(const Vector& zeta_prime, const Vector& zeta) const;
  /// psi_{c',c} = phi^{c'^}_{c^}, the associated-semigroup generator.
  Matrix psi(const Vector& c_prime, const Vector& c) const;
  /// The column phi_{|zeta>} : V -> V (x) k^ as an (m*(d+1)) x m matrix,
  /// V index slow, k^ index fast.
  Matrix column(const Vector& zeta) const;

  bool operator==(const Coefficient& other) const;

 private:
  void check_slot(const Vector& zeta) const;

  Eigen::Index d_ = 0;
  Eigen::Index m_ = 0;
  std::vector<Matrix> theta_;
};

/// A linear map V -> B(C^p; C^p') stored as the images of the basis of V.
/// Used both for initial conditions kappa and for normalized matrix
/// elements k^{g',g}_t.
class MatrixValuedMap {
 public:
  MatrixValuedMap() = default;
  MatrixValuedMap(Eigen::Index rows, Eigen::Index cols,
                  std::vector<Matrix> images);

  /// kappa(e_i) = E_ii with p = p' = m (V realised as diagonal matrices).
  static MatrixValuedMap diagonal_embedding(Eigen::Index m);

  Eigen::Index source_dim() const {
    return static_cast<Eigen::Index>(images_.size());
  }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const Matrix& operator[](Eigen::Index i) const {
    return images_[static_cast<std::size_t>(i)];
  }
  const std::vector<Matrix>& images() const { return images_; }

  /// Image of a coordinate vector.
  Matrix apply(const Vector& x) const;
  /// this o T for a linear map T on V given in coordinates.
  MatrixValuedMap compose(const Matrix& transfer) const;
  /// (p'p) x m matrix whose column i is vec(image i), column-major vec.
  Matrix vectorized() const;
  /// sqrt(sum_i ||image i||_F^2).
  double frobenius_norm() const;

  MatrixValuedMap operator-(const MatrixValuedMap& other) const;
  bool operator==(const MatrixValuedMap& other) const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Matrix> images_;
};

using InitialMap = MatrixValuedMap;
using MatrixElementMap = MatrixValuedMap;

/// phi^dagger with (phi^dagger)^{zeta}_{zeta'}(x^dagger) =
/// (phi^{zeta'}_{zeta}(x))^dagger; theta^dagger(mu,nu) =
/// J conj(theta(nu,mu)) conj(J).
Coefficient conjugate(const Coefficient& phi, const InitialSpace& space);

/// kappa^dagger(x^dagger) = kappa(x)^*.
InitialMap conjugate(const InitialMap& kappa, const InitialSpace& space);

/// Lift to V (x) M_n: theta'(mu,nu) = theta(mu,nu) (x) id_{n^2}. Basis of
/// V (x) M_n is e_i (x) E_ab with index i*n^2 + a*n + b.
Coefficient lift(const Coefficient& phi, Eigen::Index n);

/// kappa (x) id_{M_n}: e_i (x) E_ab -> kappa(e_i) (x) E_ab.
InitialMap lift(const InitialMap& kappa, Eigen::Index n);

/// Spectral norms of the columns phi_{|zeta>} lifted to levels 1..max_level.
/// At fixed finite dimension these do not grow; the sequence is recorded
/// rather than assumed.
std::vector<double> lift_level_norms(const Coefficient& phi,
                                     const Vector& zeta,
                                     Eigen::Index max_level = 3);

struct CompositionBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||psi . phi_1 . ... . phi_n|| against (dim k^)^{n/2} ||psi|| prod ||phi_i||.
/// `psi` maps V into matrices; each column is an (m*dhat) x m matrix as
/// returned by Coefficient::column. Norms use Euclidean coordinates on V and
/// the Hilbert-Schmidt norm on the matrix values; the composite is the
/// concrete Kronecker matrix V -> Y (x) (C^dhat)^{(x) n} with chain position
/// 1 slowest after Y.
CompositionBound composition_bound_check(const MatrixValuedMap& psi,
                                         std::span<const Matrix> columns,
                                         Eigen::Index dhat);

}  // namespace qsde
