#pragma once

#include <vector>

#include "qsde/coefficient.hpp"
#include "qsde/noise_model.hpp"

/// Finite-dimensional coalgebras, convolution of functionals, localising
/// subspaces, and convolution cocycles l_t obtained by pulling the QSDE on
/// V = C back through the counit.
namespace qsde::coalg {

/// Basis b_0..b_{m-1}; Delta(b_i) = sum_{jk} delta[i](j,k) b_j (x) b_k.
struct Coalgebra {
  Eigen::Index m = 0;
  std::vector<Matrix> delta;
  Vector counit;

  Complex coproduct(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return delta[static_cast<std::size_t>(i)](j, k);
  }
};

/// Elements of V^*, stored by values on the basis.
using Functional = Vector;

/// phi(b_i) as an operator on k^ = C^{d+1}.
struct GeneratorFunctional {
  std::vector<Matrix> varphi;

  Eigen::Index dhat() const { return varphi.empty() ? 0 : varphi.front().rows(); }
  /// b_k -> <zeta', phi(b_k) zeta>.
  Functional slice(const Vector& zeta_prime, const Vector& zeta) const;
};

struct ValidationReport {
  double coassociativity = 0.0;  // max entry of (Delta (x) id)Delta - (id (x) Delta)Delta
  double counit_left = 0.0;      // max entry of (eps (x) id)Delta - id
  double counit_right = 0.0;     // max entry of (id (x) eps)Delta - id
  double max_violation() const;
  bool ok(double tol = 1e-12) const { return max_violation() <= tol; }
};

/// Shape errors throw DimensionError; law violations are only reported.
ValidationReport validate(const Coalgebra& c);

/// Delta(b) = b (x) b, eps(b) = 1.
Coalgebra group_like();
/// Delta(x_n) = sum_{k <= n} x_k (x) x_{n-k}, eps(x_n) = delta_{n0}.
Coalgebra divided_power(Eigen::Index m);

/// (lambda (x) mu) o Delta.
Functional convolve(const Functional& lambda, const Functional& mu,
                    const Coalgebra& c);

/// (id (x) phi) o Delta as a QSDE coefficient on V = C:
/// theta(mu,nu)(j,i) = sum_k delta[i](j,k) varphi[k](mu,nu).
Coefficient induced_coefficient(const Coalgebra& c,
                                const GeneratorFunctional& phi);

struct LocalisedSubspace {
  Matrix basis;                    // m x r, orthonormal columns
  double invariance_residual = 0;  // max ||(I - QQ^*) A Q||_2 over generators
  Eigen::Index dim() const { return basis.cols(); }
};

inline constexpr double kRankTolerance = 1e-10;

/// Smallest subspace containing x and invariant under every operator in
/// `generators`. Vectors are admitted in generation order (input vector,
/// then images of each admitted vector under the generators in order) and
/// orthonormalized; a candidate joins when its component outside the
/// current span exceeds kRankTolerance times its norm. GuardError when the
/// dimension would pass `cap`.
LocalisedSubspace localise_under(const std::vector<Matrix>& generators,
                                 const Vector& x, Eigen::Index cap);

/// Closure under every basis slice theta(mu, nu).
LocalisedSubspace localise(const Coefficient& phi, const Vector& x,
                           Eigen::Index cap);

/// Closure under the slices phi^{c'^}_{c^} for c' in F', c in F only.
LocalisedSubspace localise_slices(const Coefficient& phi, const Vector& x,
                                  const std::vector<Vector>& f_prime,
                                  const std::vector<Vector>& f,
                                  Eigen::Index cap);

/// Q^* theta(mu,nu) Q for an orthonormal basis Q of an invariant subspace.
Coefficient restrict_coefficient(const Coefficient& phi, const Matrix& basis);

/// l^{g',g}_t(b_i) = eps(k_t(b_i)), each k_t(b_i) computed by a semigroup
/// solve restricted to the localising subspace of b_i. At t = 0 this is eps.
Functional convolution_cocycle(const Coalgebra& c,
                               const GeneratorFunctional& phi,
                               const StepFunction& g_prime,
                               const StepFunction& g, double t);

/// max_i |l_t(b_i) - eps(b_i) - int_0^t (l_s * phi^{g'^(s)}_{g^(s)})(b_i) ds|
/// with composite Simpson, `steps` (even, >= 2) per plateau.
double convolution_residual(const Coalgebra& c, const GeneratorFunctional& phi,
                            const StepFunction& g_prime, const StepFunction& g,
                            double t, int steps);

struct ConsistencyReport {
  double counit_slice = 0.0;  // max_i |eps(T b_i) - l_t(b_i)|
  double coproduct = 0.0;     // max_{ij} |T(j,i) - sum_k delta[i](j,k) l_t(b_k)|
};

/// Compares the unlocalised solve T on all of V with the localised l_t:
/// eps o k_t = l_t and k_t = (id (x) l_t) o Delta.
ConsistencyReport consistency(const Coalgebra& c,
                              const GeneratorFunctional& phi,
                              const StepFunction& g_prime,
                              const StepFunction& g, double t);

}  // namespace qsde::coalg
