#pragma once

#include <cstddef>
#include <vector>

#include "qsde/coefficient.hpp"
#include "qsde/estimates.hpp"
#include "qsde/noise_model.hpp"

/// Time-discretized Fock space: one C^{d+1} slot per time step of length
/// Delta = T / N_s, vacuum f_0. The discrete exponential vector of g is
/// (x)_j (1, sqrt(Delta) g(tau_{j-1})), and the QSDE is integrated by an
/// Euler step driven by the slot increments s(mu,nu) |f_mu><f_nu|.
///
/// Two representations of the same adapted process are provided:
///  - DenseState materializes every vector in C^{p' (d+1)^{N_s}} and is
///    limited to (d+1)^{N_s} <= 2^14;
///  - AdaptedState keeps only the m x m slot transfer matrices and Gram
///    recursions, which give every inner product of the dense vectors
///    exactly, at cost linear in N_s.
namespace qsde::toyfock {

inline constexpr std::size_t kDenseSlotCap = std::size_t{1} << 14;

struct ToyFock {
  double horizon = 1.0;
  int slots = 1;

  double step() const { return horizon / slots; }
  /// Grid time tau_j = j * Delta.
  double time(int j) const { return j * step(); }
};

/// s(mu,nu) |f_mu><f_nu| on C^{dhat}: s(0,0) = Delta, s(mu,0) = s(0,nu) =
/// sqrt(Delta), s(mu,nu) = 1 for mu, nu >= 1.
Matrix increment_matrix(Eigen::Index mu, Eigen::Index nu, double delta,
                        Eigen::Index dhat);

/// Slot vectors (1, sqrt(Delta) g_j), j = 1..N_s. GuardError if a
/// breakpoint of g inside (0, T) is not a grid point.
std::vector<Vector> slot_vectors(const StepFunction& g, const ToyFock& grid);

/// Compressed adapted process for a fixed initial vector v.
class AdaptedState {
 public:
  AdaptedState(const Coefficient& phi, const InitialMap& kappa,
               const Vector& v, const StepFunction& g, const ToyFock& grid);

  const ToyFock& grid() const { return grid_; }
  Eigen::Index space_dim() const { return m_; }
  int slots() const { return grid_.slots; }

  /// <xi_j(e_a), xi_j(e_b)> on the full toy Fock space.
  Matrix gram(int j) const;
  /// <xi_j(e_a), xi_i(e_b)> for any i, j.
  Matrix cross_gram(int j, int i) const;
  /// ||v (x) eps_Delta(g)||.
  double reference_norm() const;
  /// ||K_{tau_j}(e_x) (v (x) g^_j (x) eps_Delta(g))||^2 per basis x, the
  /// squared norm of the integrand on slot j+1.
  RealVector integrand_norms_squared(int j) const;
  /// <v' (x) eps_Delta(g'), xi_j(e_a)> for a = 1..m, normalized by
  /// prod_{k<=N_s} <s'_k, s_k>.
  Eigen::RowVectorXcd overlap(const Vector& v_prime, const StepFunction& g_prime,
                              int j) const;

 private:
  Coefficient phi_;
  ToyFock grid_;
  Eigen::Index m_ = 0;
  std::vector<Vector> slots_;           // s_1..s_N
  std::vector<std::vector<Matrix>> b_;  // b_[j][mu]: slot j+1 transfer
  std::vector<double> tail_;            // tail_[j] = prod_{k > j} ||s_k||^2
  std::vector<Matrix> gram_;            // unnormalized slot Gram G_j
  Matrix initial_images_;               // p' x m, column a = kappa(e_a) v
  double v_norm_ = 0.0;
};

/// Euler solution for initial vector v, state at j = N_s with history.
AdaptedState euler_solve(const Coefficient& phi, const InitialMap& kappa,
                         const Vector& v, const StepFunction& g,
                         const ToyFock& grid);

/// Normalized <v' (x) eps_Delta(g'), xi_{N_s}(x)> per basis x.
Eigen::RowVectorXcd matrix_element_discrete(const AdaptedState& state,
                                            const Vector& v_prime,
                                            const StepFunction& g_prime);

/// The full discrete matrix element map, ranging v and v' over bases.
MatrixElementMap matrix_element_discrete(const Coefficient& phi,
                                         const InitialMap& kappa,
                                         const StepFunction& g_prime,
                                         const StepFunction& g,
                                         const ToyFock& grid);

struct FeReport {
  double max_ratio = 0.0;
  int worst_step = 0;
  std::vector<double> lhs;  // max_x ||xi_j - xi_0||^2, j = 0..N_s
  std::vector<double> rhs;  // matching C(g,tau_j)^2 sum_{k<j} Delta ||F_k||^2
};

/// Discrete Fundamental Estimate, per step and per basis vector.
FeReport fe_check(const AdaptedState& state, const StepFunction& g,
                  const FockConstant& constant = {});

/// max_x ||xi_j(x) - xi_i(x)|| / ||v (x) eps_Delta(g)|| for grid indices
/// i = r / Delta, j = t / Delta.
double hoelder_measure(const AdaptedState& state, double r, double t);

struct ConvergenceRow {
  int slots = 0;
  double error = 0.0;  // Frobenius distance to the semigroup engine
  double ratio = 0.0;  // previous error / error; 0 on the first row
};

/// Discrete-vs-continuous error for each slot count, horizon t.
std::vector<ConvergenceRow> convergence_table(const Coefficient& phi,
                                              const InitialMap& kappa,
                                              const StepFunction& g_prime,
                                              const StepFunction& g, double t,
                                              const std::vector<int>& slots);

/// Materialized adapted process for small grids.
struct DenseState {
  ToyFock grid;
  Eigen::Index dhat = 1;
  Eigen::Index rows = 1;  // p'
  /// history[j][x] = xi_j(e_x) in C^{p' dhat^{N_s}}, slot 1 slowest after
  /// the initial-space index.
  std::vector<std::vector<Vector>> history;
};

/// GuardError when (d+1)^{N_s} exceeds kDenseSlotCap.
DenseState euler_solve_dense(const Coefficient& phi, const InitialMap& kappa,
                             const Vector& v, const StepFunction& g,
                             const ToyFock& grid);

/// v' (x) eps_Delta(g') in the dense layout.
Vector dense_exponential(const Vector& v_prime, const StepFunction& g_prime,
                         const ToyFock& grid);

/// Largest component of xi_j(e_x) along slot-k vectors orthogonal to the
/// exponential slot factor, over k > j; zero for an adapted process.
double adaptedness_defect(const DenseState& state, const StepFunction& g,
                          int j);

}  // namespace qsde::toyfock
