#include "qsde/toyfock_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qsde/errors.hpp"
#include "qsde/semigroup_engine.hpp"

namespace qsde::toyfock {

namespace {

void check_grid(const ToyFock& grid) {
  if (grid.slots < 1 || !(grid.horizon > 0.0)) {
    throw DimensionError("toy Fock grid needs slots >= 1 and horizon > 0");
  }
}

// Plateau value of g on each slot (midpoint sample, which equals the left
// endpoint value once breakpoints are aligned).
std::vector<Vector> slot_values(const StepFunction& g, const ToyFock& grid) {
  check_grid(grid);
  const double delta = grid.step();
  for (double b : g.breakpoints()) {
    if (b >= grid.horizon - kBreakpointTolerance) break;
    const double position = b / delta;
    if (std::abs(position - std::round(position)) >
        1e-9 * std::max(1.0, position)) {
      throw GuardError("slot/breakpoint misalignment: breakpoint " +
                       std::to_string(b) + " is not a multiple of the slot "
                       "width " + std::to_string(delta));
    }
  }
  std::vector<Vector> values;
  values.reserve(static_cast<std::size_t>(grid.slots));
  for (int j = 0; j < grid.slots; ++j) values.push_back(g((j + 0.5) * delta));
  return values;
}

Vector slot_vector(const Vector& value, double delta) {
  return hat(std::sqrt(delta) * value);
}

}  // namespace

Matrix increment_matrix(Eigen::Index mu, Eigen::Index nu, double delta,
                        Eigen::Index dhat) {
  if (mu < 0 || nu < 0 || mu >= dhat || nu >= dhat) {
    throw DimensionError("increment_matrix: index out of range");
  }
  double scale = 1.0;
  if (mu == 0 && nu == 0) {
    scale = delta;
  } else if (mu == 0 || nu == 0) {
    scale = std::sqrt(delta);
  }
  return scale * matrix_unit(dhat, dhat, mu, nu);
}

std::vector<Vector> slot_vectors(const StepFunction& g, const ToyFock& grid) {
  std::vector<Vector> out;
  for (const auto& value : slot_values(g, grid)) {
    out.push_back(slot_vector(value, grid.step()));
  }
  return out;
}

AdaptedState::AdaptedState(const Coefficient& phi, const InitialMap& kappa,
                           const Vector& v, const StepFunction& g,
                           const ToyFock& grid)
    : phi_(phi), grid_(grid), m_(phi.space_dim()) {
  if (kappa.source_dim() != m_) {
    throw DimensionError("initial map and coefficient act on different spaces");
  }
  if (v.size() != kappa.cols()) {
    throw DimensionError("initial vector has size " + std::to_string(v.size()) +
                         ", expected " + std::to_string(kappa.cols()));
  }
  if (g.dim() != phi.noise_dim()) {
    throw DimensionError("test function dimension does not match coefficient");
  }
  slots_ = slot_vectors(g, grid);
  v_norm_ = v.norm();
  const double delta = grid.step();
  const Eigen::Index dhat = phi.dhat();

  initial_images_.resize(kappa.rows(), m_);
  for (Eigen::Index a = 0; a < m_; ++a) initial_images_.col(a) = kappa[a] * v;

  // Slot j+1 maps R_j(e_i) to sum_mu f_mu (x) R_j(B_mu e_i) with
  // B_mu = s_mu I + sum_nu s(mu,nu) s_nu theta(mu,nu).
  const Matrix id = Matrix::Identity(m_, m_);
  b_.reserve(slots_.size());
  for (const auto& s : slots_) {
    std::vector<Matrix> per_mu;
    for (Eigen::Index mu = 0; mu < dhat; ++mu) {
      Matrix b = s(mu) * id;
      for (Eigen::Index nu = 0; nu < dhat; ++nu) {
        const Vector kicked = increment_matrix(mu, nu, delta, dhat) * s;
        if (kicked(mu) != Complex(0.0)) b += kicked(mu) * phi.theta(mu, nu);
      }
      per_mu.push_back(std::move(b));
    }
    b_.push_back(std::move(per_mu));
  }

  const auto n = static_cast<std::size_t>(grid.slots);
  tail_.assign(n + 1, 1.0);
  for (std::size_t j = n; j-- > 0;) tail_[j] = tail_[j + 1] * slots_[j].squaredNorm();

  gram_.reserve(n + 1);
  gram_.push_back(initial_images_.adjoint() * initial_images_);
  for (std::size_t j = 0; j < n; ++j) {
    Matrix next = Matrix::Zero(m_, m_);
    for (const auto& b : b_[j]) next += b.adjoint() * gram_.back() * b;
    gram_.push_back(std::move(next));
  }
}

Matrix AdaptedState::gram(int j) const {
  return tail_.at(static_cast<std::size_t>(j)) * gram_.at(static_cast<std::size_t>(j));
}

Matrix AdaptedState::cross_gram(int j, int i) const {
  if (j < i) return cross_gram(i, j).adjoint();
  Matrix x = gram_.at(static_cast<std::size_t>(i));
  for (int k = i; k < j; ++k) {
    // <R_{k+1}(e_a), R_i(e_b) (x) s_{i+1..k+1}> = (sum_mu conj(s_mu) B_mu)^* X.
    Matrix d = Matrix::Zero(m_, m_);
    const auto& s = slots_[static_cast<std::size_t>(k)];
    const auto& b = b_[static_cast<std::size_t>(k)];
    for (std::size_t mu = 0; mu < b.size(); ++mu) {
      d += std::conj(s(static_cast<Eigen::Index>(mu))) * b[mu];
    }
    x = d.adjoint() * x;
  }
  return tail_.at(static_cast<std::size_t>(j)) * x;
}

double AdaptedState::reference_norm() const {
  return v_norm_ * std::sqrt(tail_.front());
}

RealVector AdaptedState::integrand_norms_squared(int j) const {
  const auto& s = slots_.at(static_cast<std::size_t>(j));
  const double root = std::sqrt(grid_.step());
  Vector zeta = s;
  zeta.tail(zeta.size() - 1) /= root;  // g^ = (1, g_{j+1})
  const Matrix g = gram(j);
  RealVector out = RealVector::Zero(m_);
  for (Eigen::Index mu = 0; mu < phi_.dhat(); ++mu) {
    Matrix c = Matrix::Zero(m_, m_);
    for (Eigen::Index nu = 0; nu < phi_.dhat(); ++nu) c += zeta(nu) * phi_.theta(mu, nu);
    out += (c.adjoint() * g * c).diagonal().real();
  }
  return out;
}

Eigen::RowVectorXcd AdaptedState::overlap(const Vector& v_prime,
                                          const StepFunction& g_prime,
                                          int j) const {
  if (v_prime.size() != initial_images_.rows()) {
    throw DimensionError("overlap: v' has wrong size");
  }
  const auto primes = slot_vectors(g_prime, grid_);
  Eigen::RowVectorXcd omega = v_prime.adjoint() * initial_images_;
  for (int k = 0; k < j; ++k) {
    const auto& sp = primes[static_cast<std::size_t>(k)];
    const auto& b = b_[static_cast<std::size_t>(k)];
    Eigen::RowVectorXcd next = Eigen::RowVectorXcd::Zero(m_);
    for (std::size_t mu = 0; mu < b.size(); ++mu) {
      next += std::conj(sp(static_cast<Eigen::Index>(mu))) * (omega * b[mu]);
    }
    const Complex norm = sp.dot(slots_[static_cast<std::size_t>(k)]);
    if (std::abs(norm) < std::numeric_limits<double>::min()) {
      throw GuardError("overlap: exponential vectors are orthogonal on a slot");
    }
    omega = next / norm;
  }
  return omega;
}

AdaptedState euler_solve(const Coefficient& phi, const InitialMap& kappa,
                         const Vector& v, const StepFunction& g,
                         const ToyFock& grid) {
  return AdaptedState(phi, kappa, v, g, grid);
}

Eigen::RowVectorXcd matrix_element_discrete(const AdaptedState& state,
                                            const Vector& v_prime,
                                            const StepFunction& g_prime) {
  return state.overlap(v_prime, g_prime, state.slots());
}

MatrixElementMap matrix_element_discrete(const Coefficient& phi,
                                         const InitialMap& kappa,
                                         const StepFunction& g_prime,
                                         const StepFunction& g,
                                         const ToyFock& grid) {
  const Eigen::Index m = phi.space_dim();
  std::vector<Matrix> images(static_cast<std::size_t>(m),
                             Matrix::Zero(kappa.rows(), kappa.cols()));
  for (Eigen::Index col = 0; col < kappa.cols(); ++col) {
    const auto state =
        euler_solve(phi, kappa, basis_vector(kappa.cols(), col), g, grid);
    for (Eigen::Index row = 0; row < kappa.rows(); ++row) {
      const auto entries = matrix_element_discrete(
          state, basis_vector(kappa.rows(), row), g_prime);
      for (Eigen::Index x = 0; x < m; ++x) {
        images[static_cast<std::size_t>(x)](row, col) = entries(x);
      }
    }
  }
  return MatrixElementMap(kappa.rows(), kappa.cols(), std::move(images));
}

FeReport fe_check(const AdaptedState& state, const StepFunction& g,
                  const FockConstant& constant) {
  const int n = state.slots();
  const double delta = state.grid().step();
  const Eigen::Index m = state.space_dim();

  FeReport report;
  report.lhs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  report.rhs.assign(static_cast<std::size_t>(n) + 1, 0.0);

  const RealVector start = state.gram(0).diagonal().real();
  RealVector integrated = RealVector::Zero(m);
  for (int j = 1; j <= n; ++j) {
    integrated += delta * state.integrand_norms_squared(j - 1);
    const RealVector now = state.gram(j).diagonal().real();
    const RealVector cross = state.cross_gram(j, 0).diagonal().real();
    const double c2 = constant.squared(g, state.grid().time(j));
    for (Eigen::Index x = 0; x < m; ++x) {
      const double lhs = std::max(0.0, now(x) + start(x) - 2.0 * cross(x));
      const double rhs = c2 * integrated(x);
      auto& lhs_max = report.lhs[static_cast<std::size_t>(j)];
      auto& rhs_max = report.rhs[static_cast<std::size_t>(j)];
      lhs_max = std::max(lhs_max, lhs);
      rhs_max = std::max(rhs_max, rhs);
      double ratio = 0.0;
      if (rhs > 0.0) {
        ratio = lhs / rhs;
      } else if (lhs > 1e-28) {
        ratio = std::numeric_limits<double>::infinity();
      }
      if (ratio > report.max_ratio) {
        report.max_ratio = ratio;
        report.worst_step = j;
      }
    }
  }
  return report;
}

double hoelder_measure(const AdaptedState& state, double r, double t) {
  const double delta = state.grid().step();
  const auto index = [&](double time) {
    const double pos = time / delta;
    const long rounded = std::lround(pos);
    if (std::abs(pos - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, pos) ||
        rounded < 0 || rounded > state.slots()) {
      throw GuardError("hoelder_measure: times must lie on the slot grid");
    }
    return static_cast<int>(rounded);
  };
  const int i = index(r);
  const int j = index(t);
  if (i == j) return 0.0;
  const RealVector a = state.gram(j).diagonal().real();
  const RealVector b = state.gram(i).diagonal().real();
  const RealVector cross = state.cross_gram(j, i).diagonal().real();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < a.size(); ++x) {
    worst = std::max(worst, std::sqrt(std::max(0.0, a(x) + b(x) - 2.0 * cross(x))));
  }
  return worst / state.reference_norm();
}

std::vector<ConvergenceRow> convergence_table(const Coefficient& phi,
                                              const InitialMap& kappa,
                                              const StepFunction& g_prime,
                                              const StepFunction& g, double t,
                                              const std::vector<int>& slots) {
  const auto exact = semigroup::matrix_element(phi, kappa, g_prime, g, t);
  std::vector<ConvergenceRow> rows;
  for (int n : slots) {
    const auto approx = matrix_element_discrete(phi, kappa, g_prime, g, {t, n});
    ConvergenceRow row{n, (approx - exact).frobenius_norm(), 0.0};
    if (!rows.empty() && row.error > 0.0) row.ratio = rows.back().error / row.error;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Applies a dhat x dhat operator to one slot of a dense vector.
Vector apply_slot(const Matrix& op, std::size_t slot, const Vector& vec,
                  const DenseState& layout) {
  const auto dhat = static_cast<std::size_t>(layout.dhat);
  std::size_t right = 1;
  for (std::size_t k = slot + 1; k < static_cast<std::size_t>(layout.grid.slots); ++k) {
    right *= dhat;
  }
  const std::size_t left = static_cast<std::size_t>(vec.size()) / (dhat * right);
  Vector out = Vector::Zero(vec.size());
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < dhat; ++a) {
      for (std::size_t b = 0; b < dhat; ++b) {
        const Complex w = op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (w == Complex(0.0)) continue;
        for (std::size_t r = 0; r < right; ++r) {
          out(static_cast<Eigen::Index>((l * dhat + a) * right + r)) +=
              w * vec(static_cast<Eigen::Index>((l * dhat + b) * right + r));
        }
      }
    }
  }
  return out;
}

Vector slot_product(const std::vector<Vector>& slots) {
  Matrix product = Matrix::Ones(1, 1);
  for (const auto& s : slots) product = kron(product, s);
  return product.col(0);
}

}  // namespace

DenseState euler_solve_dense(const Coefficient& phi, const InitialMap& kappa,
                             const Vector& v, const StepFunction& g,
                             const ToyFock& grid) {
  check_grid(grid);
  const Eigen::Index dhat = phi.dhat();
  std::size_t fock_dim = 1;
  for (int k = 0; k < grid.slots; ++k) {
    fock_dim *= static_cast<std::size_t>(dhat);
    if (fock_dim > kDenseSlotCap) {
      throw GuardError("toy Fock slot cap exceeded: (d+1)^N_s > 2^14");
    }
  }
  if (kappa.source_dim() != phi.space_dim() || v.size() != kappa.cols()) {
    throw DimensionError("euler_solve_dense: shape mismatch");
  }
  const auto slots = slot_vectors(g, grid);
  const Vector eps = slot_product(slots);
  const double delta = grid.step();
  const Eigen::Index m = phi.space_dim();

  DenseState state{grid, dhat, kappa.rows(), {}};
  std::vector<Vector> current;
  for (Eigen::Index x = 0; x < m; ++x) {
    current.push_back(kron(kappa[x] * v, eps).col(0));
  }
  state.history.push_back(current);

  for (std::size_t j = 0; j < slots.size(); ++j) {
    std::vector<Vector> next = current;
    for (Eigen::Index mu = 0; mu < dhat; ++mu) {
      for (Eigen::Index nu = 0; nu < dhat; ++nu) {
        const Matrix& theta = phi.theta(mu, nu);
        if (theta.isZero(0.0)) continue;
        const Matrix inc = increment_matrix(mu, nu, delta, dhat);
        for (Eigen::Index i = 0; i < m; ++i) {
          Vector combined = Vector::Zero(current.front().size());
          for (Eigen::Index k = 0; k < m; ++k) {
            if (theta(k, i) != Complex(0.0)) {
              combined += theta(k, i) * current[static_cast<std::size_t>(k)];
            }
          }
          next[static_cast<std::size_t>(i)] += apply_slot(inc, j, combined, state);
        }
      }
    }
    current = std::move(next);
    state.history.push_back(current);
  }
  return state;
}

Vector dense_exponential(const Vector& v_prime, const StepFunction& g_prime,
                         const ToyFock& grid) {
  return kron(v_prime, slot_product(slot_vectors(g_prime, grid))).col(0);
}

double adaptedness_defect(const DenseState& state, const StepFunction& g,
                          int j) {
  const auto slots = slot_vectors(g, state.grid);
  double worst = 0.0;
  for (std::size_t k = static_cast<std::size_t>(j); k < slots.size(); ++k) {
    const Vector& s = slots[k];
    const Matrix orth = Matrix::Identity(state.dhat, state.dhat) -
                        s * s.adjoint() / s.squaredNorm();
    for (const auto& xi : state.history.at(static_cast<std::size_t>(j))) {
      worst = std::max(worst, apply_slot(orth, k, xi, state).norm());
    }
  }
  return worst;
}

}  // namespace qsde::toyfock
