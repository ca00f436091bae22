#include "qsde/semigroup_engine.hpp"

#include <algorithm>

#include "qsde/errors.hpp"

namespace qsde::semigroup {

namespace {

void check_dims(const Coefficient& phi, const StepFunction& g_prime,
                const StepFunction& g) {
  if (g_prime.dim() != phi.noise_dim() || g.dim() != phi.noise_dim()) {
    throw DimensionError("test function dimension does not match coefficient");
  }
}

}  // namespace

Matrix associated_semigroup(const Coefficient& phi, const Vector& c_prime,
                            const Vector& c, double t) {
  if (t < 0.0) throw DimensionError("associated_semigroup: negative time");
  return expm(t * phi.psi(c_prime, c));
}

Decomposition decompose(const Coefficient& phi, const StepFunction& g_prime,
                        const StepFunction& g, double t,
                        std::span<const double> extra_breakpoints) {
  check_dims(phi, g_prime, g);
  if (t < 0.0) throw DimensionError("decompose: negative time");
  Decomposition out;
  if (t == 0.0) return out;
  const StepFunction pair[] = {g_prime, g};
  out.intervals = merged_grid(pair, t, extra_breakpoints);
  out.generators.reserve(out.intervals.size());
  for (const auto& piece : out.intervals) {
    out.generators.push_back(phi.psi(piece.values[0], piece.values[1]));
  }
  return out;
}

Matrix transfer(const Coefficient& phi, const StepFunction& g_prime,
                const StepFunction& g, double t,
                std::span<const double> extra_breakpoints) {
  const auto dec = decompose(phi, g_prime, g, t, extra_breakpoints);
  const Eigen::Index m = phi.space_dim();
  Matrix out = Matrix::Identity(m, m);
  for (std::size_t j = 0; j < dec.intervals.size(); ++j) {
    out = out * expm(dec.intervals[j].length() * dec.generators[j]);
  }
  return out;
}

MatrixElementMap matrix_element(const Coefficient& phi, const InitialMap& kappa,
                                const StepFunction& g_prime,
                                const StepFunction& g, double t,
                                std::span<const double> extra_breakpoints) {
  if (kappa.source_dim() != phi.space_dim()) {
    throw DimensionError("initial map and coefficient act on different spaces");
  }
  return kappa.compose(transfer(phi, g_prime, g, t, extra_breakpoints));
}

double cocycle_residual(const Coefficient& phi, const StepFunction& g_prime,
                        const StepFunction& g, double r, double t) {
  if (r < 0.0 || t < 0.0) throw DimensionError("cocycle_residual: negative time");
  const Matrix whole = transfer(phi, g_prime, g, r + t);
  const Matrix head = transfer(phi, g_prime, g, r);
  const Matrix tail =
      transfer(phi, shift_back(g_prime, r), shift_back(g, r), t);
  return (whole - head * tail).norm();
}

double weak_residual(const Coefficient& phi, const InitialMap& kappa,
                     const StepFunction& g_prime, const StepFunction& g,
                     double t, int quadrature_steps) {
  if (quadrature_steps < 2 || quadrature_steps % 2 != 0) {
    throw DimensionError("weak_residual: quadrature_steps must be even and >= 2");
  }
  const Eigen::Index m = phi.space_dim();
  const auto dec = decompose(phi, g_prime, g, t);

  Matrix integral = Matrix::Zero(m, m);
  Matrix start = Matrix::Identity(m, m);  // k_s at the left end of the piece
  for (std::size_t j = 0; j < dec.intervals.size(); ++j) {
    const double len = dec.intervals[j].length();
    const Matrix& psi = dec.generators[j];
    const double h = len / quadrature_steps;
    for (int k = 0; k <= quadrature_steps; ++k) {
      const double weight =
          (k == 0 || k == quadrature_steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      integral += (weight * h / 3.0) * (start * expm((k * h) * psi) * psi);
    }
    start = start * expm(len * psi);
  }
  const Matrix defect = start - Matrix::Identity(m, m) - integral;
  const auto residual = kappa.compose(defect);
  double worst = 0.0;
  for (const auto& image : residual.images()) worst = std::max(worst, image.norm());
  return worst;
}

}  // namespace qsde::semigroup
