#include "qsde/coalgebra.hpp"

#include <algorithm>
#include <cmath>

#include "qsde/errors.hpp"
#include "qsde/semigroup_engine.hpp"

namespace qsde::coalg {

Functional GeneratorFunctional::slice(const Vector& zeta_prime,
                                      const Vector& zeta) const {
  Functional out(static_cast<Eigen::Index>(varphi.size()));
  for (std::size_t k = 0; k < varphi.size(); ++k) {
    if (varphi[k].rows() != zeta_prime.size() || varphi[k].cols() != zeta.size()) {
      throw DimensionError("generator functional slice: vector size mismatch");
    }
    out(static_cast<Eigen::Index>(k)) = zeta_prime.dot(varphi[k] * zeta);
  }
  return out;
}

double ValidationReport::max_violation() const {
  return std::max({coassociativity, counit_left, counit_right});
}

namespace {

void check_shape(const Coalgebra& c) {
  if (static_cast<Eigen::Index>(c.delta.size()) != c.m || c.counit.size() != c.m) {
    throw DimensionError("coalgebra: delta and counit must have m entries");
  }
  for (const auto& slab : c.delta) {
    if (slab.rows() != c.m || slab.cols() != c.m) {
      throw DimensionError("coalgebra: delta[i] must be m x m");
    }
  }
}

}  // namespace

ValidationReport validate(const Coalgebra& c) {
  check_shape(c);
  const Eigen::Index m = c.m;
  ValidationReport report;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        for (Eigen::Index d = 0; d < m; ++d) {
          Complex left = 0.0;
          Complex right = 0.0;
          for (Eigen::Index j = 0; j < m; ++j) {
            left += c.coproduct(i, j, d) * c.coproduct(j, a, b);
            right += c.coproduct(i, a, j) * c.coproduct(j, b, d);
          }
          report.coassociativity =
              std::max(report.coassociativity, std::abs(left - right));
        }
      }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      Complex left = 0.0;
      Complex right = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        left += c.coproduct(i, j, k) * c.counit(j);
        right += c.coproduct(i, k, j) * c.counit(j);
      }
      const double target = (i == k) ? 1.0 : 0.0;
      report.counit_left = std::max(report.counit_left, std::abs(left - target));
      report.counit_right = std::max(report.counit_right, std::abs(right - target));
    }
  }
  return report;
}

Coalgebra group_like() {
  return {1, {Matrix::Ones(1, 1)}, Vector::Ones(1)};
}

Coalgebra divided_power(Eigen::Index m) {
  if (m < 1) throw DimensionError("divided_power: need m >= 1");
  Coalgebra c{m, std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(m, m)),
              Vector::Zero(m)};
  for (Eigen::Index n = 0; n < m; ++n) {
    for (Eigen::Index k = 0; k <= n; ++k) c.delta[static_cast<std::size_t>(n)](k, n - k) = 1.0;
  }
  c.counit(0) = 1.0;
  return c;
}

Functional convolve(const Functional& lambda, const Functional& mu,
                    const Coalgebra& c) {
  if (lambda.size() != c.m || mu.size() != c.m) {
    throw DimensionError("convolve: functional size does not match coalgebra");
  }
  Functional out(c.m);
  for (Eigen::Index i = 0; i < c.m; ++i) {
    out(i) = lambda.transpose() * c.delta[static_cast<std::size_t>(i)] * mu;
  }
  return out;
}

Coefficient induced_coefficient(const Coalgebra& c,
                                const GeneratorFunctional& phi) {
  check_shape(c);
  if (static_cast<Eigen::Index>(phi.varphi.size()) != c.m) {
    throw DimensionError("generator functional needs one matrix per basis vector");
  }
  const Eigen::Index dhat = phi.dhat();
  for (const auto& v : phi.varphi) {
    if (v.rows() != dhat || v.cols() != dhat) {
      throw DimensionError("generator functional matrices must be (d+1) x (d+1)");
    }
  }
  Coefficient out(dhat - 1, c.m);
  for (Eigen::Index mu = 0; mu < dhat; ++mu) {
    for (Eigen::Index nu = 0; nu < dhat; ++nu) {
      Matrix& theta = out.theta(mu, nu);
      for (Eigen::Index i = 0; i < c.m; ++i) {
        for (Eigen::Index j = 0; j < c.m; ++j) {
          Complex sum = 0.0;
          for (Eigen::Index k = 0; k < c.m; ++k) {
            sum += c.coproduct(i, j, k) * phi.varphi[static_cast<std::size_t>(k)](mu, nu);
          }
          theta(j, i) = sum;
        }
      }
    }
  }
  return out;
}

namespace {

// Adds the part of w outside span(basis) if it is numerically nonzero.
bool admit(Matrix& basis, Vector w) {
  const double scale = w.norm();
  if (scale == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) w -= basis * (basis.adjoint() * w);
  }
  const double rest = w.norm();
  if (rest <= kRankTolerance * scale) return false;
  basis.conservativeResize(basis.rows(), basis.cols() + 1);
  basis.col(basis.cols() - 1) = w / rest;
  return true;
}

}  // namespace

LocalisedSubspace localise_under(const std::vector<Matrix>& generators,
                                 const Vector& x, Eigen::Index cap) {
  if (cap < 1) throw DimensionError("localise: cap must be >= 1");
  const Eigen::Index m = x.size();
  for (const auto& a : generators) {
    if (a.rows() != m || a.cols() != m) {
      throw DimensionError("localise: generator does not act on the space of x");
    }
  }
  LocalisedSubspace out;
  out.basis = Matrix(m, 0);
  admit(out.basis, x);
  for (Eigen::Index next = 0; next < out.basis.cols(); ++next) {
    const Vector b = out.basis.col(next);
    for (const auto& a : generators) {
      if (admit(out.basis, a * b) && out.basis.cols() > cap) {
        throw GuardError("cap exceeded: not finitely localisable at this cap");
      }
    }
  }
  if (out.basis.cols() > 0) {
    const Matrix projector =
        Matrix::Identity(m, m) - out.basis * out.basis.adjoint();
    for (const auto& a : generators) {
      out.invariance_residual = std::max(
          out.invariance_residual, spectral_norm(projector * a * out.basis));
    }
  }
  return out;
}

LocalisedSubspace localise(const Coefficient& phi, const Vector& x,
                           Eigen::Index cap) {
  std::vector<Matrix> generators;
  for (Eigen::Index mu = 0; mu < phi.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < phi.dhat(); ++nu) {
      generators.push_back(phi.theta(mu, nu));
    }
  }
  return localise_under(generators, x, cap);
}

LocalisedSubspace localise_slices(const Coefficient& phi, const Vector& x,
                                  const std::vector<Vector>& f_prime,
                                  const std::vector<Vector>& f,
                                  Eigen::Index cap) {
  std::vector<Matrix> generators;
  for (const auto& cp : f_prime) {
    for (const auto& c : f) generators.push_back(phi.psi(cp, c));
  }
  return localise_under(generators, x, cap);
}

Coefficient restrict_coefficient(const Coefficient& phi, const Matrix& basis) {
  if (basis.rows() != phi.space_dim()) {
    throw DimensionError("restrict_coefficient: basis lives in another space");
  }
  std::vector<Matrix> theta;
  for (Eigen::Index mu = 0; mu < phi.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < phi.dhat(); ++nu) {
      theta.push_back(basis.adjoint() * phi.theta(mu, nu) * basis);
    }
  }
  return Coefficient(phi.noise_dim(), std::move(theta));
}

Functional convolution_cocycle(const Coalgebra& c,
                               const GeneratorFunctional& phi,
                               const StepFunction& g_prime,
                               const StepFunction& g, double t) {
  const Coefficient induced = induced_coefficient(c, phi);
  Functional out(c.m);
  for (Eigen::Index i = 0; i < c.m; ++i) {
    const Vector x = basis_vector(c.m, i);
    const auto sub = localise(induced, x, c.m);
    const Coefficient local = restrict_coefficient(induced, sub.basis);
    const Matrix transfer = semigroup::transfer(local, g_prime, g, t);
    const Vector image = sub.basis * (transfer * (sub.basis.adjoint() * x));
    out(i) = c.counit.transpose() * image;
  }
  return out;
}

double convolution_residual(const Coalgebra& c, const GeneratorFunctional& phi,
                            const StepFunction& g_prime, const StepFunction& g,
                            double t, int steps) {
  if (steps < 2 || steps % 2 != 0) {
    throw DimensionError("convolution_residual: steps must be even and >= 2");
  }
  Functional integral = Functional::Zero(c.m);
  if (t > 0.0) {
    const StepFunction pair[] = {g_prime, g};
    for (const auto& piece : merged_grid(pair, t)) {
      const Functional rate =
          phi.slice(hat(piece.values[0]), hat(piece.values[1]));
      const double h = piece.length() / steps;
      for (int k = 0; k <= steps; ++k) {
        const double weight = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const double s = (k == steps) ? piece.end : piece.begin + k * h;
        const Functional l = convolution_cocycle(c, phi, g_prime, g, s);
        integral += (weight * h / 3.0) * convolve(l, rate, c);
      }
    }
  }
  const Functional lt = convolution_cocycle(c, phi, g_prime, g, t);
  return (lt - c.counit - integral).cwiseAbs().maxCoeff();
}

ConsistencyReport consistency(const Coalgebra& c,
                              const GeneratorFunctional& phi,
                              const StepFunction& g_prime,
                              const StepFunction& g, double t) {
  const Matrix full =
      semigroup::transfer(induced_coefficient(c, phi), g_prime, g, t);
  const Functional l = convolution_cocycle(c, phi, g_prime, g, t);
  ConsistencyReport report;
  report.counit_slice =
      (full.transpose() * c.counit - l).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < c.m; ++i) {
    const Vector expected = c.delta[static_cast<std::size_t>(i)] * l;
    report.coproduct =
        std::max(report.coproduct, (full.col(i) - expected).cwiseAbs().maxCoeff());
  }
  return report;
}

}  // namespace qsde::coalg
