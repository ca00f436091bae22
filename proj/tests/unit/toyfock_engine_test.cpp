#include <cmath>

#include <gtest/gtest.h>

#include "qsde/errors.hpp"
#include "qsde/guichardet_engine.hpp"
#include "qsde/semigroup_engine.hpp"
#include "qsde/toyfock_engine.hpp"
#include "random_instances.hpp"

namespace qsde {
namespace {

using testing::scalar_decay;
using toyfock::ToyFock;

Vector scalar(Complex z) {
  Vector v(1);
  v(0) = z;
  return v;
}

const InitialMap kOne(1, 1, {Matrix::Ones(1, 1)});

Complex paired(const Matrix& inc, const Vector& gp, const Vector& g, double delta) {
  const Vector sp = hat(std::sqrt(delta) * gp), s = hat(std::sqrt(delta) * g);
  return sp.dot(inc * s);
}

TEST(IncrementMatrix, PairedElements) {
  const double delta = 0.01;
  const Vector gp = scalar(Complex(0.3, -0.7)), g = scalar(Complex(1.1, 0.2));
  const auto inc = [&](int mu, int nu) { return toyfock::increment_matrix(mu, nu, delta, 2); };
  EXPECT_LT(std::abs(paired(inc(0, 0), gp, g, delta) - delta), 1e-16);
  EXPECT_LT(std::abs(paired(inc(1, 0), gp, g, delta) - delta * std::conj(gp(0))), 1e-16);
  EXPECT_LT(std::abs(paired(inc(0, 1), gp, g, delta) - delta * g(0)), 1e-16);
  EXPECT_LT(std::abs(paired(inc(1, 1), gp, g, delta) - delta * std::conj(gp(0)) * g(0)),
            1e-16);
  EXPECT_EQ(inc(0, 0)(0, 0), Complex(delta));
  EXPECT_EQ(inc(1, 0)(1, 0), Complex(std::sqrt(delta)));
  EXPECT_EQ(inc(1, 1)(1, 1), Complex(1.0));
  EXPECT_THROW(toyfock::increment_matrix(2, 0, delta, 2), DimensionError);
}

TEST(SlotVectors, MisalignmentIsRejected) {
  const auto g = StepFunction::indicator(scalar(1.0), 0.0, 0.3);
  EXPECT_THROW(toyfock::slot_vectors(g, {1.0, 8}), GuardError);
  EXPECT_NO_THROW(toyfock::slot_vectors(g, {1.0, 10}));
  // Breakpoints at or past the horizon do not constrain the grid.
  const auto late = StepFunction::indicator(scalar(1.0), 0.0, 1.37);
  EXPECT_NO_THROW(toyfock::slot_vectors(late, {1.0, 8}));
}

TEST(DiscreteMatrixElement, ZeroCoefficientGivesKappa) {
  testing::Rng rng(81);
  const auto kappa = testing::random_initial_map(rng, 2, 2, 2);
  const auto g = testing::random_grid_step_function(rng, 1, 3, 1.0, 16);
  const auto gp = testing::random_grid_step_function(rng, 1, 3, 1.0, 16);
  const auto k = toyfock::matrix_element_discrete(Coefficient(1, 2), kappa, gp, g, {1.0, 16});
  EXPECT_LT((k - kappa).frobenius_norm(), 1e-14);
}

TEST(DiscreteMatrixElement, ScalarProductFormula) {
  const StepFunction zero(1);
  for (int n : {1, 7, 64}) {
    const auto k = toyfock::matrix_element_discrete(scalar_decay(), kOne, zero, zero, {1.0, n});
    EXPECT_NEAR(std::abs(k[0](0, 0) - std::pow(1.0 - 1.0 / n, n)), 0.0, 1e-14);
  }
  const auto k = toyfock::matrix_element_discrete(scalar_decay(), kOne, zero, zero, {1.0, 64});
  EXPECT_LT(std::abs(k[0](0, 0) - std::exp(-1.0)), 8e-3);
}

TEST(DiscreteMatrixElement, ErrorHalvesWithSlots) {
  const StepFunction zero(1);
  const auto rows =
      toyfock::convergence_table(scalar_decay(), kOne, zero, zero, 1.0, {8, 16, 32, 64});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].ratio, 1.8);
    EXPECT_LT(rows[i].ratio, 2.2);
  }
}

TEST(DiscreteMatrixElement, OneSlotFirstOrder) {
  testing::Rng rng(82);
  for (double delta : {1e-2, 1e-3}) {
    const auto phi = testing::random_coefficient(rng, 1, 1);
    const Vector cp = rng.vector(1), c = rng.vector(1);
    const auto g = StepFunction::indicator(c, 0.0, 5.0);
    const auto gp = StepFunction::indicator(cp, 0.0, 5.0);
    const auto k = toyfock::matrix_element_discrete(phi, kOne, gp, g, {delta, 1});
    const Complex expected = 1.0 + delta * phi.psi(cp, c)(0, 0);
    EXPECT_LT(std::abs(k[0](0, 0) - expected), 50.0 * delta * delta);
  }
}

TEST(DiscreteMatrixElement, ZeroConvergenceTable) {
  testing::Rng rng(83);
  const auto g = testing::random_grid_step_function(rng, 1, 2, 1.0, 8);
  for (const auto& row :
       toyfock::convergence_table(Coefficient(1, 2), testing::identity_map(2), g, g, 1.0,
                                  {8, 16, 32})) {
    EXPECT_LT(row.error, 1e-14);
  }
}

struct DenseFixture {
  Coefficient phi;
  InitialMap kappa;
  Vector v;
  StepFunction g;
  StepFunction gp;
  ToyFock grid;
};

DenseFixture make_fixture(std::uint64_t seed) {
  testing::Rng rng(seed);
  const ToyFock grid{0.8, 6};
  return {testing::random_coefficient(rng, 1, 2, 0.7), testing::random_initial_map(rng, 2, 2, 2),
          rng.vector(2), testing::random_grid_step_function(rng, 1, 3, 0.8, 6, 0.8),
          testing::random_grid_step_function(rng, 1, 3, 0.8, 6, 0.8), grid};
}

// The compressed Gram recursion against fully materialized vectors.
TEST(AdaptedState, MatchesDenseVectors) {
  for (std::uint64_t seed : {84u, 85u, 86u}) {
    const auto f = make_fixture(seed);
    const auto dense = toyfock::euler_solve_dense(f.phi, f.kappa, f.v, f.g, f.grid);
    const auto state = toyfock::euler_solve(f.phi, f.kappa, f.v, f.g, f.grid);
    const auto at = [&](int j) {
      Matrix cols(dense.history[0][0].size(), 2);
      for (int x = 0; x < 2; ++x) cols.col(x) = dense.history[std::size_t(j)][std::size_t(x)];
      return cols;
    };
    for (int j = 0; j <= f.grid.slots; ++j) {
      const Matrix xj = at(j);
      const Matrix gram = xj.adjoint() * xj;
      EXPECT_LT((state.gram(j) - gram).norm(), 1e-12 * gram.norm());
      for (int i = 0; i <= f.grid.slots; i += 2) {
        const Matrix cross = xj.adjoint() * at(i);
        EXPECT_LT((state.cross_gram(j, i) - cross).norm(), 1e-12 * gram.norm());
      }
    }
    const double eps = toyfock::dense_exponential(basis_vector(2, 0), f.g, f.grid).norm();
    EXPECT_NEAR(state.reference_norm(), eps * f.v.norm(), 1e-12 * eps * f.v.norm());

    const Vector vp = Vector::Ones(2);
    const Vector eps_p = toyfock::dense_exponential(vp, f.gp, f.grid);
    Complex norm = 1.0;
    for (std::size_t k = 0; k < 6; ++k) {
      norm *= toyfock::slot_vectors(f.gp, f.grid)[k].dot(toyfock::slot_vectors(f.g, f.grid)[k]);
    }
    const Eigen::RowVectorXcd expected = eps_p.adjoint() * at(f.grid.slots) / norm;
    const auto overlap = toyfock::matrix_element_discrete(state, vp, f.gp);
    EXPECT_LT((overlap - expected).norm(), 1e-12 * expected.norm());
  }
}

TEST(AdaptedState, DenseIsAdapted) {
  const auto f = make_fixture(87);
  const auto dense = toyfock::euler_solve_dense(f.phi, f.kappa, f.v, f.g, f.grid);
  for (int j = 0; j < f.grid.slots; ++j) {
    EXPECT_LT(toyfock::adaptedness_defect(dense, f.g, j), 1e-13);
  }
}

// <v' eps'(g'), (xi_{j+1} - xi_j)(x)> = Delta <v' eps'(g'), xi_j(psi_j x)> / <s'_j, s_j>:
// the slot pairing of the increment replaces the slot overlap <s'_j, s_j>,
// which is 1 + O(Delta).
TEST(AdaptedState, DiscreteFundamentalFormula) {
  const auto f = make_fixture(88);
  const auto dense = toyfock::euler_solve_dense(f.phi, f.kappa, f.v, f.g, f.grid);
  const Vector vp = Vector::Ones(2);
  const Vector eps_p = toyfock::dense_exponential(vp, f.gp, f.grid);
  const double delta = f.grid.step();
  const auto slots = toyfock::slot_vectors(f.g, f.grid);
  const auto primes = toyfock::slot_vectors(f.gp, f.grid);
  for (int j = 0; j < f.grid.slots; ++j) {
    const Complex overlap = primes[std::size_t(j)].dot(slots[std::size_t(j)]);
    const double mid = (j + 0.5) * delta;
    const Matrix psi = f.phi.psi(f.gp(mid), f.g(mid));
    const auto& now = dense.history[std::size_t(j)];
    const auto& next = dense.history[std::size_t(j) + 1];
    for (int x = 0; x < 2; ++x) {
      const Complex lhs = eps_p.dot(next[std::size_t(x)] - now[std::size_t(x)]);
      Complex rhs = 0.0;
      for (int k = 0; k < 2; ++k) rhs += psi(k, x) * eps_p.dot(now[std::size_t(k)]);
      EXPECT_LT(std::abs(lhs - delta * rhs / overlap), 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(DenseState, CapIsEnforced) {
  const StepFunction zero(1);
  EXPECT_THROW(toyfock::euler_solve_dense(scalar_decay(), kOne, Vector::Ones(1), zero, {1.0, 15}),
               GuardError);
  EXPECT_NO_THROW(toyfock::euler_solve_dense(scalar_decay(), kOne, Vector::Ones(1), zero, {1.0, 14}));
}

TEST(FeCheck, ZeroCoefficient) {
  const StepFunction zero(1);
  const auto state = toyfock::euler_solve(Coefficient(1, 1), kOne, Vector::Ones(1), zero, {1.0, 16});
  const auto report = toyfock::fe_check(state, zero);
  EXPECT_EQ(report.max_ratio, 0.0);
  for (double x : report.lhs) EXPECT_LT(x, 1e-30);
  for (double x : report.rhs) EXPECT_EQ(x, 0.0);
}

TEST(FeCheck, ScalarWithinDefaultConstant) {
  const StepFunction zero(1);
  const auto state = toyfock::euler_solve(scalar_decay(), kOne, Vector::Ones(1), zero, {1.0, 64});
  EXPECT_LE(toyfock::fe_check(state, zero).max_ratio, 1.0);
}

TEST(FeCheck, StableUnderRefinement) {
  testing::Rng rng(89);
  const auto phi = testing::random_coefficient(rng, 1, 2, 0.5);
  const auto g = testing::random_grid_step_function(rng, 1, 2, 1.0, 8);
  const Vector v = Vector::Ones(2);
  const auto kappa = testing::random_initial_map(rng, 2, 2, 2);
  const double coarse = toyfock::fe_check(toyfock::euler_solve(phi, kappa, v, g, {1.0, 64}), g).max_ratio;
  const double fine = toyfock::fe_check(toyfock::euler_solve(phi, kappa, v, g, {1.0, 128}), g).max_ratio;
  EXPECT_NEAR(coarse, fine, 0.1 * coarse);
  EXPECT_LE(fine, 1.0);
}

TEST(FeCheck, LhsMatchesDenseDistance) {
  const auto f = make_fixture(90);
  const auto dense = toyfock::euler_solve_dense(f.phi, f.kappa, f.v, f.g, f.grid);
  const auto state = toyfock::euler_solve(f.phi, f.kappa, f.v, f.g, f.grid);
  const auto report = toyfock::fe_check(state, f.g);
  for (int j = 1; j <= f.grid.slots; ++j) {
    double worst = 0.0;
    for (int x = 0; x < 2; ++x) {
      worst = std::max(worst, (dense.history[std::size_t(j)][std::size_t(x)] -
                               dense.history[0][std::size_t(x)]).squaredNorm());
    }
    EXPECT_NEAR(report.lhs[std::size_t(j)], worst, 1e-11 * std::max(1.0, worst));
  }
}

TEST(HoelderMeasure, Examples) {
  const StepFunction zero(1);
  const auto state = toyfock::euler_solve(scalar_decay(), kOne, Vector::Ones(1), zero, {1.0, 64});
  EXPECT_EQ(toyfock::hoelder_measure(state, 0.5, 0.5), 0.0);
  EXPECT_THROW(toyfock::hoelder_measure(state, 0.0, 0.3), GuardError);
  double worst = 0.0;
  for (int i = 0; i < 64; i += 3) {
    for (int j = i + 1; j <= 64; j += 5) {
      const double r = i / 64.0, t = j / 64.0;
      worst = std::max(worst, toyfock::hoelder_measure(state, r, t) / std::sqrt(t - r));
    }
  }
  EXPECT_LT(worst, 1.0);
}

TEST(HoelderMeasure, BelowAnalyticBound) {
  testing::Rng rng(91);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index m = rng.integer(1, 2);
    const auto phi = testing::random_coefficient(rng, 1, m, 0.5);
    const auto kappa = testing::random_initial_map(rng, m, 1, 1);
    const auto g = testing::random_grid_step_function(rng, 1, 2, 1.0, 128);
    const auto state = toyfock::euler_solve(phi, kappa, Vector::Ones(1), g, {1.0, 128});
    for (auto [r, t] : {std::pair{0.0, 1.0}, {0.25, 0.5}, {0.5, 0.5 + 1.0 / 128}}) {
      EXPECT_LE(toyfock::hoelder_measure(state, r, t),
                guichardet::hoelder_bound(phi, kappa, g, r, t, 1.0));
    }
  }
}

}  // namespace
}  // namespace qsde
