#pragma once

#include <span>
#include <vector>

#include "qsde/coefficient.hpp"
#include "qsde/noise_model.hpp"

/// Matrix elements k^{g',g}_t of the QSDE solution through the semigroup
/// decomposition: an ordered product of associated semigroups exp(s psi_j)
/// along the plateau grid of (g', g). All elements are normalized by
/// exp(-<g'_{[0,t)}, g_{[0,t)}>).
namespace qsde::semigroup {

/// exp(t psi_{c',c}).
Matrix associated_semigroup(const Coefficient& phi, const Vector& c_prime,
                            const Vector& c, double t);

struct Decomposition {
  std::vector<GridInterval> intervals;  // values[0] = g', values[1] = g
  std::vector<Matrix> generators;       // psi_j per interval
};

/// Plateau grid of (g', g) on [0, t] and its generators. Empty for t = 0.
Decomposition decompose(const Coefficient& phi, const StepFunction& g_prime,
                        const StepFunction& g, double t,
                        std::span<const double> extra_breakpoints = {});

/// k^{g',g}_t for kappa = id_V, as a matrix on coordinates of V:
/// P_1(|I_1|) P_2(|I_2|) ... P_K(|I_K|) with the earliest interval leftmost.
Matrix transfer(const Coefficient& phi, const StepFunction& g_prime,
                const StepFunction& g, double t,
                std::span<const double> extra_breakpoints = {});

/// kappa o transfer(...). At t = 0 this is kappa.
MatrixElementMap matrix_element(const Coefficient& phi, const InitialMap& kappa,
                                const StepFunction& g_prime,
                                const StepFunction& g, double t,
                                std::span<const double> extra_breakpoints = {});

/// ||k_{r+t} - k_r o k^{S*_r g', S*_r g}_t||_F with kappa = id.
double cocycle_residual(const Coefficient& phi, const StepFunction& g_prime,
                        const StepFunction& g, double r, double t);

/// max_x ||k_t(x) - kappa(x) - int_0^t k_s(phi^{g'^(s)}_{g^(s)}(x)) ds||_F
/// with composite Simpson, `quadrature_steps` (even, >= 2) per grid
/// interval. Independent of the exponential product for the integral.
double weak_residual(const Coefficient& phi, const InitialMap& kappa,
                     const StepFunction& g_prime, const StepFunction& g,
                     double t, int quadrature_steps);

}  // namespace qsde::semigroup
