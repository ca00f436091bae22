#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qsde/coefficient.hpp"
#include "qsde/estimates.hpp"
#include "qsde/noise_model.hpp"

/// Matrix elements from the iterated-integral series over the Guichardet
/// space of finite subsets of [0, t]. For step-function data the integral
/// over n-point subsets is exact: points falling in plateau j contribute
/// |I_j|^{n_j}/n_j! psi_j^{n_j}, so each level is a finite sum over weak
/// compositions of n.
namespace qsde::guichardet {

inline constexpr int kDefaultTruncation = 18;

/// Per-query accumulator. levels[n] = A_n(t) acting on coordinates of V,
/// earliest plateau leftmost.
struct SeriesAccumulator {
  std::vector<double> lengths;                  // |I_j|
  std::vector<Matrix> generators;               // psi_j
  std::vector<std::vector<Matrix>> powers;      // |I_j|^k / k! psi_j^k
  std::vector<Matrix> levels;                   // A_0 .. A_N
  double growth = 0.0;                          // M t, M = max_j ||psi_j||
};

/// Builds A_0..A_N. Does not check the tail guard.
SeriesAccumulator accumulate(const Coefficient& phi,
                             const StepFunction& g_prime,
                             const StepFunction& g, double t, int truncation);

/// A_n by explicit enumeration of the weak compositions of n into
/// `acc.lengths.size()` parts; `count` receives the number enumerated.
Matrix level_by_enumeration(const SeriesAccumulator& acc, int n,
                            std::uint64_t* count = nullptr);

/// sum_{n > truncation} x^n / n!, rigorous upper bound. Requires
/// x < truncation + 2, else GuardError.
double tail_sum(double x, int truncation);

struct SeriesResult {
  MatrixElementMap value;
  double tail_bound = 0.0;
  int truncation_level = 0;
};

/// kappa o sum_{n <= N} A_n(t) with
/// ||error||_F <= ||kappa||_F sum_{n > N} (M t)^n / n!.
/// GuardError("truncation level too small for rigorous tail") if M t >= N+2.
SeriesResult truncated_series(const Coefficient& phi, const InitialMap& kappa,
                              const StepFunction& g_prime,
                              const StepFunction& g, double t,
                              int truncation = kDefaultTruncation);

/// kappa o phi^{g'^(s_1)}_{g^(s_1)} o ... o phi^{g'^(s_n)}_{g^(s_n)}
/// for sigma = {s_1 < ... < s_n}; the empty set gives kappa.
MatrixElementMap upsilon_sigma(const Coefficient& phi, const InitialMap& kappa,
                               const StepFunction& g_prime,
                               const StepFunction& g,
                               std::span<const double> sigma);

/// Half-Hölder bound on ||k_t - k_r|| per unit ||v (x) eps(g)||:
///   sqrt(t - r) ||kappa|| C(g,T) sum_n C^n / sqrt(n!),
///   C = C(g,T) sqrt(d+1) max ||phi_{|zeta>}||  over plateau values of g^
/// on [0, T]. ||kappa|| is the spectral norm of its vectorization, an upper
/// bound for the operator norm.
double hoelder_bound(const Coefficient& phi, const InitialMap& kappa,
                     const StepFunction& g, double r, double t, double horizon,
                     const FockConstant& constant = {});

}  // namespace qsde::guichardet
