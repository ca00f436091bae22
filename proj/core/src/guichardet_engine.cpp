#include "qsde/guichardet_engine.hpp"

#include <algorithm>
#include <cmath>

#include "qsde/errors.hpp"

namespace qsde::guichardet {

SeriesAccumulator accumulate(const Coefficient& phi,
                             const StepFunction& g_prime,
                             const StepFunction& g, double t, int truncation) {
  if (truncation < 0) throw DimensionError("truncation level must be >= 0");
  if (t < 0.0) throw DimensionError("negative time");
  if (g_prime.dim() != phi.noise_dim() || g.dim() != phi.noise_dim()) {
    throw DimensionError("test function dimension does not match coefficient");
  }
  const Eigen::Index m = phi.space_dim();
  const auto levels = static_cast<std::size_t>(truncation) + 1;

  SeriesAccumulator acc;
  if (t > 0.0) {
    const StepFunction pair[] = {g_prime, g};
    for (const auto& piece : merged_grid(pair, t)) {
      acc.lengths.push_back(piece.length());
      acc.generators.push_back(phi.psi(piece.values[0], piece.values[1]));
    }
  }

  double max_norm = 0.0;
  for (std::size_t j = 0; j < acc.generators.size(); ++j) {
    max_norm = std::max(max_norm, spectral_norm(acc.generators[j]));
    std::vector<Matrix> pw;
    pw.reserve(levels);
    pw.push_back(Matrix::Identity(m, m));
    const Matrix step = acc.lengths[j] * acc.generators[j];
    for (std::size_t k = 1; k < levels; ++k) {
      pw.push_back(pw.back() * step / static_cast<double>(k));
    }
    acc.powers.push_back(std::move(pw));
  }
  acc.growth = max_norm * t;

  // Convolution over plateaus: after processing plateau j, level n holds the
  // sum over weak compositions of n into the first j parts.
  std::vector<Matrix> level(levels, Matrix::Zero(m, m));
  level[0] = Matrix::Identity(m, m);
  for (const auto& pw : acc.powers) {
    std::vector<Matrix> next(levels, Matrix::Zero(m, m));
    for (std::size_t n = 0; n < levels; ++n) {
      for (std::size_t k = 0; k <= n; ++k) next[n] += level[n - k] * pw[k];
    }
    level = std::move(next);
  }
  acc.levels = std::move(level);
  return acc;
}

namespace {

void enumerate(const SeriesAccumulator& acc, std::size_t part, int remaining,
               const Matrix& prefix, Matrix& sum, std::uint64_t& count) {
  if (part + 1 == acc.powers.size()) {
    sum += prefix * acc.powers[part][static_cast<std::size_t>(remaining)];
    ++count;
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    enumerate(acc, part + 1, remaining - k,
              prefix * acc.powers[part][static_cast<std::size_t>(k)], sum,
              count);
  }
}

}  // namespace

Matrix level_by_enumeration(const SeriesAccumulator& acc, int n,
                            std::uint64_t* count) {
  if (n < 0 || acc.levels.empty() ||
      static_cast<std::size_t>(n) >= acc.levels.size()) {
    throw DimensionError("level_by_enumeration: level out of range");
  }
  const Eigen::Index m = acc.levels.front().rows();
  Matrix sum = Matrix::Zero(m, m);
  std::uint64_t enumerated = 0;
  if (acc.powers.empty()) {
    // No plateaus (t = 0): only the empty composition of 0 exists.
    if (n == 0) {
      sum = Matrix::Identity(m, m);
      enumerated = 1;
    }
  } else {
    enumerate(acc, 0, n, Matrix::Identity(m, m), sum, enumerated);
  }
  if (count) *count = enumerated;
  return sum;
}

double tail_sum(double x, int truncation) {
  if (x < 0.0) throw DimensionError("tail_sum: negative argument");
  if (x >= truncation + 2.0) {
    throw GuardError("truncation level too small for rigorous tail");
  }
  if (x == 0.0) return 0.0;
  // x^n/n! at n = truncation + 1.
  double term = 1.0;
  for (int k = 1; k <= truncation + 1; ++k) term *= x / k;
  double sum = 0.0;
  int n = truncation + 1;
  // Sum terms explicitly while they matter, then close with the geometric
  // bound sum_{k >= n} x^k/k! <= x^n/n! / (1 - x/(n+1)).
  for (int guard = 0; guard < 4096; ++guard) {
    if (term <= 1e-18 * sum || term == 0.0) break;
    sum += term;
    ++n;
    term *= x / n;
  }
  sum += term / (1.0 - x / (n + 1.0));
  return sum * (1.0 + 1e-12);
}

SeriesResult truncated_series(const Coefficient& phi, const InitialMap& kappa,
                              const StepFunction& g_prime,
                              const StepFunction& g, double t, int truncation) {
  if (kappa.source_dim() != phi.space_dim()) {
    throw DimensionError("initial map and coefficient act on different spaces");
  }
  const auto acc = accumulate(phi, g_prime, g, t, truncation);
  const double tail = tail_sum(acc.growth, truncation);

  Matrix total = Matrix::Zero(phi.space_dim(), phi.space_dim());
  for (const auto& a : acc.levels) total += a;
  return {kappa.compose(total), kappa.frobenius_norm() * tail, truncation};
}

MatrixElementMap upsilon_sigma(const Coefficient& phi, const InitialMap& kappa,
                               const StepFunction& g_prime,
                               const StepFunction& g,
                               std::span<const double> sigma) {
  std::vector<double> points(sigma.begin(), sigma.end());
  std::sort(points.begin(), points.end());
  const Eigen::Index m = phi.space_dim();
  Matrix chain = Matrix::Identity(m, m);
  for (double s : points) {
    if (s < 0.0) throw DimensionError("upsilon_sigma: negative time point");
    chain = chain * phi.psi(g_prime(s), g(s));
  }
  return kappa.compose(chain);
}

double hoelder_bound(const Coefficient& phi, const InitialMap& kappa,
                     const StepFunction& g, double r, double t, double horizon,
                     const FockConstant& constant) {
  if (!(0.0 <= r && r <= t && t <= horizon)) {
    throw DimensionError("hoelder_bound: need 0 <= r <= t <= T");
  }
  if (r == t) return 0.0;
  const double c_gt = constant(g, horizon);
  double max_column = 0.0;
  const StepFunction single[] = {g};
  for (const auto& piece : merged_grid(single, horizon)) {
    max_column = std::max(max_column,
                          spectral_norm(phi.column(hat(piece.values[0]))));
  }
  const double c = c_gt * std::sqrt(static_cast<double>(phi.dhat())) * max_column;

  // sum_n C^n / sqrt(n!); terms decrease once n > C^2.
  double series = 0.0;
  double term = 1.0;
  for (int n = 0; n < 100000; ++n) {
    series += term;
    if (n > c * c && term < 1e-17 * series) break;
    term *= c / std::sqrt(static_cast<double>(n + 1));
  }
  return std::sqrt(t - r) * spectral_norm(kappa.vectorized()) * c_gt * series;
}

}  // namespace qsde::guichardet
