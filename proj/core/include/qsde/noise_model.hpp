#pragma once

#include <span>
#include <vector>

#include "qsde/linalg.hpp"

namespace qsde {

/// Breakpoints closer than this are treated as one.
inline constexpr double kBreakpointTolerance = 1e-12;

/// Dimensions of the noise space k = C^d and its extension k^ = C + k.
/// The f-basis of k^ is f_0 = (1, 0, ..., 0), f_i = (0, e_i).
struct NoiseDims {
  Eigen::Index d = 0;
  Eigen::Index dhat() const { return d + 1; }
};

/// c^ = (1, c).
Vector hat(const Vector& c);

/// Piecewise-constant, right-continuous, compactly supported map
/// R_+ -> C^d. Value j (0-based) is active on [t_j, t_{j+1}) where t_0 = 0
/// is implicit; the function vanishes from the last breakpoint on.
class StepFunction {
 public:
  StepFunction() = default;
  /// The zero function with values in C^dim.
  explicit StepFunction(Eigen::Index dim);
  /// Throws DimensionError on unsorted/negative breakpoints or mismatched
  /// value sizes. Zero-width intervals (below kBreakpointTolerance) are
  /// dropped.
  StepFunction(Eigen::Index dim, std::vector<double> breakpoints,
               std::vector<Vector> values);

  /// c on [begin, end), zero elsewhere.
  static StepFunction indicator(const Vector& c, double begin, double end);

  Eigen::Index dim() const { return dim_; }
  /// Right ends t_1 < ... < t_K of the plateaus.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Vector>& values() const { return values_; }
  /// t_K, or 0 for the zero function.
  double support_end() const;

  /// f(s); s < 0 is treated as outside the support.
  Vector operator()(double s) const;

  bool operator==(const StepFunction& other) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<double> breakpoints_;
  std::vector<Vector> values_;
};

/// Exponential vectors eps(left), eps(right), kept symbolic.
struct ExpPair {
  StepFunction left;
  StepFunction right;

  /// <eps(left), eps(right)> = exp(<left, right>).
  Complex inner() const;
};

/// f_{[0,t)}.
StepFunction restrict(const StepFunction& f, double t);

/// f_{[t,oo)} = f - f_{[0,t)}.
StepFunction restrict_from(const StepFunction& f, double t);

/// s -> f(s + r), the adjoint of the right shift by r.
StepFunction shift_back(const StepFunction& f, double r);

/// int_0^oo <f(s), g(s)> ds, antilinear in f.
Complex l2_inner(const StepFunction& f, const StepFunction& g);

/// ||f||^2 in L^2(R_+; C^d).
double l2_norm_squared(const StepFunction& f);

struct GridInterval {
  double begin = 0.0;
  double end = 0.0;
  /// Plateau value of each input function on [begin, end), in input order.
  std::vector<Vector> values;

  double length() const { return end - begin; }
};

/// Partition 0 = s_0 < ... < s_M = t on whose pieces every function in `fs`
/// is constant. `extra` breakpoints inside (0, t) are also honoured; this is
/// how grid refinement is exercised.
std::vector<GridInterval> merged_grid(std::span<const StepFunction> fs,
                                      double t,
                                      std::span<const double> extra = {});

}  // namespace qsde
