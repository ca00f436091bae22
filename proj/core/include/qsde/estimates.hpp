#pragma once

#include <string>

#include "qsde/noise_model.hpp"

namespace qsde {

/// The constant C(g,t) of the estimate
///   ||int_0^t F dLambda v eps(g)||^2 <= C(g,t)^2 int_0^t ||F_s v g^(s) eps(g)||^2 ds.
/// Only reported bounds depend on it.
struct FockConstant {
  enum class Kind {
    /// C^2 = 2 exp(t + ||g_{[0,t)}||^2), from Gronwall on d||X_t xi||^2.
    gronwall,
    /// C^2 = 2 (t + ||g_{[0,t)}||^2). Too small for short times once
    /// creation or number terms are present; kept for comparison.
    linear,
    /// C = value.
    fixed,
  };

  Kind kind = Kind::gronwall;
  double value = 1.0;

  double squared(const StepFunction& g, double t) const;
  double operator()(const StepFunction& g, double t) const;

  std::string name() const;
  /// Accepts "gronwall", "linear" or a nonnegative number.
  static FockConstant parse(const std::string& text);
};

}  // namespace qsde
