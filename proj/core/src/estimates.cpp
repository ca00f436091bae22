#include "qsde/estimates.hpp"

#include <charconv>
#include <cmath>

#include "qsde/errors.hpp"

namespace qsde {

double FockConstant::squared(const StepFunction& g, double t) const {
  switch (kind) {
    case Kind::gronwall:
      return 2.0 * std::exp(t + l2_norm_squared(restrict(g, t)));
    case Kind::linear:
      return 2.0 * (t + l2_norm_squared(restrict(g, t)));
    case Kind::fixed:
      return value * value;
  }
  return 0.0;
}

double FockConstant::operator()(const StepFunction& g, double t) const {
  return std::sqrt(squared(g, t));
}

std::string FockConstant::name() const {
  switch (kind) {
    case Kind::gronwall:
      return "gronwall";
    case Kind::linear:
      return "linear";
    case Kind::fixed:
      return std::to_string(value);
  }
  return {};
}

FockConstant FockConstant::parse(const std::string& text) {
  if (text == "gronwall") return {Kind::gronwall, 1.0};
  if (text == "linear") return {Kind::linear, 1.0};
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0) ||
      !std::isfinite(v)) {
    throw DimensionError("unknown Fock constant '" + text +
                         "' (expected gronwall, linear or a number)");
  }
  return {Kind::fixed, v};
}

}  // namespace qsde
