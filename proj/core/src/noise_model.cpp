#include "qsde/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsde/errors.hpp"

namespace qsde {

Vector hat(const Vector& c) {
  Vector out(c.size() + 1);
  out(0) = 1.0;
  out.tail(c.size()) = c;
  return out;
}

StepFunction::StepFunction(Eigen::Index dim) : dim_(dim) {
  if (dim < 0) throw DimensionError("negative noise dimension");
}

StepFunction::StepFunction(Eigen::Index dim, std::vector<double> breakpoints,
                           std::vector<Vector> values)
    : dim_(dim) {
  if (dim < 0) throw DimensionError("negative noise dimension");
  if (breakpoints.size() != values.size()) {
    throw DimensionError("step function: " + std::to_string(breakpoints.size()) +
                         " breakpoints but " + std::to_string(values.size()) +
                         " values");
  }
  double previous = 0.0;
  for (std::size_t j = 0; j < breakpoints.size(); ++j) {
    const double t = breakpoints[j];
    if (!std::isfinite(t) || t < previous - kBreakpointTolerance) {
      throw DimensionError("step function: breakpoints must be finite and "
                           "strictly increasing from 0");
    }
    if (values[j].size() != dim) {
      throw DimensionError("step function: value " + std::to_string(j) +
                           " has size " + std::to_string(values[j].size()) +
                           ", expected " + std::to_string(dim));
    }
    if (!values[j].allFinite()) {
      throw DimensionError("step function: non-finite value");
    }
    if (t - previous < kBreakpointTolerance) continue;
    breakpoints_.push_back(t);
    values_.push_back(std::move(values[j]));
    previous = t;
  }
}

StepFunction StepFunction::indicator(const Vector& c, double begin, double end) {
  if (begin < 0.0 || end < begin) {
    throw DimensionError("indicator: need 0 <= begin <= end");
  }
  return StepFunction(c.size(), {begin, end},
                      {Vector::Zero(c.size()), c});
}

double StepFunction::support_end() const {
  return breakpoints_.empty() ? 0.0 : breakpoints_.back();
}

Vector StepFunction::operator()(double s) const {
  if (s < 0.0) return Vector::Zero(dim_);
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  if (it == breakpoints_.end()) return Vector::Zero(dim_);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

bool StepFunction::operator==(const StepFunction& other) const {
  if (dim_ != other.dim_ || breakpoints_ != other.breakpoints_) return false;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (values_[j] != other.values_[j]) return false;
  }
  return true;
}

Complex ExpPair::inner() const { return std::exp(l2_inner(left, right)); }

StepFunction restrict(const StepFunction& f, double t) {
  if (t < 0.0) throw DimensionError("restrict: negative time");
  std::vector<double> bps;
  std::vector<Vector> vals;
  double previous = 0.0;
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    if (previous >= t) break;
    bps.push_back(std::min(f.breakpoints()[j], t));
    vals.push_back(f.values()[j]);
    previous = f.breakpoints()[j];
  }
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

StepFunction restrict_from(const StepFunction& f, double t) {
  if (t < 0.0) throw DimensionError("restrict_from: negative time");
  std::vector<double> bps;
  std::vector<Vector> vals;
  if (t > 0.0) {
    bps.push_back(t);
    vals.push_back(Vector::Zero(f.dim()));
  }
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    if (f.breakpoints()[j] <= t) continue;
    bps.push_back(f.breakpoints()[j]);
    vals.push_back(f.values()[j]);
  }
  if (bps.size() == 1 && t > 0.0) return StepFunction(f.dim());
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

StepFunction shift_back(const StepFunction& f, double r) {
  if (r < 0.0) throw DimensionError("shift_back: negative shift");
  std::vector<double> bps;
  std::vector<Vector> vals;
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    const double shifted = f.breakpoints()[j] - r;
    if (shifted <= 0.0) continue;
    bps.push_back(shifted);
    vals.push_back(f.values()[j]);
  }
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

Complex l2_inner(const StepFunction& f, const StepFunction& g) {
  if (f.dim() != g.dim()) throw DimensionError("l2_inner: dimension mismatch");
  const double end = std::min(f.support_end(), g.support_end());
  if (end <= 0.0) return 0.0;
  const StepFunction both[] = {f, g};
  Complex sum = 0.0;
  for (const auto& piece : merged_grid(both, end)) {
    sum += piece.length() * piece.values[0].dot(piece.values[1]);
  }
  return sum;
}

double l2_norm_squared(const StepFunction& f) {
  return l2_inner(f, f).real();
}

std::vector<GridInterval> merged_grid(std::span<const StepFunction> fs,
                                      double t, std::span<const double> extra) {
  if (!(t > 0.0)) throw DimensionError("merged_grid: need t > 0");
  std::vector<double> points;
  for (const auto& f : fs) {
    for (double b : f.breakpoints()) {
      if (b < t) points.push_back(b);
    }
  }
  for (double b : extra) {
    if (b > 0.0 && b < t) points.push_back(b);
  }
  std::sort(points.begin(), points.end());

  std::vector<double> cuts{0.0};
  for (double b : points) {
    if (b - cuts.back() >= kBreakpointTolerance) cuts.push_back(b);
  }
  if (t - cuts.back() < kBreakpointTolerance && cuts.size() > 1) {
    cuts.back() = t;
  } else {
    cuts.push_back(t);
  }

  std::vector<GridInterval> grid;
  grid.reserve(cuts.size() - 1);
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    GridInterval piece{cuts[j], cuts[j + 1], {}};
    // Midpoint sampling keeps the plateau lookup away from breakpoints
    // that were merged within tolerance.
    const double mid = 0.5 * (piece.begin + piece.end);
    piece.values.reserve(fs.size());
    for (const auto& f : fs) piece.values.push_back(f(mid));
    grid.push_back(std::move(piece));
  }
  return grid;
}

}  // namespace qsde
