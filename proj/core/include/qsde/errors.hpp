#pragma once

#include <stdexcept>
#include <string>

namespace qsde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input shapes or arguments inconsistent with each other.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An engine refused to run because one of its validity guards failed
/// (truncation level too small, slot cap exceeded, grid misalignment).
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Required algebraic structure (e.g. an involution) is absent or broken.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsde
