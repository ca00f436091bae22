#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qsde/coalgebra.hpp"
#include "qsde/coefficient.hpp"
#include "qsde/errors.hpp"
#include "qsde/estimates.hpp"
#include "qsde/noise_model.hpp"

namespace qsde::cli {

/// Raised for schema and shape violations; the message starts with the
/// JSON path of the offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct EngineDefaults {
  int truncation = 18;
  int slots = 64;
  int quadrature_steps = 64;
  double t = 1.0;
  std::string g = "zero";
  std::string g_prime = "zero";

  bool operator==(const EngineDefaults&) const = default;
};

struct CoalgebraSection {
  coalg::Coalgebra coalgebra;
  coalg::GeneratorFunctional varphi;
};

struct Instance {
  Eigen::Index d = 0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;
  Eigen::Index p_prime = 0;
  Coefficient phi;
  InitialMap kappa;
  std::optional<Matrix> involution;
  /// Named test functions; "zero" is always present.
  std::map<std::string, StepFunction> step_functions;
  FockConstant fe_constant;
  EngineDefaults defaults;
  std::uint64_t seed = 0;
  std::optional<CoalgebraSection> coalgebra;

  InitialSpace space() const { return {m, involution}; }
  /// Named step function or SchemaError listing the known names.
  const StepFunction& step_function(const std::string& name) const;
};

bool operator==(const Instance& a, const Instance& b);

Instance parse_instance(const nlohmann::json& doc);
Instance parse_instance_file(const std::filesystem::path& path);
nlohmann::json to_json(const Instance& instance);

// Shared encoders: complex numbers as [re, im], matrices as row lists.
nlohmann::json encode(const Complex& z);
nlohmann::json encode(const Matrix& a);
nlohmann::json encode(const Vector& v);
nlohmann::json encode(const StepFunction& f);
nlohmann::json encode(const MatrixValuedMap& map);

}  // namespace qsde::cli
