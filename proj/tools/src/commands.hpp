#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "instance_io.hpp"

namespace qsde::cli {

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kConfigError = 2 };

/// Command-line overrides; unset fields fall back to the instance defaults.
struct Options {
  std::string engine = "semigroup";
  std::string suite = "all";
  std::optional<double> t;
  std::optional<std::string> g;
  std::optional<std::string> g_prime;
  std::optional<int> truncation;
  /// One entry for solve/verify; the ascending list for converge.
  std::vector<int> slots;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  /// Off: runtime_ms is reported as 0 so reports are byte-identical.
  bool timing = true;
};

struct Outcome {
  nlohmann::json document;
  int exit_code = kPass;
};

/// Number of seeded perturbations verify adds to the instance.
inline constexpr int kPerturbations = 3;

Outcome solve(const Instance& instance, const Options& options);
Outcome verify(const Instance& instance, const Options& options);
Outcome reconstruct(const Instance& instance, const Options& options);
Outcome converge(const Instance& instance, const Options& options);
Outcome coalgebra(const Instance& instance, const Options& options);

/// Dispatch by name. Library errors become {"error": ...} with exit 2.
Outcome run(const std::string& command, const Instance& instance,
            const Options& options);

/// "8,16,32" -> {8, 16, 32}; SchemaError on anything else.
std::vector<int> parse_slot_list(const std::string& text);

}  // namespace qsde::cli
