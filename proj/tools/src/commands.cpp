#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "qsde/cocycle_tools.hpp"
#include "qsde/errors.hpp"
#include "qsde/guichardet_engine.hpp"
#include "qsde/semigroup_engine.hpp"
#include "qsde/toyfock_engine.hpp"

namespace qsde::cli {

using nlohmann::json;

namespace {

// Errors below this are treated as exact when measuring decay rates.
constexpr double kRoundingFloor = 1e-13;
constexpr double kMinRatio = 1.3;
constexpr double kPerturbationScale = 0.1;

struct Setting {
  std::string label;
  Coefficient phi;
  InitialMap kappa;
  InitialSpace space;
  StepFunction g_prime;
  StepFunction g;
  double t = 1.0;
  int truncation = guichardet::kDefaultTruncation;
  int slots = 64;
  int quadrature_steps = 64;
  FockConstant constant;
  std::optional<CoalgebraSection> coalgebra;

  cocycle::EngineOptions engine_options() const { return {truncation, slots}; }
};

Setting base_setting(const Instance& instance, const Options& options) {
  Setting s;
  s.label = "instance";
  s.phi = instance.phi;
  s.kappa = instance.kappa;
  s.space = instance.space();
  s.g_prime = instance.step_function(options.g_prime.value_or(instance.defaults.g_prime));
  s.g = instance.step_function(options.g.value_or(instance.defaults.g));
  s.t = options.t.value_or(instance.defaults.t);
  if (!(s.t >= 0.0) || !std::isfinite(s.t)) throw DimensionError("t must be finite and >= 0");
  s.truncation = options.truncation.value_or(instance.defaults.truncation);
  s.slots = options.slots.empty() ? instance.defaults.slots : options.slots.front();
  if (s.truncation < 0) throw DimensionError("truncation must be >= 0");
  if (s.slots < 1) throw DimensionError("slots must be >= 1");
  s.quadrature_steps = instance.defaults.quadrature_steps;
  s.constant = instance.fe_constant;
  s.coalgebra = instance.coalgebra;
  return s;
}

std::uint64_t base_seed(const Instance& instance, const Options& options) {
  return options.seed.value_or(instance.seed);
}

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                       double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = Complex(normal(rng), normal(rng));
  }
  return out;
}

// The instance with every slice (and generator functional) shifted by
// Gaussian noise; structure (shapes, J, coalgebra) is kept.
Setting perturb(const Setting& base, std::uint64_t seed, int k) {
  Setting s = base;
  s.label = "perturbation " + std::to_string(k);
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
  for (Eigen::Index mu = 0; mu < s.phi.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < s.phi.dhat(); ++nu) {
      Matrix& theta = s.phi.theta(mu, nu);
      theta += gaussian_matrix(rng, theta.rows(), theta.cols(), kPerturbationScale);
    }
  }
  if (s.coalgebra) {
    for (auto& v : s.coalgebra->varphi.varphi) {
      v += gaussian_matrix(rng, v.rows(), v.cols(), kPerturbationScale);
    }
  }
  return s;
}

std::vector<Setting> settings(const Instance& instance, const Options& options) {
  std::vector<Setting> out{base_setting(instance, options)};
  const auto seed = base_seed(instance, options);
  for (int k = 1; k <= kPerturbations; ++k) out.push_back(perturb(out.front(), seed, k));
  return out;
}

struct Measured {
  double residual = 0.0;
  json detail = nullptr;
};

// Serial check runner; a library error inside a check becomes an error
// record and forces exit code 2.
class Checks {
 public:
  explicit Checks(const Options& options) : options_(options) {}

  // `tolerance` marks fixed tolerances that --tol replaces; derived
  // bounds (tail bounds, estimate ratios) are never overridden.
  void run(const std::string& name, double bound, bool tolerance,
           const std::function<Measured()>& check) {
    if (tolerance && options_.tol) bound = *options_.tol;
    json record = {{"name", name}, {"bound", bound}};
    const auto start = std::chrono::steady_clock::now();
    try {
      Measured m = check();
      record["residual"] = m.residual;
      record["pass"] = m.residual <= bound;
      if (!m.detail.is_null()) record["detail"] = std::move(m.detail);
      if (!(m.residual <= bound)) exit_ = std::max(exit_, int{kVerificationFailure});
    } catch (const Error& e) {
      record["residual"] = nullptr;
      record["pass"] = false;
      record["error"] = e.what();
      exit_ = kConfigError;
    }
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;
    record["runtime_ms"] = options_.timing ? elapsed.count() : 0.0;
    records_.push_back(std::move(record));
  }

  void error(const std::string& name, const std::string& message) {
    records_.push_back({{"name", name},
                        {"residual", nullptr},
                        {"bound", nullptr},
                        {"pass", false},
                        {"runtime_ms", 0.0},
                        {"error", message}});
    exit_ = kConfigError;
  }

  int exit_code() const { return exit_; }
  json records() const { return records_; }

 private:
  const Options& options_;
  json records_ = json::array();
  int exit_ = kPass;
};

std::string tag(const Setting& s, const std::string& name) {
  return name + " [" + s.label + "]";
}

double frobenius(const MatrixElementMap& a, const MatrixElementMap& b) {
  return (a - b).frobenius_norm();
}

double max_theta_distance(const Coefficient& a, const Coefficient& b) {
  double worst = 0.0;
  for (Eigen::Index mu = 0; mu < a.dhat(); ++mu) {
    for (Eigen::Index nu = 0; nu < a.dhat(); ++nu) {
      worst = std::max(worst, (a.theta(mu, nu) - b.theta(mu, nu)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Step for black-box extraction: ||h psi|| <= 1 keeps the spectrum of
// h psi inside the principal strip of the logarithm.
double extraction_step(const Coefficient& phi) {
  double largest = 0.0;
  const auto probes = cocycle::default_probes(phi.noise_dim());
  for (const auto& cp : probes) {
    for (const auto& c : probes) largest = std::max(largest, spectral_norm(phi.psi(cp, c)));
  }
  return largest > 1.0 ? 1.0 / largest : 1.0;
}

cocycle::SemigroupTable extracted_table(cocycle::Engine engine, const Setting& s) {
  const auto options = s.engine_options();
  const cocycle::CocycleOracle oracle = [&](const Vector& cp, const Vector& c, double h) {
    return cocycle::transfer(engine, s.phi, StepFunction::indicator(cp, 0.0, h),
                             StepFunction::indicator(c, 0.0, h), h, options);
  };
  return cocycle::table_from_cocycle(oracle, s.phi.noise_dim(),
                                     cocycle::default_probes(s.phi.noise_dim()),
                                     extraction_step(s.phi));
}

void reconstruction_checks(Checks& checks, const Setting& s, cocycle::Engine engine) {
  checks.run(tag(s, "reconstruction_roundtrip"), 1e-12, true, [&] {
    const auto table =
        cocycle::table_from_coefficient(s.phi, cocycle::default_probes(s.phi.noise_dim()));
    return Measured{max_theta_distance(cocycle::reconstruct_phi(table).coefficient(), s.phi)};
  });
  checks.run(tag(s, "reconstruction_resolve"), 1e-10, true, [&] {
    const auto rebuilt = cocycle::reconstruct_phi(extracted_table(engine, s)).coefficient();
    const auto options = s.engine_options();
    const auto original =
        cocycle::matrix_element(engine, s.phi, s.kappa, s.g_prime, s.g, s.t, options);
    const auto again =
        cocycle::matrix_element(engine, rebuilt, s.kappa, s.g_prime, s.g, s.t, options);
    return Measured{frobenius(original, again),
                    {{"extraction_step", extraction_step(s.phi)},
                     {"theta_distance", max_theta_distance(rebuilt, s.phi)}}};
  });
}

void cocycle_suite(Checks& checks, const std::vector<Setting>& all, std::uint64_t seed) {
  for (std::size_t k = 0; k < all.size(); ++k) {
    const Setting& s = all[k];
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double horizon = std::max(s.t, 1.0);

    checks.run(tag(s, "cocycle_identity"), 1e-10, true, [&] {
      double worst = 0.0;
      json splits = json::array();
      for (int trial = 0; trial < 4; ++trial) {
        const double r = horizon * unit(rng);
        const double t = horizon * unit(rng);
        splits.push_back({r, t});
        worst = std::max(worst, semigroup::cocycle_residual(s.phi, s.g_prime, s.g, r, t));
      }
      return Measured{worst, {{"splits", splits}}};
    });

    checks.run(tag(s, "grid_refinement"), 1e-12, true, [&] {
      const Matrix plain = semigroup::transfer(s.phi, s.g_prime, s.g, s.t);
      double worst = 0.0;
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> extra;
        for (int i = 0; i < 3; ++i) extra.push_back(s.t * unit(rng));
        std::sort(extra.begin(), extra.end());
        const Matrix refined = semigroup::transfer(s.phi, s.g_prime, s.g, s.t, extra);
        worst = std::max(worst, (refined - plain).norm());
      }
      return Measured{worst};
    });

    // The bound is the certified tail, so it is not subject to --tol.
    const auto series = [&] {
      return guichardet::truncated_series(s.phi, s.kappa, s.g_prime, s.g, s.t, s.truncation);
    };
    double tail = 0.0;
    try {
      tail = series().tail_bound;
    } catch (const Error&) {
    }
    checks.run(tag(s, "engine_agreement"), tail + 1e-10, false, [&] {
      const auto result = series();
      const auto exact = semigroup::matrix_element(s.phi, s.kappa, s.g_prime, s.g, s.t);
      return Measured{frobenius(result.value, exact),
                      {{"truncation", result.truncation_level},
                       {"tail_bound", result.tail_bound}}};
    });

    reconstruction_checks(checks, s, cocycle::Engine::semigroup);
  }
}

void conjugate_suite(Checks& checks, const std::vector<Setting>& all) {
  for (const auto& s : all) {
    for (auto engine : {cocycle::Engine::semigroup, cocycle::Engine::guichardet}) {
      checks.run(tag(s, "conjugate_" + cocycle::to_string(engine)), 1e-10, true, [&] {
        return Measured{cocycle::conjugate_check(engine, s.phi, s.kappa, s.space, s.g_prime,
                                                 s.g, s.t, s.engine_options())};
      });
    }
  }
}

void lifting_suite(Checks& checks, const std::vector<Setting>& all) {
  for (const auto& s : all) {
    for (Eigen::Index n : {2, 3}) {
      checks.run(tag(s, "lifting_n" + std::to_string(n)), 1e-11, true, [&] {
        const auto solved = semigroup::matrix_element(s.phi, s.kappa, s.g_prime, s.g, s.t);
        const auto lifted = semigroup::matrix_element(lift(s.phi, n), lift(s.kappa, n),
                                                      s.g_prime, s.g, s.t);
        Vector f0 = Vector::Zero(s.phi.dhat());
        f0(0) = 1.0;
        return Measured{frobenius(lifted, lift(solved, n)),
                        {{"lift_level_norms", lift_level_norms(s.phi, f0, 3)}}};
      });
    }
  }
}

void bounds_suite(Checks& checks, const std::vector<Setting>& all, std::uint64_t seed) {
  for (std::size_t k = 0; k < all.size(); ++k) {
    const Setting& s = all[k];
    std::mt19937_64 rng(seed + 7919 * (k + 1));

    checks.run(tag(s, "composition_bound"), 1.0, false, [&] {
      double worst = 0.0;
      for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<Matrix> columns;
          for (int i = 0; i < n; ++i) {
            columns.push_back(s.phi.column(gaussian_matrix(rng, s.phi.dhat(), 1, 1.0)));
          }
          const auto r = composition_bound_check(s.kappa, columns, s.phi.dhat());
          if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
          else if (r.lhs > 0.0) worst = std::max(worst, 2.0);
        }
      }
      return Measured{worst, {{"measure", "max lhs/rhs"}}};
    });

    checks.run(tag(s, "tail_monotonicity"), 0.0, false, [&] {
      const double x =
          guichardet::accumulate(s.phi, s.g_prime, s.g, s.t, 0).growth;
      const int first = std::max(0, static_cast<int>(std::floor(x)) - 1);
      double worst = 0.0;
      json tails = json::array();
      double previous = guichardet::tail_sum(x, first);
      tails.push_back(previous);
      for (int n = first + 1; n <= first + 24; ++n) {
        const double next = guichardet::tail_sum(x, n);
        worst = std::max(worst, next - previous);
        tails.push_back(next);
        previous = next;
      }
      return Measured{worst, {{"growth", x}, {"first_level", first}, {"tails", tails}}};
    });

    const toyfock::ToyFock grid{s.t, s.slots};
    checks.run(tag(s, "fundamental_estimate"), 1.0, false, [&] {
      double worst = 0.0;
      for (Eigen::Index b = 0; b < s.kappa.cols(); ++b) {
        const auto state = toyfock::euler_solve(s.phi, s.kappa,
                                                basis_vector(s.kappa.cols(), b), s.g, grid);
        worst = std::max(worst, toyfock::fe_check(state, s.g, s.constant).max_ratio);
      }
      return Measured{worst, {{"measure", "max lhs/rhs"}, {"slots", s.slots},
                              {"constant", s.constant.name()}}};
    });

    checks.run(tag(s, "hoelder"), 1.0, false, [&] {
      if (s.t <= 0.0) return Measured{0.0};
      const int half = s.slots / 2;
      const std::vector<std::pair<int, int>> pairs = {
          {0, s.slots}, {s.slots / 4, half}, {half, std::min(half + 1, s.slots)}};
      double worst = 0.0;
      for (Eigen::Index b = 0; b < s.kappa.cols(); ++b) {
        const auto state = toyfock::euler_solve(s.phi, s.kappa,
                                                basis_vector(s.kappa.cols(), b), s.g, grid);
        for (auto [i, j] : pairs) {
          if (i >= j) continue;
          const double r = grid.time(i), t = grid.time(j);
          const double bound =
              guichardet::hoelder_bound(s.phi, s.kappa, s.g, r, t, s.t, s.constant);
          const double measure = toyfock::hoelder_measure(state, r, t);
          if (bound > 0.0) worst = std::max(worst, measure / bound);
          else if (measure > 0.0) worst = std::max(worst, 2.0);
        }
      }
      return Measured{worst, {{"measure", "max measured/bound"}, {"slots", s.slots}}};
    });
  }
}

void weak_suite(Checks& checks, const std::vector<Setting>& all) {
  for (const auto& s : all) {
    checks.run(tag(s, "weak_residual"), 1e-9, true, [&] {
      return Measured{semigroup::weak_residual(s.phi, s.kappa, s.g_prime, s.g, s.t,
                                               s.quadrature_steps),
                      {{"quadrature_steps", s.quadrature_steps}}};
    });
    // Fourth order: halving the Simpson step divides the residual by ~16.
    checks.run(tag(s, "weak_residual_order"), std::pow(2.0, -3.5), false, [&] {
      const double coarse = semigroup::weak_residual(s.phi, s.kappa, s.g_prime, s.g, s.t, 8);
      const double fine = semigroup::weak_residual(s.phi, s.kappa, s.g_prime, s.g, s.t, 16);
      json detail = {{"coarse", coarse}, {"fine", fine}};
      if (coarse <= kRoundingFloor) {
        detail["note"] = "coarse residual at rounding level; no decay to measure";
        return Measured{0.0, detail};
      }
      return Measured{fine / coarse, detail};
    });
  }
}

void coalgebra_checks(Checks& checks, const Setting& s, const CoalgebraSection& c) {
  checks.run(tag(s, "coalgebra_laws"), 1e-12, true, [&] {
    const auto report = coalg::validate(c.coalgebra);
    return Measured{report.max_violation(),
                    {{"coassociativity", report.coassociativity},
                     {"counit_left", report.counit_left},
                     {"counit_right", report.counit_right}}};
  });
  checks.run(tag(s, "localisation"), 1e-10, true, [&] {
    const auto induced = coalg::induced_coefficient(c.coalgebra, c.varphi);
    double worst = 0.0;
    json dims = json::array();
    for (Eigen::Index i = 0; i < c.coalgebra.m; ++i) {
      const auto sub = coalg::localise(induced, basis_vector(c.coalgebra.m, i), c.coalgebra.m);
      dims.push_back(sub.dim());
      worst = std::max(worst, sub.invariance_residual);
    }
    return Measured{worst, {{"dims", dims}}};
  });
  checks.run(tag(s, "convolution_residual"), 1e-9, true, [&] {
    return Measured{coalg::convolution_residual(c.coalgebra, c.varphi, s.g_prime, s.g, s.t,
                                                s.quadrature_steps),
                    {{"quadrature_steps", s.quadrature_steps}}};
  });
  const auto report = [&] { return coalg::consistency(c.coalgebra, c.varphi, s.g_prime, s.g, s.t); };
  checks.run(tag(s, "counit_slice"), 1e-11, true,
             [&] { return Measured{report().counit_slice}; });
  checks.run(tag(s, "coproduct_consistency"), 1e-11, true,
             [&] { return Measured{report().coproduct}; });
}

void coalgebra_suite(Checks& checks, const std::vector<Setting>& all) {
  for (const auto& s : all) coalgebra_checks(checks, s, *s.coalgebra);
}

json setting_summary(const Setting& s, std::uint64_t seed) {
  return {{"t", s.t},
          {"truncation", s.truncation},
          {"slots", s.slots},
          {"quadrature_steps", s.quadrature_steps},
          {"fe_constant", s.constant.name()},
          {"seed", seed},
          {"perturbations", kPerturbations},
          {"perturbation_scale", kPerturbationScale}};
}

Outcome finish(json document, const Checks& checks) {
  document["checks"] = checks.records();
  document["passed"] = checks.exit_code() == kPass;
  document["exit_code"] = checks.exit_code();
  return {std::move(document), checks.exit_code()};
}

}  // namespace

Outcome solve(const Instance& instance, const Options& options) {
  const Setting s = base_setting(instance, options);
  const auto engine = cocycle::parse_engine(options.engine);
  json doc = {{"command", "solve"},
              {"engine", options.engine},
              {"t", s.t},
              {"gprime", options.g_prime.value_or(instance.defaults.g_prime)},
              {"g", options.g.value_or(instance.defaults.g)},
              {"normalized", true}};
  MatrixElementMap value;
  switch (engine) {
    case cocycle::Engine::semigroup:
      value = semigroup::matrix_element(s.phi, s.kappa, s.g_prime, s.g, s.t);
      break;
    case cocycle::Engine::guichardet: {
      auto result =
          guichardet::truncated_series(s.phi, s.kappa, s.g_prime, s.g, s.t, s.truncation);
      doc["truncation_level"] = result.truncation_level;
      doc["tail_bound"] = result.tail_bound;
      value = std::move(result.value);
      break;
    }
    case cocycle::Engine::toyfock: {
      const auto options_for = [&](int slots) { return cocycle::EngineOptions{s.truncation, slots}; };
      value = cocycle::matrix_element(engine, s.phi, s.kappa, s.g_prime, s.g, s.t,
                                      options_for(s.slots));
      doc["slots"] = s.slots;
      if (s.slots % 2 == 0) {
        const auto coarse = cocycle::matrix_element(engine, s.phi, s.kappa, s.g_prime, s.g,
                                                    s.t, options_for(s.slots / 2));
        doc["error_estimate"] = frobenius(value, coarse);
      } else {
        doc["error_estimate"] = nullptr;
      }
      break;
    }
  }
  doc["rows"] = value.rows();
  doc["cols"] = value.cols();
  doc["entries"] = encode(value);
  return {std::move(doc), kPass};
}

Outcome verify(const Instance& instance, const Options& options) {
  static const std::vector<std::string> kSuites = {"all",     "cocycle", "conjugate", "lifting",
                                                   "bounds",  "weak",    "coalg"};
  if (std::find(kSuites.begin(), kSuites.end(), options.suite) == kSuites.end()) {
    throw SchemaError("unknown suite '" + options.suite +
                      "' (expected all, cocycle, conjugate, lifting, bounds, weak or coalg)");
  }
  const auto seed = base_seed(instance, options);
  const auto all = settings(instance, options);
  Checks checks(options);
  const auto wants = [&](const std::string& suite) {
    return options.suite == "all" || options.suite == suite;
  };
  json skipped = json::array();

  if (wants("cocycle")) cocycle_suite(checks, all, seed);
  if (wants("conjugate")) {
    if (instance.involution) {
      conjugate_suite(checks, all);
    } else if (options.suite == "conjugate") {
      checks.error("conjugate", "no conjugation structure: the instance has no involution");
    } else {
      skipped.push_back("conjugate");
    }
  }
  if (wants("lifting")) lifting_suite(checks, all);
  if (wants("bounds")) bounds_suite(checks, all, seed);
  if (wants("weak")) weak_suite(checks, all);
  if (wants("coalg")) {
    if (instance.coalgebra) {
      coalgebra_suite(checks, all);
    } else if (options.suite == "coalg") {
      checks.error("coalg", "the instance has no coalgebra section");
    } else {
      skipped.push_back("coalg");
    }
  }
  json doc = {{"command", "verify"}, {"suite", options.suite},
              {"settings", setting_summary(all.front(), seed)}, {"skipped", skipped}};
  return finish(std::move(doc), checks);
}

Outcome reconstruct(const Instance& instance, const Options& options) {
  const Setting s = base_setting(instance, options);
  const auto engine = cocycle::parse_engine(options.engine);
  const auto table = extracted_table(engine, s);
  json entries = json::array();
  const auto& probes = table.probes();
  for (std::size_t a = 0; a < probes.size(); ++a) {
    for (std::size_t b = 0; b < probes.size(); ++b) {
      entries.push_back({{"c_prime", encode(probes[a])},
                         {"c", encode(probes[b])},
                         {"psi", encode(table.at(static_cast<int>(a), static_cast<int>(b)))}});
    }
  }
  const auto rebuilt = cocycle::reconstruct_phi(table).coefficient();
  json theta = json::array();
  for (Eigen::Index mu = 0; mu < rebuilt.dhat(); ++mu) {
    json row = json::array();
    for (Eigen::Index nu = 0; nu < rebuilt.dhat(); ++nu) row.push_back(encode(rebuilt.theta(mu, nu)));
    theta.push_back(std::move(row));
  }
  Checks checks(options);
  reconstruction_checks(checks, s, engine);
  json doc = {{"command", "reconstruct"},
              {"engine", options.engine},
              {"extraction_step", extraction_step(s.phi)},
              {"table", std::move(entries)},
              {"phi", std::move(theta)}};
  return finish(std::move(doc), checks);
}

Outcome converge(const Instance& instance, const Options& options) {
  Options base = options;
  base.slots.clear();
  const Setting s = base_setting(instance, base);
  const std::vector<int> slots =
      options.slots.empty() ? std::vector<int>{8, 16, 32, 64} : options.slots;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] < 1 || (i > 0 && slots[i] <= slots[i - 1])) {
      throw DimensionError("slots must be positive and strictly ascending");
    }
  }
  const auto rows = toyfock::convergence_table(s.phi, s.kappa, s.g_prime, s.g, s.t, slots);
  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"slots", row.slots}, {"error", row.error},
                     {"ratio", row.ratio > 0.0 ? json(row.ratio) : json(nullptr)}});
  }
  Checks checks(options);
  // Residual: the worst per-doubling contraction error_k / error_{k-1}.
  checks.run("convergence_rate", 1.0 / kMinRatio, false, [&] {
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i - 1].error <= kRoundingFloor) continue;
      worst = std::max(worst, rows[i].error / rows[i - 1].error);
    }
    return Measured{worst, {{"min_ratio", kMinRatio}}};
  });
  json doc = {{"command", "converge"}, {"t", s.t}, {"table", std::move(table)}};
  return finish(std::move(doc), checks);
}

Outcome coalgebra(const Instance& instance, const Options& options) {
  if (!instance.coalgebra) throw StructureError("the instance has no coalgebra section");
  const Setting s = base_setting(instance, options);
  const auto& c = *instance.coalgebra;
  const auto l = coalg::convolution_cocycle(c.coalgebra, c.varphi, s.g_prime, s.g, s.t);
  Checks checks(options);
  coalgebra_checks(checks, s, c);
  json doc = {{"command", "coalg"}, {"t", s.t}, {"l_t", encode(l)}};
  return finish(std::move(doc), checks);
}

Outcome run(const std::string& command, const Instance& instance, const Options& options) {
  try {
    if (command == "solve") return solve(instance, options);
    if (command == "verify") return verify(instance, options);
    if (command == "reconstruct") return reconstruct(instance, options);
    if (command == "converge") return converge(instance, options);
    if (command == "coalg") return coalgebra(instance, options);
    throw SchemaError("unknown command '" + command + "'");
  } catch (const Error& e) {
    return {{{"command", command}, {"error", e.what()}, {"exit_code", int{kConfigError}}},
            kConfigError};
  }
}

std::vector<int> parse_slot_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || value < 1) {
      throw SchemaError("--slots: expected positive integers separated by commas, got '" +
                        text + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw SchemaError("--slots: empty list");
  return out;
}

}  // namespace qsde::cli
