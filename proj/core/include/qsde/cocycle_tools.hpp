#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsde/coefficient.hpp"
#include "qsde/noise_model.hpp"

/// A solved process viewed as a black-box cocycle: generator extraction,
/// reconstruction of the stochastic coefficient, conjugation checks.
namespace qsde::cocycle {

enum class Engine { semigroup, guichardet, toyfock };

std::string to_string(Engine engine);
/// "semigroup" | "guichardet" | "toyfock"; DimensionError otherwise.
Engine parse_engine(const std::string& name);

struct EngineOptions {
  int truncation = 18;  // guichardet
  int slots = 64;       // toyfock
};

/// Normalized matrix element k^{g',g}_t through the chosen engine.
MatrixElementMap matrix_element(Engine engine, const Coefficient& phi,
                                const InitialMap& kappa,
                                const StepFunction& g_prime,
                                const StepFunction& g, double t,
                                const EngineOptions& options = {});

/// k^{g',g}_t for kappa = id_V as a matrix on coordinates of V.
Matrix transfer(Engine engine, const Coefficient& phi,
                const StepFunction& g_prime, const StepFunction& g, double t,
                const EngineOptions& options = {});

/// Associated-semigroup generators psi[c'][c] over a finite probe set.
class SemigroupTable {
 public:
  SemigroupTable(Eigen::Index d, std::vector<Vector> probes);

  Eigen::Index noise_dim() const { return d_; }
  const std::vector<Vector>& probes() const { return probes_; }

  /// Index of `c` in the probe set, or -1.
  int find(const Vector& c) const;
  bool has(int c_prime, int c) const;
  const Matrix& at(int c_prime, int c) const;
  void set(int c_prime, int c, Matrix psi);

 private:
  Eigen::Index d_ = 0;
  std::vector<Vector> probes_;
  std::vector<std::vector<Matrix>> entries_;  // empty matrix = unset
};

/// {0, e_1, ..., e_d}.
std::vector<Vector> default_probes(Eigen::Index d);

/// psi_{c',c} = phi^{c'^}_{c^} at every probe pair.
SemigroupTable table_from_coefficient(const Coefficient& phi,
                                      std::vector<Vector> probes);

/// (c', c, t) -> k^{c',c}_t with kappa = id.
using CocycleOracle =
    std::function<Matrix(const Vector& c_prime, const Vector& c, double t)>;

/// psi_{c',c} = log(k^{c',c}_h) / h (principal logarithm). Exact for the
/// semigroup engine as long as h psi has spectrum in the strip |Im| < pi.
SemigroupTable table_from_cocycle(const CocycleOracle& cocycle,
                                  Eigen::Index d, std::vector<Vector> probes,
                                  double h);

/// The sesquilinear map determined by an associated-semigroup table via
///   phi(zeta', zeta) = [conj(z'-1) 1] [[psi_00, psi_0c], [psi_c'0, psi_c'c]] [z-1; 1]
/// for zeta' = (z', c'), zeta = (z, c).
class ReconstructedGenerator {
 public:
  explicit ReconstructedGenerator(SemigroupTable table);

  /// Block formula evaluated directly; needs psi at (0,0), (0,c), (c',0),
  /// (c',c). StructureError names the missing probes.
  Matrix block(const Complex& z_prime, const Vector& c_prime, const Complex& z,
               const Vector& c) const;
  /// Sesquilinear extension from the f-basis (block formula at basis
  /// vectors).
  Matrix operator()(const Vector& zeta_prime, const Vector& zeta) const;
  /// The same map as a basis-slice coefficient.
  const Coefficient& coefficient() const { return basis_; }

 private:
  SemigroupTable table_;
  Coefficient basis_;
};

/// StructureError listing required probes if the table lacks 0 or some e_i.
ReconstructedGenerator reconstruct_phi(const SemigroupTable& table);

/// (k^{c',c}_h - id) / h through the chosen engine, kappa = id.
Matrix difference_quotient_generator(Engine engine, const Coefficient& phi,
                                     const Vector& c_prime, const Vector& c,
                                     double t_small,
                                     const EngineOptions& options = {});

/// max_x ||k^{kappa^+,phi^+}(g,g')_t(x^+) - (k^{kappa,phi}(g',g)_t(x))^*||_F.
double conjugate_check(Engine engine, const Coefficient& phi,
                       const InitialMap& kappa, const InitialSpace& space,
                       const StepFunction& g_prime, const StepFunction& g,
                       double t, const EngineOptions& options = {});

}  // namespace qsde::cocycle
