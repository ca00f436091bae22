#include "qsde/cocycle_tools.hpp"

#include <algorithm>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qsde/errors.hpp"
#include "qsde/guichardet_engine.hpp"
#include "qsde/semigroup_engine.hpp"
#include "qsde/toyfock_engine.hpp"

namespace qsde::cocycle {

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::semigroup:
      return "semigroup";
    case Engine::guichardet:
      return "guichardet";
    case Engine::toyfock:
      return "toyfock";
  }
  return {};
}

Engine parse_engine(const std::string& name) {
  if (name == "semigroup") return Engine::semigroup;
  if (name == "guichardet") return Engine::guichardet;
  if (name == "toyfock") return Engine::toyfock;
  throw DimensionError("unknown engine '" + name +
                       "' (expected semigroup, guichardet or toyfock)");
}

MatrixElementMap matrix_element(Engine engine, const Coefficient& phi,
                                const InitialMap& kappa,
                                const StepFunction& g_prime,
                                const StepFunction& g, double t,
                                const EngineOptions& options) {
  switch (engine) {
    case Engine::semigroup:
      return semigroup::matrix_element(phi, kappa, g_prime, g, t);
    case Engine::guichardet:
      return guichardet::truncated_series(phi, kappa, g_prime, g, t,
                                          options.truncation)
          .value;
    case Engine::toyfock:
      if (t == 0.0) return kappa;
      return toyfock::matrix_element_discrete(phi, kappa, g_prime, g,
                                              {t, options.slots});
  }
  return kappa;
}

Matrix transfer(Engine engine, const Coefficient& phi,
                const StepFunction& g_prime, const StepFunction& g, double t,
                const EngineOptions& options) {
  const Eigen::Index m = phi.space_dim();
  // kappa(e_i) = e_i as an m x 1 column: the identity on V.
  std::vector<Matrix> columns;
  for (Eigen::Index i = 0; i < m; ++i) columns.push_back(basis_vector(m, i));
  const InitialMap identity(m, 1, std::move(columns));
  const auto map = matrix_element(engine, phi, identity, g_prime, g, t, options);
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) out.col(i) = map[i].col(0);
  return out;
}

SemigroupTable::SemigroupTable(Eigen::Index d, std::vector<Vector> probes)
    : d_(d), probes_(std::move(probes)) {
  for (const auto& c : probes_) {
    if (c.size() != d_) throw DimensionError("probe vector has wrong size");
  }
  entries_.assign(probes_.size(), std::vector<Matrix>(probes_.size()));
}

int SemigroupTable::find(const Vector& c) const {
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    if (c.size() == probes_[i].size() && (c - probes_[i]).norm() <= 1e-15) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

bool SemigroupTable::has(int c_prime, int c) const {
  return c_prime >= 0 && c >= 0 &&
         entries_[static_cast<std::size_t>(c_prime)][static_cast<std::size_t>(c)]
                 .size() > 0;
}

const Matrix& SemigroupTable::at(int c_prime, int c) const {
  if (!has(c_prime, c)) throw StructureError("semigroup table entry unset");
  return entries_[static_cast<std::size_t>(c_prime)][static_cast<std::size_t>(c)];
}

void SemigroupTable::set(int c_prime, int c, Matrix psi) {
  entries_.at(static_cast<std::size_t>(c_prime)).at(static_cast<std::size_t>(c)) =
      std::move(psi);
}

std::vector<Vector> default_probes(Eigen::Index d) {
  std::vector<Vector> probes{Vector::Zero(d)};
  for (Eigen::Index i = 0; i < d; ++i) probes.push_back(basis_vector(d, i));
  return probes;
}

SemigroupTable table_from_coefficient(const Coefficient& phi,
                                      std::vector<Vector> probes) {
  SemigroupTable table(phi.noise_dim(), std::move(probes));
  const auto& p = table.probes();
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = 0; b < p.size(); ++b) {
      table.set(static_cast<int>(a), static_cast<int>(b), phi.psi(p[a], p[b]));
    }
  }
  return table;
}

SemigroupTable table_from_cocycle(const CocycleOracle& cocycle, Eigen::Index d,
                                  std::vector<Vector> probes, double h) {
  if (!(h > 0.0)) throw DimensionError("table_from_cocycle: need h > 0");
  SemigroupTable table(d, std::move(probes));
  const auto& p = table.probes();
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = 0; b < p.size(); ++b) {
      const Matrix semigroup = cocycle(p[a], p[b], h);
      Matrix log = semigroup.log();
      table.set(static_cast<int>(a), static_cast<int>(b), log / h);
    }
  }
  return table;
}

namespace {

std::string describe_probe(const Vector& c) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (i) out << ",";
    out << c(i).real();
    if (c(i).imag() != 0.0) out << (c(i).imag() > 0 ? "+" : "") << c(i).imag() << "i";
  }
  out << ")";
  return out.str();
}

Matrix block_formula(const Complex& z_prime, const Complex& z,
                     const Matrix& psi00, const Matrix& psi0c,
                     const Matrix& psic0, const Matrix& psicc) {
  return std::conj(z_prime - 1.0) * ((z - 1.0) * psi00 + psi0c) +
         (z - 1.0) * psic0 + psicc;
}

}  // namespace

ReconstructedGenerator::ReconstructedGenerator(SemigroupTable table)
    : table_(std::move(table)) {
  const Eigen::Index d = table_.noise_dim();
  std::vector<Vector> required = default_probes(d);
  std::vector<int> index;
  std::string missing;
  for (const auto& c : required) {
    const int i = table_.find(c);
    index.push_back(i);
    if (i < 0) missing += (missing.empty() ? "" : ", ") + describe_probe(c);
  }
  if (!missing.empty()) {
    throw StructureError("semigroup table is missing probes: " + missing);
  }
  for (int a : index) {
    for (int b : index) {
      if (!table_.has(a, b)) {
        throw StructureError("semigroup table is missing entry psi_{" +
                             describe_probe(table_.probes()[static_cast<std::size_t>(a)]) +
                             "," +
                             describe_probe(table_.probes()[static_cast<std::size_t>(b)]) +
                             "}");
      }
    }
  }

  // theta(mu,nu) is the block formula at zeta' = f_mu, zeta = f_nu.
  const Eigen::Index m = table_.at(index[0], index[0]).rows();
  basis_ = Coefficient(d, m);
  const int zero = index[0];
  for (Eigen::Index mu = 0; mu <= d; ++mu) {
    const int cp = index[static_cast<std::size_t>(mu)];
    const Complex zp = (mu == 0) ? 1.0 : 0.0;
    for (Eigen::Index nu = 0; nu <= d; ++nu) {
      const int c = index[static_cast<std::size_t>(nu)];
      const Complex z = (nu == 0) ? 1.0 : 0.0;
      basis_.theta(mu, nu) =
          block_formula(zp, z, table_.at(zero, zero), table_.at(zero, c),
                        table_.at(cp, zero), table_.at(cp, c));
    }
  }
}

Matrix ReconstructedGenerator::block(const Complex& z_prime,
                                     const Vector& c_prime, const Complex& z,
                                     const Vector& c) const {
  const int zero = table_.find(Vector::Zero(table_.noise_dim()));
  const int cp = table_.find(c_prime);
  const int cc = table_.find(c);
  std::string missing;
  if (cp < 0) missing += describe_probe(c_prime);
  if (cc < 0) missing += (missing.empty() ? "" : ", ") + describe_probe(c);
  if (!missing.empty()) {
    throw StructureError("semigroup table is missing probes: " + missing);
  }
  return block_formula(z_prime, z, table_.at(zero, zero), table_.at(zero, cc),
                       table_.at(cp, zero), table_.at(cp, cc));
}

Matrix ReconstructedGenerator::operator()(const Vector& zeta_prime,
                                          const Vector& zeta) const {
  return basis_.slice(zeta_prime, zeta);
}

ReconstructedGenerator reconstruct_phi(const SemigroupTable& table) {
  return ReconstructedGenerator(table);
}

Matrix difference_quotient_generator(Engine engine, const Coefficient& phi,
                                     const Vector& c_prime, const Vector& c,
                                     double t_small,
                                     const EngineOptions& options) {
  if (!(t_small > 0.0)) throw DimensionError("difference quotient needs t > 0");
  const auto gp = StepFunction::indicator(c_prime, 0.0, t_small);
  const auto g = StepFunction::indicator(c, 0.0, t_small);
  const Matrix k = transfer(engine, phi, gp, g, t_small, options);
  const Eigen::Index m = phi.space_dim();
  return (k - Matrix::Identity(m, m)) / t_small;
}

double conjugate_check(Engine engine, const Coefficient& phi,
                       const InitialMap& kappa, const InitialSpace& space,
                       const StepFunction& g_prime, const StepFunction& g,
                       double t, const EngineOptions& options) {
  space.validate();
  const Matrix& j = space.require_involution();
  const auto forward = matrix_element(engine, phi, kappa, g_prime, g, t, options);
  const auto backward = matrix_element(engine, conjugate(phi, space),
                                       conjugate(kappa, space), g, g_prime, t,
                                       options);
  double worst = 0.0;
  for (Eigen::Index x = 0; x < phi.space_dim(); ++x) {
    // x^dagger of e_x has coordinates J e_x.
    const Matrix lhs = backward.apply(j.col(x));
    worst = std::max(worst, (lhs - forward[x].adjoint()).norm());
  }
  return worst;
}

}  // namespace qsde::cocycle
