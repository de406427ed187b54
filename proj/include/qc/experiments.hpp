#ifndef QC_EXPERIMENTS_HPP
#define QC_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qc/lattice.hpp"
#include "qc/models.hpp"
#include "qc/potential.hpp"
#include "qc/solver.hpp"

namespace qc {

/// Inputs of one convergence study.  m values are nonlocal-region widths
/// (even, at least 2n+2 so that every coupling method is admissible);
/// dof values are targets for the bulk-force study, DoF = nodal count - 1.
struct ExperimentParams {
  int n_atoms = 2000;
  double cutoff_radius = 3.25;
  std::vector<ModelKind> models = {ModelKind::Qce, ModelKind::Qnl,
                                   ModelKind::GcrTableI, ModelKind::Qcp};
  std::vector<int> m_list = {8, 10, 12, 14, 16, 18, 20};
  std::vector<int> dof_list = {16, 32, 64, 128, 256};
  double residual_tolerance = 1e-12;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  int neighbor_range() const {
    return static_cast<int>(std::floor(cutoff_radius));
  }

  void validate() const {
    if (n_atoms < 4 || n_atoms % 2 != 0)
      throw std::invalid_argument("n_atoms: must be even and at least 4");
    if (!(cutoff_radius >= 1.0))
      throw std::invalid_argument("cutoff_radius: must be at least 1");
    if (!(residual_tolerance > 0.0))
      throw std::invalid_argument("residual_tolerance: must be positive");
    if (models.empty()) throw std::invalid_argument("models: list is empty");
    const int n = neighbor_range();
    for (int m : m_list) {
      if (m % 2 != 0) throw std::invalid_argument("m_list: m must be even");
      if (m < 2 * n + 2)
        throw std::invalid_argument("m_list: m must be at least 2n+2");
      if (m >= n_atoms / 2)
        throw std::invalid_argument("m_list: m too large for n_atoms");
    }
    for (int dof : dof_list) {
      if (dof < 2 * n + 2)
        throw std::invalid_argument("dof_list: dof must be at least 2n+2");
      if (dof > n_atoms - 1)
        throw std::invalid_argument("dof_list: dof must be at most N-1");
    }
  }
};

struct StudyRow {
  std::string model;
  double param = 0.0;  // sweep parameter: m or target DoF
  int dof = 0;
  int m = 0;
  double error = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
};

struct StudyMetadata {
  std::string study;
  int n_atoms = 0;
  double cutoff_radius = 0.0;
  int neighbor_range = 0;
  std::vector<std::string> models;
  std::vector<int> m_list;
  std::vector<int> dof_list;
  double residual_tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string output_dir;
  int reference_iterations = 0;
};

struct StudyTable {
  StudyMetadata meta;
  std::vector<StudyRow> rows;
};

/// Discrete W^{1,inf} distance: the largest difference of nearest-neighbor
/// strains between the two chains.  Invariant under shifting either chain
/// by a constant.  The displacements are differenced before scaling so the
/// result resolves far below one ulp of the strains themselves.
inline double w1inf_error(const PeriodicChain& numerical,
                          const PeriodicChain& reference) {
  if (numerical.size() != reference.size())
    throw std::invalid_argument("chains have different atom counts");
  const int n = numerical.size();
  const double dperiod = numerical.period() - reference.period();
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const double dj = numerical.displacement(j) - reference.displacement(j);
    const double di = numerical.displacement(i) - reference.displacement(i);
    err = std::max(err, std::abs(dperiod + (dj - di) * n));
  }
  return err;
}

/// Force dipole at the two central atoms, the defect of the localized test.
inline ExternalForce localized_force(int n_atoms) {
  if (n_atoms % 2 != 0) throw std::invalid_argument("n_atoms must be even");
  std::vector<double> f(static_cast<size_t>(n_atoms), 0.0);
  f[static_cast<size_t>(n_atoms / 2 - 1)] = -1.0;
  f[static_cast<size_t>(n_atoms / 2)] = 1.0;
  return ExternalForce(std::move(f));
}

/// Strong central dipole plus a smooth sine bulk force.  The sampled sine
/// does not sum to zero exactly, so the mean is projected out.
inline ExternalForce bulk_force(int n_atoms) {
  if (n_atoms % 2 != 0) throw std::invalid_argument("n_atoms must be even");
  std::vector<double> f(static_cast<size_t>(n_atoms), 0.0);
  for (int i = 0; i < n_atoms; ++i)
    f[static_cast<size_t>(i)] =
        std::sin(1.0 + 2.0 * std::numbers::pi_v<double> * (i + 1) / n_atoms) /
        n_atoms;
  f[static_cast<size_t>(n_atoms / 2 - 1)] += 10.0;
  f[static_cast<size_t>(n_atoms / 2)] += -10.0;
  return ExternalForce(std::move(f), /*project_zero_sum=*/true);
}

namespace detail {

/// Defect-centered mesh with nonlocal width m and the given number of
/// equidistant local nodes.
inline NodalMesh study_mesh(int n_atoms, int m, int local_nodes, int range) {
  return build_mesh(n_atoms, n_atoms / 2 - 1, 2, m / 2 - 1, local_nodes, range);
}

inline StudyMetadata make_metadata(const std::string& study,
                                   const ExperimentParams& params) {
  StudyMetadata meta;
  meta.study = study;
  meta.n_atoms = params.n_atoms;
  meta.cutoff_radius = params.cutoff_radius;
  meta.neighbor_range = params.neighbor_range();
  for (ModelKind kind : params.models) meta.models.push_back(model_name(kind));
  meta.m_list = params.m_list;
  meta.dof_list = params.dof_list;
  meta.residual_tolerance = params.residual_tolerance;
  meta.seed = params.seed;
  meta.output_dir = params.output_dir;
  return meta;
}

inline SolveResult reference_solve(const NodalMesh& mesh,
                                   const PairPotential& pot,
                                   const ExternalForce& force,
                                   const SolverConfig& cfg) {
  SolveResult ref = solve(ModelKind::Atomistic, mesh, pot, force,
                          uniform_config(mesh, 1.0), cfg);
  if (!ref.converged)
    throw std::runtime_error("atomistic reference solve did not converge");
  return ref;
}

}  // namespace detail

/// Localized-force test: the error of each coupling method against the full
/// atomistic solution as the nonlocal width m grows.  All nodal atoms are
/// nonlocal atoms; the reference is computed once and reused for every row.
inline StudyTable run_localized_force_study(const ExperimentParams& params) {
  params.validate();
  if (params.m_list.empty()) throw std::invalid_argument("m_list: list is empty");
  const int n = params.neighbor_range();
  const PairPotential pot = PairPotential::lennard_jones(params.cutoff_radius);
  const ExternalForce force = localized_force(params.n_atoms);
  SolverConfig cfg;
  cfg.residual_tolerance = params.residual_tolerance;

  StudyTable table;
  table.meta = detail::make_metadata("localized-force", params);

  const NodalMesh ref_mesh =
      detail::study_mesh(params.n_atoms, params.m_list.front(), 0, n);
  const SolveResult ref = detail::reference_solve(ref_mesh, pot, force, cfg);
  table.meta.reference_iterations = ref.iterations;

  for (ModelKind kind : params.models) {
    for (int m : params.m_list) {
      const NodalMesh mesh = detail::study_mesh(params.n_atoms, m, 0, n);
      StudyRow row;
      row.model = model_name(kind);
      row.param = m;
      row.m = m;
      row.dof = mesh.node_count() - 1;
      try {
        const SolveResult res =
            solve(kind, mesh, pot, force, uniform_config(mesh, 1.0), cfg);
        row.iterations = res.iterations;
        row.converged = res.converged;
        if (res.converged) row.error = w1inf_error(res.chain, ref.chain);
      } catch (const std::exception&) {
        row.iterations = -1;
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

/// Bulk-force test: for each target DoF the nonlocal width m is swept over
/// all admissible even values, the remaining nodes are spread over the
/// local region, and the smallest error found is recorded (ties keep the
/// smallest m).
inline StudyTable run_bulk_force_study(const ExperimentParams& params) {
  params.validate();
  if (params.dof_list.empty())
    throw std::invalid_argument("dof_list: list is empty");
  const int n = params.neighbor_range();
  const PairPotential pot = PairPotential::lennard_jones(params.cutoff_radius);
  const ExternalForce force = bulk_force(params.n_atoms);
  SolverConfig cfg;
  cfg.residual_tolerance = params.residual_tolerance;

  StudyTable table;
  table.meta = detail::make_metadata("bulk-force", params);

  const NodalMesh ref_mesh = detail::study_mesh(params.n_atoms, 2 * n + 2, 0, n);
  const SolveResult ref = detail::reference_solve(ref_mesh, pot, force, cfg);
  table.meta.reference_iterations = ref.iterations;

  for (ModelKind kind : params.models) {
    for (int target_dof : params.dof_list) {
      StudyRow row;
      row.model = model_name(kind);
      row.param = target_dof;
      row.dof = target_dof;
      for (int m = 2 * n + 2; target_dof + 1 - m >= 1; m += 2) {
        const int local_nodes = target_dof + 1 - m;
        try {
          const NodalMesh mesh =
              detail::study_mesh(params.n_atoms, m, local_nodes, n);
          const SolveResult res =
              solve(kind, mesh, pot, force, uniform_config(mesh, 1.0), cfg);
          if (!res.converged) continue;
          const double err = w1inf_error(res.chain, ref.chain);
          if (!row.converged || err < row.error) {
            row.converged = true;
            row.error = err;
            row.m = m;
            row.iterations = res.iterations;
          }
        } catch (const std::exception&) {
          // inadmissible mesh or failed solve: this m is skipped
        }
      }
      if (!row.converged) row.iterations = -1;
      table.rows.push_back(row);
    }
  }
  return table;
}

enum class FitMode { ExponentialInM, PowerInDof };

struct FitResult {
  double rate = 0.0;      // slope of log(error) vs m, or vs log(DoF)
  double residual = 0.0;  // rms deviation of log(error) from the fit
};

/// Least-squares line through (x, log error) with x = m or x = log(DoF).
inline FitResult fit_convergence(const StudyTable& table,
                                 const std::string& model, FitMode mode) {
  std::vector<double> xs, ys;
  for (const StudyRow& row : table.rows) {
    if (row.model != model) continue;
    if (!row.converged || !(row.error > 0.0) || !std::isfinite(row.error))
      continue;
    xs.push_back(mode == FitMode::ExponentialInM
                     ? static_cast<double>(row.m)
                     : std::log(static_cast<double>(row.dof)));
    ys.push_back(std::log(row.error));
  }
  const size_t count = xs.size();
  if (count < 3)
    throw std::invalid_argument("fit needs at least 3 rows for model '" +
                                model + "'");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < count; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("degenerate fit abscissae");
  FitResult fit;
  fit.rate = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.rate * sx) / count;
  double ss = 0.0;
  for (size_t i = 0; i < count; ++i) {
    const double r = ys[i] - intercept - fit.rate * xs[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

}  // namespace qc

#endif  // QC_EXPERIMENTS_HPP
