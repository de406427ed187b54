#ifndef QC_SOLVER_HPP
#define QC_SOLVER_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qc/lattice.hpp"
#include "qc/models.hpp"

namespace qc {

/// Newton settings.  The gauge atom's position is held at its initial
/// value: shifting every atom by a constant leaves the energy unchanged,
/// so one unknown must be pinned for the Hessian to be invertible.
struct SolverConfig {
  double residual_tolerance = 1e-12;  // max-norm of the gauge-fixed gradient
  int max_iterations = 50;
  int max_step_halvings = 30;
  int gauge_index = 0;  // unknown index that stays fixed

  void validate() const {
    if (!(residual_tolerance > 0.0))
      throw std::invalid_argument("residual tolerance must be positive");
    if (max_iterations < 1)
      throw std::invalid_argument("max iterations must be at least 1");
  }
};

struct SolveResult {
  NodalConfig config;           // nodal restriction of the solution
  PeriodicChain chain;          // full-chain solution
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm per iterate, initial first
  bool converged = false;
};

namespace detail {

inline double gauge_residual(const Eigen::VectorXd& gradient, int gauge) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < gradient.size(); ++i)
    if (i != gauge) r = std::max(r, std::abs(gradient[i]));
  return r;
}

/// Solves H d = -g with the gauge row and column removed, returning d with
/// a zero in the gauge slot.
inline Eigen::VectorXd gauge_fixed_newton_step(
    const Eigen::SparseMatrix<double>& hessian, const Eigen::VectorXd& gradient,
    int gauge, int iteration) {
  const int n = static_cast<int>(gradient.size());
  const int r = n - 1;
  if (r == 0) return Eigen::VectorXd::Zero(1);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(hessian.nonZeros()));
  for (int col = 0; col < hessian.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(hessian, col); it; ++it) {
      if (it.row() == gauge || it.col() == gauge) continue;
      const int i = static_cast<int>(it.row()) - (it.row() > gauge ? 1 : 0);
      const int j = static_cast<int>(it.col()) - (it.col() > gauge ? 1 : 0);
      triplets.emplace_back(i, j, it.value());
    }
  Eigen::SparseMatrix<double> reduced(r, r);
  reduced.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::VectorXd rhs(r);
  for (int i = 0, k = 0; i < n; ++i)
    if (i != gauge) rhs[k++] = -gradient[i];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("indefinite/singular Newton system at iteration " +
                             std::to_string(iteration));
  Eigen::VectorXd d = ldlt.solve(rhs);
  if (!d.allFinite())
    throw std::runtime_error("indefinite/singular Newton system at iteration " +
                             std::to_string(iteration));
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (int i = 0, k = 0; i < n; ++i)
    if (i != gauge) full[i] = d[k++];
  return full;
}

}  // namespace detail

/// Damped Newton minimization of the model energy from the given initial
/// configuration.  Steps are halved until the energy stops increasing;
/// configurations with inverted bonds are rejected the same way.
inline SolveResult solve(ModelKind kind, const NodalMesh& mesh,
                         const PairPotential& pot, const ExternalForce& force,
                         const NodalConfig& initial, const SolverConfig& cfg) {
  cfg.validate();
  const bool atomistic = kind == ModelKind::Atomistic;
  const int unknowns = atomistic ? mesh.atom_count() : mesh.node_count();
  if (cfg.gauge_index < 0 || cfg.gauge_index >= unknowns)
    throw std::invalid_argument("gauge index outside unknown range");

  // Unknowns are displacements; for the atomistic model they live on every
  // atom of the reconstructed initial chain.
  PeriodicChain chain = reconstruct(mesh, initial);
  NodalConfig nodal = initial;

  auto evaluate = [&]() -> EnergyReport {
    if (atomistic) return atomistic_report(chain, pot, force);
    return model_report(kind, mesh, nodal, pot, force);
  };
  auto unknown = [&](int i) -> double& {
    return atomistic ? chain.displacement(i) : nodal.node_disp[static_cast<size_t>(i)];
  };

  SolveResult result{initial, chain};
  EnergyReport report = evaluate();
  double residual = detail::gauge_residual(report.gradient, cfg.gauge_index);
  result.residual_history.push_back(residual);

  while (residual > cfg.residual_tolerance &&
         result.iterations < cfg.max_iterations) {
    const Eigen::VectorXd step = detail::gauge_fixed_newton_step(
        report.hessian, report.gradient, cfg.gauge_index, result.iterations);

    std::vector<double> base(static_cast<size_t>(unknowns));
    for (int i = 0; i < unknowns; ++i) base[static_cast<size_t>(i)] = unknown(i);

    const double energy_before = report.energy;
    // The acceptance slack must absorb the summation noise of the energy:
    // near the minimum a correct Newton step may lower the exact energy by
    // less than the rounding of a sum with ~N terms of order one.
    const double slack = 1e-11 * (1.0 + std::abs(energy_before));
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_step_halvings; ++halving) {
      for (int i = 0; i < unknowns; ++i)
        unknown(i) = base[static_cast<size_t>(i)] + t * step[i];
      try {
        EnergyReport trial = evaluate();
        if (trial.energy <= energy_before + slack) {
          report = std::move(trial);
          accepted = true;
          break;
        }
      } catch (const std::domain_error&) {
        // inverted bond: reject and shorten the step
      }
      t *= 0.5;
    }
    if (!accepted) {
      for (int i = 0; i < unknowns; ++i) unknown(i) = base[static_cast<size_t>(i)];
      throw std::runtime_error("Newton damping exhausted at iteration " +
                               std::to_string(result.iterations));
    }
    ++result.iterations;
    residual = detail::gauge_residual(report.gradient, cfg.gauge_index);
    result.residual_history.push_back(residual);
  }

  result.converged = residual <= cfg.residual_tolerance;
  if (atomistic) {
    result.chain = chain;
    result.config = restriction(mesh, chain);
  } else {
    result.config = nodal;
    result.chain = reconstruct(mesh, nodal);
  }
  return result;
}

/// Maximum relative deviations of the analytic gradient and Hessian from
/// central finite differences of the energy and gradient.  The step is
/// 1e-6 of the lattice parameter, a relative strain perturbation of 1e-6.
struct FdDeviation {
  double gradient = 0.0;
  double hessian = 0.0;
};

inline FdDeviation fd_check(ModelKind kind, const NodalMesh& mesh,
                            const NodalConfig& config, const PairPotential& pot,
                            const ExternalForce& force) {
  const bool atomistic = kind == ModelKind::Atomistic;
  const int unknowns = atomistic ? mesh.atom_count() : mesh.node_count();
  const double step = 1e-6 * mesh.spacing();

  PeriodicChain chain = reconstruct(mesh, config);
  NodalConfig nodal = config;
  auto evaluate = [&]() -> EnergyReport {
    if (atomistic) return atomistic_report(chain, pot, force);
    return model_report(kind, mesh, nodal, pot, force);
  };
  auto unknown = [&](int i) -> double& {
    return atomistic ? chain.displacement(i) : nodal.node_disp[static_cast<size_t>(i)];
  };

  const EnergyReport base = evaluate();
  const Eigen::MatrixXd dense_hessian = Eigen::MatrixXd(base.hessian);

  Eigen::VectorXd fd_grad(unknowns);
  Eigen::MatrixXd fd_hess(unknowns, unknowns);
  for (int i = 0; i < unknowns; ++i) {
    const double saved = unknown(i);
    unknown(i) = saved + step;
    const EnergyReport plus = evaluate();
    unknown(i) = saved - step;
    const EnergyReport minus = evaluate();
    unknown(i) = saved;
    fd_grad[i] = (plus.energy - minus.energy) / (2.0 * step);
    fd_hess.col(i) = (plus.gradient - minus.gradient) / (2.0 * step);
  }

  FdDeviation dev;
  const double gscale = std::max(1.0, base.gradient.cwiseAbs().maxCoeff());
  dev.gradient = (base.gradient - fd_grad).cwiseAbs().maxCoeff() / gscale;
  const double hscale = std::max(1.0, dense_hessian.cwiseAbs().maxCoeff());
  dev.hessian = (dense_hessian - fd_hess).cwiseAbs().maxCoeff() / hscale;
  return dev;
}

}  // namespace qc

#endif  // QC_SOLVER_HPP
