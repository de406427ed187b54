#include <catch_amalgamated.hpp>

#include <cmath>

#include "qc/config_io.hpp"
#include "qc/experiments.hpp"

using qc::ExperimentParams;
using qc::FitMode;
using qc::ModelKind;
using qc::PeriodicChain;
using qc::StudyRow;
using qc::StudyTable;

TEST_CASE("discrete W1-infinity error") {
  PeriodicChain a(50);
  PeriodicChain b(50);

  SECTION("identical chains") { CHECK(qc::w1inf_error(a, b) == 0.0); }

  SECTION("constant shifts cancel") {
    for (int i = 0; i < 50; ++i) b.displacement(i) += 0.3;
    CHECK(qc::w1inf_error(a, b) == 0.0);
  }

  SECTION("one enlarged gap") {
    const double delta = 1e-4;
    // widen the gap between atoms 9 and 10 by delta
    for (int i = 10; i < 50; ++i) b.displacement(i) += delta;
    // the wrap bond (49, 50) shrinks by the same amount
    const double expected = delta * 50;
    CHECK(qc::w1inf_error(a, b) == Catch::Approx(expected).epsilon(1e-12));
  }

  SECTION("mismatched chains are rejected") {
    PeriodicChain c(40);
    CHECK_THROWS_AS(qc::w1inf_error(a, c), std::invalid_argument);
  }
}

TEST_CASE("study forces") {
  SECTION("localized dipole") {
    const auto f = qc::localized_force(100);
    CHECK(f[49] == -1.0);
    CHECK(f[50] == 1.0);
    double sum = 0.0;
    for (int i = 0; i < 100; ++i) sum += f[i];
    CHECK(std::abs(sum) <= 1e-12);
  }

  SECTION("bulk force is projected to zero sum") {
    const auto f = qc::bulk_force(1000);
    long double sum = 0.0L;
    for (int i = 0; i < 1000; ++i) sum += f[i];
    CHECK(std::abs(static_cast<double>(sum)) <= 1e-12);
    CHECK(f[499] > 9.0);   // dipole dominates the sine part
    CHECK(f[500] < -9.0);
  }

  SECTION("unbalanced forces are rejected unless projected") {
    CHECK_THROWS_AS(qc::ExternalForce({1.0, 0.0, 0.0}), std::invalid_argument);
    const qc::ExternalForce projected({1.0, 0.0, 0.0}, true);
    CHECK(projected[0] == Catch::Approx(2.0 / 3.0));
    CHECK(projected[1] == Catch::Approx(-1.0 / 3.0));
  }
}

TEST_CASE("convergence fits") {
  StudyTable table;
  for (int m = 8; m <= 20; m += 2) {
    StudyRow row;
    row.model = "synthetic";
    row.param = m;
    row.m = m;
    row.dof = m - 1;
    row.error = std::pow(2.0, -m);
    row.converged = true;
    table.rows.push_back(row);
  }
  for (int dof : {16, 32, 64, 128}) {
    StudyRow row;
    row.model = "power";
    row.param = dof;
    row.m = 8;
    row.dof = dof;
    row.error = 1.0 / dof;
    row.converged = true;
    table.rows.push_back(row);
  }

  SECTION("exponential rate") {
    const auto fit =
        qc::fit_convergence(table, "synthetic", FitMode::ExponentialInM);
    CHECK(fit.rate == Catch::Approx(-std::log(2.0)).margin(1e-10));
    CHECK(fit.residual <= 1e-10);
  }

  SECTION("power-law slope") {
    const auto fit = qc::fit_convergence(table, "power", FitMode::PowerInDof);
    CHECK(fit.rate == Catch::Approx(-1.0).margin(1e-10));
    CHECK(fit.residual <= 1e-10);
  }

  SECTION("too few rows") {
    CHECK_THROWS_AS(qc::fit_convergence(table, "absent", FitMode::PowerInDof),
                    std::invalid_argument);
  }
}

TEST_CASE("localized-force study at reduced scale") {
  ExperimentParams params;
  params.n_atoms = 400;
  params.models = {ModelKind::Qce, ModelKind::Qcp};
  params.m_list = {8, 10, 12};
  params.dof_list = {16};
  params.residual_tolerance = 1e-13;

  const StudyTable table = qc::run_localized_force_study(params);
  REQUIRE(table.rows.size() == 6);
  CHECK(table.meta.study == "localized-force");
  CHECK(table.meta.neighbor_range == 3);
  CHECK(table.meta.reference_iterations >= 1);

  for (const StudyRow& row : table.rows) {
    CHECK(row.converged);
    CHECK(row.dof == row.m - 1);
    CHECK(std::isfinite(row.error));
    CHECK(row.error >= 0.0);
  }

  // the projection error sits far below the classical plateau
  double qce_error = 0.0, qcp_error = 0.0;
  for (const StudyRow& row : table.rows)
    if (row.m == 12) {
      if (row.model == "qce") qce_error = row.error;
      if (row.model == "qcp") qcp_error = row.error;
    }
  CHECK(qcp_error < 0.01 * qce_error);

  SECTION("reruns are bit-identical") {
    const StudyTable again = qc::run_localized_force_study(params);
    CHECK(qc::to_csv(again) == qc::to_csv(table));
  }
}

TEST_CASE("projection solutions nearly satisfy the full-chain equations") {
  // Diagnostic: reconstructing a converged projection solution leaves only
  // the interpolation error in the atomistic gradient, while the classical
  // coupling leaves its interface forces behind.
  const int n_atoms = 400;
  const qc::PairPotential lj = qc::PairPotential::lennard_jones(3.25);
  const qc::NodalMesh mesh = qc::build_mesh(n_atoms, 199, 2, 3, 0, 3);
  const qc::ExternalForce force = qc::localized_force(n_atoms);
  qc::SolverConfig cfg;
  cfg.residual_tolerance = 1e-13;

  auto full_residual = [&](qc::ModelKind kind) {
    const auto res = qc::solve(kind, mesh, lj, force,
                               qc::uniform_config(mesh, 1.0), cfg);
    REQUIRE(res.converged);
    const auto report = qc::atomistic_report(res.chain, lj, force);
    return report.gradient.cwiseAbs().maxCoeff();
  };
  const double qcp = full_residual(qc::ModelKind::Qcp);
  const double qce = full_residual(qc::ModelKind::Qce);
  CHECK(qcp < 0.01 * qce);
}

TEST_CASE("bulk-force study at reduced scale") {
  ExperimentParams params;
  params.n_atoms = 400;
  params.models = {ModelKind::Qcp};
  params.m_list = {8};
  params.dof_list = {16, 24};
  params.residual_tolerance = 1e-13;

  const StudyTable table = qc::run_bulk_force_study(params);
  REQUIRE(table.rows.size() == 2);
  for (const StudyRow& row : table.rows) {
    CHECK(row.converged);
    CHECK(row.m >= 8);
    CHECK(row.m <= row.dof);
    CHECK(std::isfinite(row.error));
    CHECK(row.error > 0.0);
  }
  // more degrees of freedom cannot hurt the best-m error
  CHECK(table.rows[1].error <= table.rows[0].error);

  const StudyTable again = qc::run_bulk_force_study(params);
  CHECK(qc::to_csv(again) == qc::to_csv(table));
}
