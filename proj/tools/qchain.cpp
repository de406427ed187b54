// Command-line driver: ghost-force tables, the two 1D convergence studies,
// single solves, and derivative checks.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "qc/config_io.hpp"
#include "qc/experiments.hpp"
#include "qc/lattice.hpp"
#include "qc/models.hpp"
#include "qc/potential.hpp"
#include "qc/solver.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  int n_atoms = -1;
  std::string models;
  std::string m_list;
  std::string dof_list;
  double tolerance = -1.0;
  long long seed = -1;
  std::string output_dir;
};

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : qc::detail::split_list(text))
    out.push_back(qc::detail::parse_number<int>(key, item));
  return out;
}

qc::ExperimentParams resolve_params(const CommonOptions& opt) {
  qc::ExperimentParams params;
  if (!opt.config_path.empty()) params = qc::load_config(opt.config_path);
  if (opt.n_atoms > 0) params.n_atoms = opt.n_atoms;
  if (!opt.models.empty()) {
    params.models.clear();
    for (const std::string& name : qc::detail::split_list(opt.models))
      params.models.push_back(qc::model_from_name(name));
  }
  if (!opt.m_list.empty()) params.m_list = parse_int_list("m_list", opt.m_list);
  if (!opt.dof_list.empty())
    params.dof_list = parse_int_list("dof_list", opt.dof_list);
  if (opt.tolerance > 0.0) params.residual_tolerance = opt.tolerance;
  if (opt.seed >= 0) params.seed = static_cast<std::uint64_t>(opt.seed);
  if (!opt.output_dir.empty()) params.output_dir = opt.output_dir;
  params.validate();
  return params;
}

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "key = value configuration file");
  cmd->add_option("--n-atoms", opt.n_atoms, "atoms per period (even)");
  cmd->add_option("--models", opt.models, "comma-separated model list");
  cmd->add_option("--m-list", opt.m_list, "comma-separated nonlocal widths");
  cmd->add_option("--dof-list", opt.dof_list, "comma-separated DoF targets");
  cmd->add_option("--tolerance", opt.tolerance, "Newton residual tolerance");
  cmd->add_option("--seed", opt.seed, "seed echoed into metadata");
  cmd->add_option("--output-dir", opt.output_dir, "report output directory");
}

void print_study(const qc::StudyTable& table) {
  std::printf("%-12s %8s %6s %4s %14s %5s\n", "model", "param", "dof", "m",
              "error", "iter");
  for (const qc::StudyRow& row : table.rows)
    std::printf("%-12s %8g %6d %4d %14.6e %5d\n", row.model.c_str(), row.param,
                row.dof, row.m, row.error, row.iterations);
}

void write_study(const qc::StudyTable& table, const std::string& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + stem;
  qc::write_report(table, qc::ReportFormat::Csv, base + ".csv");
  qc::write_report(table, qc::ReportFormat::Json, base + ".json");
  std::printf("wrote %s.csv and %s.json\n", base.c_str(), base.c_str());
}

int run_ghost_force(int n_atoms, int m, int local_nodes, double z) {
  const std::vector<qc::ModelKind> kinds = {
      qc::ModelKind::Qce,       qc::ModelKind::Qnl,
      qc::ModelKind::GcrTableI, qc::ModelKind::GcrShifted,
      qc::ModelKind::Qcp,       qc::ModelKind::Qcpm};
  const std::vector<std::pair<int, double>> ranges = {{2, 2.5}, {3, 3.25}};

  std::printf("ghost-force residual max-norms at uniform strain z = %g\n", z);
  std::printf("(N = %d, nonlocal width m = %d, %d local nodes)\n\n", n_atoms, m,
              local_nodes);
  std::printf("%-12s", "model");
  for (const auto& [n, cutoff] : ranges) std::printf(" %14s", ("n=" + std::to_string(n)).c_str());
  std::printf("\n");
  for (qc::ModelKind kind : kinds) {
    std::printf("%-12s", qc::model_name(kind).c_str());
    for (const auto& [n, cutoff] : ranges) {
      const qc::PairPotential pot = qc::PairPotential::lennard_jones(cutoff);
      const qc::NodalMesh mesh =
          qc::build_mesh(n_atoms, n_atoms / 2 - 1, 2, m / 2 - 1, local_nodes, n);
      try {
        const qc::GhostForceResult res = qc::ghost_force(kind, mesh, z, pot);
        std::printf(" %14.4e", res.max_norm);
      } catch (const std::exception&) {
        std::printf(" %14s", "n/a");
      }
    }
    std::printf("\n");
  }
  return 0;
}

int run_solve(const std::string& model, int n_atoms, int m, int local_nodes,
              const std::string& force_name, double tolerance,
              const std::string& output) {
  const qc::ModelKind kind = qc::model_from_name(model);
  const qc::PairPotential pot = qc::PairPotential::lennard_jones(3.25);
  const int n = pot.neighbor_range();
  const qc::NodalMesh mesh =
      qc::build_mesh(n_atoms, n_atoms / 2 - 1, 2, m / 2 - 1, local_nodes, n);
  qc::ExternalForce force = force_name == "bulk" ? qc::bulk_force(n_atoms)
                                                 : qc::localized_force(n_atoms);
  qc::SolverConfig cfg;
  if (tolerance > 0.0) cfg.residual_tolerance = tolerance;
  const qc::SolveResult res =
      qc::solve(kind, mesh, pot, force, qc::uniform_config(mesh, 1.0), cfg);
  std::printf("%s solve: %d unknowns, %d iterations, final residual %.3e%s\n",
              model.c_str(),
              kind == qc::ModelKind::Atomistic ? mesh.atom_count()
                                               : mesh.node_count(),
              res.iterations, res.residual_history.back(),
              res.converged ? "" : " (NOT converged)");
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chain file: " + output);
  out << "index,position\n";
  for (int i = 0; i < res.chain.size(); ++i)
    out << i << ',' << qc::detail::format_double(res.chain.position(i)) << '\n';
  std::printf("wrote %s (%d rows)\n", output.c_str(), res.chain.size());
  return res.converged ? 0 : 2;
}

int run_fd_check(int n_atoms, int m, int local_nodes, unsigned seed) {
  const qc::PairPotential pot = qc::PairPotential::lennard_jones(3.25);
  const int n = pot.neighbor_range();
  const qc::NodalMesh mesh =
      qc::build_mesh(n_atoms, n_atoms / 2 - 1, 2, m / 2 - 1, local_nodes, n);
  const qc::ExternalForce force = qc::localized_force(n_atoms);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  qc::NodalConfig config = qc::uniform_config(mesh, 1.0);
  for (double& w : config.node_disp) w = dist(rng) * mesh.spacing();

  const std::vector<qc::ModelKind> kinds = {
      qc::ModelKind::Atomistic, qc::ModelKind::Qce,
      qc::ModelKind::Qnl,       qc::ModelKind::GcrTableI,
      qc::ModelKind::GcrShifted, qc::ModelKind::Qcp,
      qc::ModelKind::Qcpm};
  std::printf("central finite-difference deviations (N = %d, m = %d)\n\n",
              n_atoms, m);
  std::printf("%-12s %14s %14s\n", "model", "gradient", "hessian");
  for (qc::ModelKind kind : kinds) {
    const qc::FdDeviation dev = qc::fd_check(kind, mesh, config, pot, force);
    std::printf("%-12s %14.4e %14.4e\n", qc::model_name(kind).c_str(),
                dev.gradient, dev.hessian);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-based quasicontinuum methods on 1D periodic chains"};
  app.require_subcommand(1);

  // ghost-force
  auto* ghost = app.add_subcommand(
      "ghost-force", "residual forces of each model at the uniform lattice");
  int gf_n_atoms = 2000, gf_m = 8, gf_local = 3;
  double gf_z = 1.0;
  ghost->add_option("--n-atoms", gf_n_atoms, "atoms per period");
  ghost->add_option("--m", gf_m, "nonlocal width (even)");
  ghost->add_option("--local-nodes", gf_local, "interior local nodes");
  ghost->add_option("--z", gf_z, "uniform strain");

  // test1
  auto* test1 = app.add_subcommand(
      "test1", "localized-force convergence study (error vs nonlocal width)");
  CommonOptions opt1;
  add_common_options(test1, opt1);

  // test2
  auto* test2 = app.add_subcommand(
      "test2", "bulk-force convergence study (error vs DoF)");
  CommonOptions opt2;
  add_common_options(test2, opt2);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve one configuration");
  std::string sv_model = "qcp", sv_force = "localized", sv_output = "solution.csv";
  int sv_n_atoms = 2000, sv_m = 8, sv_local = 0;
  double sv_tol = -1.0;
  solve_cmd->add_option("--model", sv_model, "model name");
  solve_cmd->add_option("--n-atoms", sv_n_atoms, "atoms per period");
  solve_cmd->add_option("--m", sv_m, "nonlocal width (even)");
  solve_cmd->add_option("--local-nodes", sv_local, "interior local nodes");
  solve_cmd->add_option("--force", sv_force, "localized or bulk");
  solve_cmd->add_option("--tolerance", sv_tol, "Newton residual tolerance");
  solve_cmd->add_option("--output", sv_output, "chain CSV path");

  // fd-check
  auto* fd = app.add_subcommand("fd-check",
                                "finite-difference derivative verification");
  int fd_n_atoms = 200, fd_m = 8, fd_local = 3;
  unsigned fd_seed = 1;
  fd->add_option("--n-atoms", fd_n_atoms, "atoms per period");
  fd->add_option("--m", fd_m, "nonlocal width (even)");
  fd->add_option("--local-nodes", fd_local, "interior local nodes");
  fd->add_option("--seed", fd_seed, "perturbation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ghost->parsed())
      return run_ghost_force(gf_n_atoms, gf_m, gf_local, gf_z);
    if (test1->parsed()) {
      const qc::ExperimentParams params = resolve_params(opt1);
      const qc::StudyTable table = qc::run_localized_force_study(params);
      print_study(table);
      write_study(table, params.output_dir, "test1");
      return 0;
    }
    if (test2->parsed()) {
      const qc::ExperimentParams params = resolve_params(opt2);
      const qc::StudyTable table = qc::run_bulk_force_study(params);
      print_study(table);
      write_study(table, params.output_dir, "test2");
      return 0;
    }
    if (solve_cmd->parsed())
      return run_solve(sv_model, sv_n_atoms, sv_m, sv_local, sv_force, sv_tol,
                       sv_output);
    if (fd->parsed()) return run_fd_check(fd_n_atoms, fd_m, fd_local, fd_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
