#ifndef QC_TEST_HELPERS_HPP
#define QC_TEST_HELPERS_HPP

#include <cstdint>
#include <random>

#include "qc/lattice.hpp"
#include "qc/models.hpp"
#include "qc/potential.hpp"

namespace qctest {

/// Uniform lattice plus independent nodal displacements of the given size
/// (in units of the lattice parameter).
inline qc::NodalConfig perturbed_config(const qc::NodalMesh& mesh,
                                        double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  qc::NodalConfig config = qc::uniform_config(mesh, 1.0);
  for (double& w : config.node_disp) w = dist(rng) * mesh.spacing();
  return config;
}

/// Literal half-weighted double sum over ordered pairs, the defining
/// atomistic energy.  Kept independent of the production bond loop.
inline double brute_force_energy(const qc::PeriodicChain& chain,
                                 const qc::PairPotential& pot,
                                 const qc::ExternalForce& force) {
  const int n_atoms = chain.size();
  const int range = pot.neighbor_range();
  const double eps = chain.spacing();
  double energy = 0.0;
  for (int i = 0; i < n_atoms; ++i) {
    for (int d = -range; d <= range; ++d) {
      if (d == 0) continue;
      const double r =
          (chain.position(i) - chain.position(static_cast<long>(i) + d)) *
          n_atoms;
      energy += 0.5 * eps * pot.eval(r).value;
    }
    energy -= eps * force[i] * chain.position(i);
  }
  return energy;
}

}  // namespace qctest

#endif
