#ifndef QC_POTENTIAL_HPP
#define QC_POTENTIAL_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace qc {

/// Value of a scalar function together with its first two derivatives.
struct Derivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

enum class PotentialKind { LennardJones, UserSupplied };

/// Pair interaction law phi(z) with z measured in units of the lattice
/// parameter.  phi is extended to negative arguments as an even function,
/// so phi' is odd and phi'' is even.  The neighbor range n is the largest
/// integer not exceeding the cutoff radius: with cutoff 3.25 the energy
/// sums run over third neighbors, with cutoff 2.5 over second neighbors.
///
/// The cutoff fixes n once; separations are never re-checked against it,
/// which keeps all energies smooth in the atom positions.
class PairPotential {
 public:
  static PairPotential lennard_jones(double cutoff_radius) {
    // phi(z) = z^-12 - 2 z^-6, minimum value -1 at z = 1
    auto phi = [](double z) {
      const double inv = 1.0 / z;
      const double i6 = inv * inv * inv * inv * inv * inv;
      return i6 * i6 - 2.0 * i6;
    };
    auto dphi = [](double z) {
      const double inv = 1.0 / z;
      const double i6 = inv * inv * inv * inv * inv * inv;
      return (-12.0 * i6 * i6 + 12.0 * i6) * inv;
    };
    auto ddphi = [](double z) {
      const double inv = 1.0 / z;
      const double i6 = inv * inv * inv * inv * inv * inv;
      return (156.0 * i6 * i6 - 84.0 * i6) * (inv * inv);
    };
    return PairPotential(PotentialKind::LennardJones, std::move(phi),
                         std::move(dphi), std::move(ddphi), cutoff_radius);
  }

  /// User-supplied interaction.  The callables are queried for z > 0 only;
  /// the even extension is applied by eval().
  static PairPotential user_supplied(std::function<double(double)> phi,
                                     std::function<double(double)> dphi,
                                     std::function<double(double)> ddphi,
                                     double cutoff_radius) {
    return PairPotential(PotentialKind::UserSupplied, std::move(phi),
                         std::move(dphi), std::move(ddphi), cutoff_radius);
  }

  PotentialKind kind() const { return kind_; }
  double cutoff_radius() const { return cutoff_; }

  /// Largest neighbor offset m with m <= cutoff_radius.
  int neighbor_range() const { return range_; }

  /// phi, phi', phi'' at z, with the even-extension convention for z < 0.
  Derivatives eval(double z) const {
    if (z == 0.0)
      throw std::domain_error("potential singular at zero separation");
    if (z > 0.0) return {phi_(z), dphi_(z), ddphi_(z)};
    return {phi_(-z), -dphi_(-z), ddphi_(-z)};
  }

  double value(double z) const { return eval(z).value; }

 private:
  PairPotential(PotentialKind kind, std::function<double(double)> phi,
                std::function<double(double)> dphi,
                std::function<double(double)> ddphi, double cutoff)
      : kind_(kind),
        phi_(std::move(phi)),
        dphi_(std::move(dphi)),
        ddphi_(std::move(ddphi)),
        cutoff_(cutoff),
        range_(static_cast<int>(std::floor(cutoff))) {
    if (!(cutoff >= 1.0))
      throw std::invalid_argument("cutoff radius must be at least 1");
  }

  PotentialKind kind_;
  std::function<double(double)> phi_, dphi_, ddphi_;
  double cutoff_;
  int range_;
};

/// phi(z) and its first two derivatives.  Convenience form of
/// PairPotential::eval used throughout the tests.
inline Derivatives phi_eval(const PairPotential& pot, double z) {
  return pot.eval(z);
}

/// Interatomic energy density of a uniformly strained chain,
///   Phi(z) = sum_{m=1..n} phi(m z),
/// with the exact term-by-term derivatives.  Requires z > 0: an element
/// strained through zero has no meaningful continuum energy.
inline Derivatives cb_density(const PairPotential& pot, double z) {
  if (!(z > 0.0))
    throw std::domain_error("Cauchy-Born density needs positive strain");
  Derivatives out;
  for (int m = 1; m <= pot.neighbor_range(); ++m) {
    const Derivatives d = pot.eval(m * z);
    out.value += d.value;
    out.first += m * d.first;
    out.second += m * m * d.second;
  }
  return out;
}

/// Cauchy-Born density bound to one potential.
class CauchyBornDensity {
 public:
  explicit CauchyBornDensity(const PairPotential& pot) : pot_(&pot) {}
  Derivatives eval(double z) const { return cb_density(*pot_, z); }
  const PairPotential& potential() const { return *pot_; }

 private:
  const PairPotential* pot_;
};

}  // namespace qc

#endif  // QC_POTENTIAL_HPP
