#ifndef QC_LATTICE_HPP
#define QC_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qc {

namespace detail {
inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace detail

/// Atom positions of one period of an infinite chain, extended by
/// u_{i+N} = u_i + period.  N atoms per period, lattice parameter
/// eps = 1/N, so the reference chain (period 1, zero displacement) is
/// u_i = eps * i.
///
/// Positions are stored as displacements from the uniform lattice
/// eps * period * i.  Strains are formed from displacement differences,
/// which keeps them accurate to machine precision even when positions
/// themselves are O(1); convergence studies measure strain differences
/// far below the rounding level of absolute positions.
class PeriodicChain {
 public:
  PeriodicChain(int n_atoms, double period = 1.0)
      : n_(n_atoms), period_(period), disp_(static_cast<size_t>(n_atoms), 0.0) {
    if (n_atoms < 2) throw std::invalid_argument("chain needs at least 2 atoms");
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  }

  static PeriodicChain from_positions(const std::vector<double>& u,
                                      double period = 1.0) {
    PeriodicChain chain(static_cast<int>(u.size()), period);
    const double eps = chain.spacing();
    for (int i = 0; i < chain.size(); ++i)
      chain.disp_[i] = u[i] - eps * period * i;
    return chain;
  }

  int size() const { return n_; }
  double spacing() const { return 1.0 / n_; }  // eps
  double period() const { return period_; }

  double displacement(long i) const { return disp_[wrap(i)]; }
  double& displacement(long i) { return disp_[wrap(i)]; }

  double position(long i) const {
    return spacing() * period_ * static_cast<double>(i) + disp_[wrap(i)];
  }

  /// (u_{i+m} - u_i) / eps without forming absolute positions.
  double bond_strain(long i, int m) const {
    return period_ * m + (disp_[wrap(i + m)] - disp_[wrap(i)]) * n_;
  }

  const std::vector<double>& displacements() const { return disp_; }
  std::vector<double>& displacements() { return disp_; }

 private:
  size_t wrap(long i) const {
    long r = i % n_;
    if (r < 0) r += n_;
    return static_cast<size_t>(r);
  }

  int n_;
  double period_;
  std::vector<double> disp_;
};

/// One mesh element: the atoms between two consecutive nodal atoms.
/// end_atom is an extended index (start_atom < end_atom); for the element
/// that wraps the period end it equals first node + N.
struct Element {
  int start_node = 0;  // index into the nodal array
  int end_node = 0;
  long start_atom = 0;
  long end_atom = 0;
  int length = 0;               // h = end_atom - start_atom >= 1
  bool nonlocal = false;        // both endpoints in the nonlocal range
  int interface_endpoints = 0;  // endpoints equal to a nonlocal boundary atom
};

/// Nodal atoms plus the local/nonlocal partition.  The nonlocal range
/// [A, B] is a contiguous block of atoms, all of them nodal; the remaining
/// nodal atoms subdivide the local region.  Immutable after construction.
class NodalMesh {
 public:
  NodalMesh(int n_atoms, std::vector<int> nodal_atoms, int nonlocal_first,
            int nonlocal_last, int neighbor_range)
      : n_(n_atoms),
        nodes_(std::move(nodal_atoms)),
        a_(nonlocal_first),
        b_(nonlocal_last),
        range_(neighbor_range) {
    validate();
    build_elements();
  }

  int atom_count() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  int neighbor_range() const { return range_; }

  const std::vector<int>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int node_atom(int k) const { return nodes_[k]; }

  int nonlocal_first() const { return a_; }
  int nonlocal_last() const { return b_; }
  int nonlocal_width() const { return b_ - a_ + 1; }

  bool is_nonlocal_atom(long atom) const {
    const long r = reduce(atom);
    return r >= a_ && r <= b_;
  }

  bool is_nodal_atom(long atom) const {
    const long r = reduce(atom);
    return std::binary_search(nodes_.begin(), nodes_.end(), static_cast<int>(r));
  }

  /// Nodal-array index of a nonlocal atom (they are consecutive nodes).
  int nonlocal_node_index(long atom) const {
    return node_index_of_atom_(static_cast<int>(reduce(atom)));
  }

  const std::vector<Element>& elements() const { return elements_; }

  /// Element whose atom interval [start, end) contains the given atom,
  /// together with the number of whole periods the index was shifted by.
  const Element& element_containing(long atom, long& period_shift) const {
    const long v0 = nodes_.front();
    period_shift = detail::floor_div(atom - v0, n_);
    const long j = atom - period_shift * n_;  // in [v0, v0 + N)
    // last node <= j
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), j);
    const int k = static_cast<int>(it - nodes_.begin()) - 1;
    return elements_[static_cast<size_t>(k)];
  }

  /// Interior local nodes: nodal atoms outside the nonlocal range.  Both
  /// adjacent elements of such a node are local.
  std::vector<int> interior_local_nodes() const {
    std::vector<int> out;
    for (int k = 0; k < node_count(); ++k)
      if (nodes_[k] < a_ || nodes_[k] > b_) out.push_back(k);
    return out;
  }

 private:
  int node_index_of_atom_(int atom) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), atom);
    if (it == nodes_.end() || *it != atom)
      throw std::logic_error("atom is not nodal");
    return static_cast<int>(it - nodes_.begin());
  }

  long reduce(long atom) const {
    long r = atom % n_;
    if (r < 0) r += n_;
    return r;
  }

  void validate() const {
    if (n_ < 2) throw std::invalid_argument("mesh needs at least 2 atoms");
    if (range_ < 1) throw std::invalid_argument("neighbor range must be >= 1");
    if (nodes_.empty()) throw std::invalid_argument("mesh needs nodal atoms");
    if (!std::is_sorted(nodes_.begin(), nodes_.end()))
      throw std::invalid_argument("nodal atoms must be sorted");
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
      throw std::invalid_argument("nodal atoms must be distinct");
    if (nodes_.front() < 0 || nodes_.back() >= n_)
      throw std::invalid_argument("nodal atoms must lie in [0, N)");
    if (a_ > b_ || a_ < 0 || b_ >= n_)
      throw std::invalid_argument("nonlocal range must lie within one period");
    // every nonlocal atom is nodal
    for (int atom = a_; atom <= b_; ++atom) {
      auto it = std::lower_bound(nodes_.begin(), nodes_.end(), atom);
      if (it == nodes_.end() || *it != atom)
        throw std::invalid_argument("nonlocal atoms must all be nodal");
    }
  }

  void build_elements() {
    const int k_count = node_count();
    elements_.reserve(static_cast<size_t>(k_count));
    for (int k = 0; k < k_count; ++k) {
      Element e;
      e.start_node = k;
      e.end_node = (k + 1) % k_count;
      e.start_atom = nodes_[k];
      e.end_atom = (k + 1 < k_count) ? nodes_[k + 1] : nodes_[0] + n_;
      e.length = static_cast<int>(e.end_atom - e.start_atom);
      const bool start_in = nodes_[k] >= a_ && nodes_[k] <= b_;
      const long end_reduced = reduce(e.end_atom);
      const bool end_in = end_reduced >= a_ && end_reduced <= b_;
      // nonlocal atoms are consecutive, so elements inside the nonlocal
      // block have unit length; the wrap element can share both boundary
      // atoms yet span the whole local region
      e.nonlocal = start_in && end_in && e.length == 1;
      e.interface_endpoints = (e.start_atom == a_ || e.start_atom == b_ ? 1 : 0) +
                              (end_reduced == a_ || end_reduced == b_ ? 1 : 0);
      if (e.length < 1) throw std::invalid_argument("empty mesh element");
      if (!e.nonlocal && e.interface_endpoints > 0 && e.length < range_ + 1)
        throw std::invalid_argument(
            "mesh violates interface separation h >= n+1");
      elements_.push_back(e);
    }
  }

  int n_;
  std::vector<int> nodes_;
  int a_, b_;
  int range_;
  std::vector<Element> elements_;
};

/// Builds the standard defect mesh: forces act on atoms [M, M+P-1], the
/// nonlocal range extends that block by L atoms on both sides, and
/// local_node_count extra nodal atoms are spread over the local region as
/// equidistantly as integer rounding allows (ties round down).
inline NodalMesh build_mesh(int n_atoms, int defect_center, int defect_width,
                            int pad, int local_node_count, int neighbor_range) {
  if (defect_width < 1) throw std::invalid_argument("defect width must be >= 1");
  if (pad < 0) throw std::invalid_argument("pad must be >= 0");
  if (local_node_count < 0)
    throw std::invalid_argument("local node count must be >= 0");
  const int width = defect_width + 2 * pad;
  if (n_atoms < 2 * width)
    throw std::invalid_argument(
        "nonlocal region consumes the period, no admissible local element");
  const int a = defect_center - pad;
  const int b = defect_center + defect_width - 1 + pad;
  if (a < 0 || b >= n_atoms)
    throw std::invalid_argument("nonlocal range must lie within one period");

  std::vector<int> nodes;
  nodes.reserve(static_cast<size_t>(width + local_node_count));
  for (int atom = a; atom <= b; ++atom) nodes.push_back(atom);

  const int local_span = n_atoms - width;  // atoms b+1 .. a+N-1
  for (int k = 1; k <= local_node_count; ++k) {
    const double target =
        b + static_cast<double>(k) * local_span / (local_node_count + 1);
    // round half down
    long atom = static_cast<long>(std::ceil(target - 0.5));
    if (atom <= b || atom >= a + n_atoms)
      throw std::invalid_argument("local node falls outside the local region");
    nodes.push_back(static_cast<int>(atom % n_atoms));
  }
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw std::invalid_argument(
        "local node placement collides; fewer nodes fit this region");

  return NodalMesh(n_atoms, std::move(nodes), a, b, neighbor_range);
}

/// Nodal unknowns of a reduced configuration: displacement of each nodal
/// atom from the uniform lattice eps * period * i.
struct NodalConfig {
  double period = 1.0;
  std::vector<double> node_disp;
};

/// Uniform lattice u_i = eps * z * i expressed on the mesh nodes.
inline NodalConfig uniform_config(const NodalMesh& mesh, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("strain must be positive");
  return NodalConfig{z, std::vector<double>(
                            static_cast<size_t>(mesh.node_count()), 0.0)};
}

/// Representation of one atom position through the nodal unknowns:
/// u_atom = sum_j weight_j * (u_{node_j} + period_shift_j * period).
/// At most two coefficients in 1D; they sum to one.  In displacement form
/// the shifts drop out: w_atom = sum_j weight_j * w_{node_j}.
struct Representation {
  struct Entry {
    int node = 0;
    double weight = 0.0;
    long period_shift = 0;
  };
  Entry entry[2];
  int count = 0;

  double displacement(const NodalConfig& config) const {
    double w = 0.0;
    for (int j = 0; j < count; ++j)
      w += entry[j].weight * config.node_disp[static_cast<size_t>(entry[j].node)];
    return w;
  }
};

inline Representation representation_vector(const NodalMesh& mesh, long atom) {
  Representation rep;
  long q = 0;
  const Element& e = mesh.element_containing(atom, q);
  const long j = atom - q * mesh.atom_count();
  if (j == e.start_atom) {
    rep.count = 1;
    rep.entry[0] = {e.start_node, 1.0, q};
    return rep;
  }
  const double h = static_cast<double>(e.length);
  rep.count = 2;
  rep.entry[0] = {e.start_node, (e.end_atom - j) / h, q};
  rep.entry[1] = {e.end_node, (j - e.start_atom) / h,
                  e.end_node == 0 ? q + 1 : q};
  return rep;
}

/// Fills in all non-nodal atoms by linear interpolation between the
/// enclosing nodal atoms; nodal atoms are copied verbatim.
inline PeriodicChain reconstruct(const NodalMesh& mesh,
                                 const NodalConfig& config) {
  if (static_cast<int>(config.node_disp.size()) != mesh.node_count())
    throw std::invalid_argument("configuration does not match mesh");
  PeriodicChain chain(mesh.atom_count(), config.period);
  const int n = mesh.atom_count();
  for (const Element& e : mesh.elements()) {
    const double wa = config.node_disp[static_cast<size_t>(e.start_node)];
    const double wb = config.node_disp[static_cast<size_t>(e.end_node)];
    const double h = static_cast<double>(e.length);
    for (long atom = e.start_atom; atom < e.end_atom; ++atom) {
      const double t = static_cast<double>(atom - e.start_atom);
      chain.displacement(atom % n) = wa + (wb - wa) * (t / h);
    }
  }
  return chain;
}

/// Nodal restriction of a full chain.
inline NodalConfig restriction(const NodalMesh& mesh,
                               const PeriodicChain& chain) {
  if (chain.size() != mesh.atom_count())
    throw std::invalid_argument("chain does not match mesh");
  NodalConfig config;
  config.period = chain.period();
  config.node_disp.reserve(static_cast<size_t>(mesh.node_count()));
  for (int k = 0; k < mesh.node_count(); ++k)
    config.node_disp.push_back(chain.displacement(mesh.node_atom(k)));
  return config;
}

}  // namespace qc

#endif  // QC_LATTICE_HPP
