#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "qc/lattice.hpp"

using qc::build_mesh;
using qc::NodalConfig;
using qc::NodalMesh;
using qc::PeriodicChain;

TEST_CASE("periodic chain indexing") {
  PeriodicChain chain(10);
  chain.displacement(3) = 1e-3;
  CHECK(chain.spacing() == 0.1);
  CHECK(chain.position(3) == Catch::Approx(0.3 + 1e-3));
  CHECK(chain.position(13) == Catch::Approx(chain.position(3) + 1.0));
  CHECK(chain.position(-7) == Catch::Approx(chain.position(3) - 1.0));
  CHECK(chain.bond_strain(2, 1) == Catch::Approx(1.0 + 1e-3 * 10));
  CHECK(chain.bond_strain(9, 1) == Catch::Approx(1.0));  // wraps to atom 0
}

TEST_CASE("defect mesh construction") {
  SECTION("no local nodes") {
    const NodalMesh mesh = build_mesh(100, 50, 2, 3, 0, 3);
    REQUIRE(mesh.node_count() == 8);
    CHECK(mesh.nonlocal_first() == 47);
    CHECK(mesh.nonlocal_last() == 54);
    for (int k = 0; k < 8; ++k) CHECK(mesh.node_atom(k) == 47 + k);
    // seven unit elements inside the nonlocal block plus the wrap element
    const auto& elements = mesh.elements();
    REQUIRE(elements.size() == 8);
    int wrap_count = 0;
    for (const auto& e : elements) {
      if (e.length > 1) {
        ++wrap_count;
        CHECK(e.length == 93);
        CHECK_FALSE(e.nonlocal);
        CHECK(e.interface_endpoints == 2);
      } else {
        CHECK(e.nonlocal);
      }
    }
    CHECK(wrap_count == 1);
  }

  SECTION("three equidistant local nodes") {
    const NodalMesh mesh = build_mesh(100, 50, 2, 3, 3, 3);
    REQUIRE(mesh.node_count() == 11);
    // targets 54 + k*92/4 for k = 1..3: atoms 77, 0, 23
    CHECK(mesh.is_nodal_atom(77));
    CHECK(mesh.is_nodal_atom(0));
    CHECK(mesh.is_nodal_atom(23));
    int local_total = 0;
    int local_elements = 0;
    for (const auto& e : mesh.elements())
      if (!e.nonlocal) {
        ++local_elements;
        local_total += e.length;
      }
    CHECK(local_elements == 4);
    CHECK(local_total == 93);
    CHECK(mesh.interior_local_nodes().size() == 3);
  }

  SECTION("nonlocal region consuming the period is rejected") {
    CHECK_THROWS_AS(build_mesh(20, 10, 2, 8, 0, 3), std::invalid_argument);
  }

  SECTION("too-thin interface elements are rejected") {
    CHECK_THROWS_WITH(build_mesh(30, 14, 2, 3, 10, 3),
                      Catch::Matchers::ContainsSubstring("interface separation"));
  }
}

TEST_CASE("reconstruction is linear interpolation") {
  // nodes 0, 4, 8 on a 12-atom chain
  const NodalMesh mesh(12, {0, 4, 8}, 0, 0, 1);

  SECTION("interior values of one element") {
    NodalConfig config;
    config.period = 1.0;
    const double eps = 1.0 / 12;
    // positions 0.0, 0.4, 0.8 at the nodes
    config.node_disp = {0.0, 0.4 - 4 * eps, 0.8 - 8 * eps};
    const PeriodicChain chain = qc::reconstruct(mesh, config);
    CHECK(chain.position(1) == Catch::Approx(0.1).margin(1e-15));
    CHECK(chain.position(2) == Catch::Approx(0.2).margin(1e-15));
    CHECK(chain.position(3) == Catch::Approx(0.3).margin(1e-15));
    CHECK(chain.position(0) == 0.0);
    CHECK(chain.position(4) == Catch::Approx(0.4));
  }

  SECTION("uniform configurations reconstruct exactly") {
    for (double z : {1.0, 1.02, 0.97}) {
      const NodalConfig config = qc::uniform_config(mesh, z);
      const PeriodicChain chain = qc::reconstruct(mesh, config);
      for (int i = -12; i <= 24; ++i)
        CHECK(chain.position(i) ==
              Catch::Approx(z * i / 12.0).margin(1e-15));
    }
  }

  SECTION("gaps are constant within every element") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    NodalConfig config = qc::uniform_config(mesh, 1.0);
    for (double& w : config.node_disp) w = dist(rng) / 12.0;
    const PeriodicChain chain = qc::reconstruct(mesh, config);
    for (const auto& e : mesh.elements())
      for (long atom = e.start_atom; atom + 1 < e.end_atom; ++atom)
        CHECK(chain.bond_strain(atom, 1) ==
              Catch::Approx(chain.bond_strain(e.start_atom, 1)).margin(1e-14));
  }
}

TEST_CASE("representation vectors") {
  const NodalMesh mesh(12, {0, 4, 8}, 0, 0, 1);

  SECTION("nodal atom is a unit vector") {
    const auto rep = qc::representation_vector(mesh, 4);
    REQUIRE(rep.count == 1);
    CHECK(rep.entry[0].node == 1);
    CHECK(rep.entry[0].weight == 1.0);
    CHECK(rep.entry[0].period_shift == 0);
  }

  SECTION("interior atom weights") {
    const auto rep = qc::representation_vector(mesh, 1);
    REQUIRE(rep.count == 2);
    CHECK(rep.entry[0].node == 0);
    CHECK(rep.entry[0].weight == 0.75);
    CHECK(rep.entry[1].node == 1);
    CHECK(rep.entry[1].weight == 0.25);
  }

  SECTION("atom beyond the last node wraps with a period shift") {
    const auto rep = qc::representation_vector(mesh, 10);
    REQUIRE(rep.count == 2);
    CHECK(rep.entry[0].node == 2);
    CHECK(rep.entry[0].weight == 0.5);
    CHECK(rep.entry[1].node == 0);
    CHECK(rep.entry[1].weight == 0.5);
    CHECK(rep.entry[1].period_shift == 1);
  }

  SECTION("weights sum to one for arbitrary indices") {
    for (long atom = -30; atom <= 30; ++atom) {
      const auto rep = qc::representation_vector(mesh, atom);
      double sum = 0.0;
      for (int j = 0; j < rep.count; ++j) sum += rep.entry[j].weight;
      CHECK(sum == Catch::Approx(1.0).margin(1e-15));
    }
  }

  SECTION("representation agrees with reconstruction atom by atom") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    const NodalMesh big = build_mesh(80, 39, 2, 3, 4, 3);
    NodalConfig config = qc::uniform_config(big, 1.0);
    for (double& w : config.node_disp) w = dist(rng) / 80.0;
    const PeriodicChain chain = qc::reconstruct(big, config);
    for (long atom = -80; atom < 160; ++atom) {
      const auto rep = qc::representation_vector(big, atom);
      double u = 0.0;
      for (int j = 0; j < rep.count; ++j) {
        const int node_atom = big.node_atom(rep.entry[j].node);
        const double node_pos =
            config.period * node_atom / 80.0 +
            config.node_disp[static_cast<size_t>(rep.entry[j].node)];
        u += rep.entry[j].weight *
             (node_pos + rep.entry[j].period_shift * config.period);
      }
      CHECK(u == Catch::Approx(chain.position(atom)).margin(1e-14));
    }
  }
}

TEST_CASE("restriction inverts reconstruction on admissible chains") {
  const NodalMesh mesh = build_mesh(60, 29, 2, 2, 3, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  NodalConfig config = qc::uniform_config(mesh, 1.0);
  for (double& w : config.node_disp) w = dist(rng) / 60.0;

  const PeriodicChain chain = qc::reconstruct(mesh, config);
  const NodalConfig back = qc::restriction(mesh, chain);
  REQUIRE(back.node_disp.size() == config.node_disp.size());
  for (size_t k = 0; k < back.node_disp.size(); ++k)
    CHECK(back.node_disp[k] == config.node_disp[k]);

  // and the round trip chain is identical
  const PeriodicChain again = qc::reconstruct(mesh, back);
  for (int i = 0; i < 60; ++i)
    CHECK(again.displacement(i) == chain.displacement(i));
}

TEST_CASE("uniform configuration preconditions") {
  const NodalMesh mesh = build_mesh(60, 29, 2, 2, 0, 2);
  CHECK_THROWS_AS(qc::uniform_config(mesh, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(qc::uniform_config(mesh, -1.0), std::invalid_argument);
  const NodalConfig config = qc::uniform_config(mesh, 1.0);
  CHECK(config.period == 1.0);
  for (double w : config.node_disp) CHECK(w == 0.0);
}
