// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "epod/snapshots.hpp"

using namespace epod;

namespace {

const Mesh& mesh8() {
  static const Mesh mesh = build_mesh(8);
  return mesh;
}

SnapshotSet small_set(int count = 4, std::uint64_t seed = 21) {
  const CoeffFamily fam = make_coeff_family(Family::ex2);
  const ForceFamily force = make_force_family(Force::trig_indicator_ex2);
  return generate_snapshots(mesh8(), fam, force, seed, count);
}

}  // namespace

TEST_CASE("generation produces converged dirichlet solves") {
  const SnapshotSet set = small_set();
  CHECK(set.n == 8);
  CHECK(set.count() == 4);
  CHECK(set.fields.rows() == 81);
  CHECK(set.is_full());

  // Columns vanish on the boundary.
  for (int c = 0; c < set.count(); ++c)
    for (int i = 0; i < mesh8().node_count(); ++i)
      if (mesh8().boundary_mask[i]) REQUIRE(set.fields(i, c) == 0.0);

  // Deterministic given the seed.
  const SnapshotSet again = small_set();
  CHECK((again.fields - set.fields).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < set.count(); ++i)
    CHECK((again.params[i].xi - set.params[i].xi).cwiseAbs().maxCoeff() == 0.0);

  const SnapshotSet other = small_set(4, 22);
  CHECK((other.fields - set.fields).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("degenerate parameter range gives identical columns") {
  CoeffFamily fam = make_coeff_family(Family::ex2);
  fam.xi_lo = fam.xi_hi = 0.0;
  const ForceFamily force = make_force_family(Force::trig_indicator_ex2);
  const SnapshotSet set = generate_snapshots(mesh8(), fam, force, 5, 3);
  for (int c = 1; c < 3; ++c)
    CHECK((set.fields.col(c) - set.fields.col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(set.fields.col(0).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("solver failures carry the snapshot index") {
  const CoeffFamily fam = make_coeff_family(Family::ex2);
  const ForceFamily force = make_force_family(Force::trig_indicator_ex2);
  try {
    generate_snapshots(mesh8(), fam, force, 1, 1, 1e-30);
    FAIL("expected non-convergence");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("snapshot 0") != std::string::npos);
  }
}

TEST_CASE("restriction") {
  const SnapshotSet set = small_set();

  const SnapshotSet same = restrict_snapshots(set, mesh8(), full_domain());
  CHECK(same.nodes == set.nodes);
  CHECK((same.fields - set.fields).cwiseAbs().maxCoeff() == 0.0);

  const Rect outer{0.25, 1.0, 0.25, 1.0};
  const Rect inner{0.5, 0.75, 0.5, 0.75};
  const SnapshotSet a = restrict_snapshots(set, mesh8(), outer);
  CHECK(a.fields.rows() == resolve_mask(mesh8(), outer).size());
  CHECK(a.mask_rect == outer);

  // Nested restriction composes.
  const SnapshotSet ab = restrict_snapshots(a, mesh8(), inner);
  const SnapshotSet direct = restrict_snapshots(set, mesh8(), inner);
  CHECK(ab.nodes == direct.nodes);
  CHECK((ab.fields - direct.fields).cwiseAbs().maxCoeff() == 0.0);

  // A mask outside the current rows is rejected.
  CHECK_THROWS_AS(restrict_snapshots(a, mesh8(), Rect{0.0, 0.2, 0.0, 0.2}),
                  std::invalid_argument);
  // Empty masks are rejected at resolution.
  CHECK_THROWS_AS(restrict_snapshots(set, mesh8(), Rect{0.01, 0.02, 0.01, 0.02}),
                  std::invalid_argument);
}

TEST_CASE("snapshot files round trip bit-exact") {
  const SnapshotSet set = small_set(3, 9);
  const std::string path = "test_set.pods";
  save_snapshots(path, set);

  // Payload arithmetic: header 36 bytes, then params and fields.
  const auto size = std::filesystem::file_size(path);
  const std::uintmax_t expect =
      36 + 8ull * 3 * 8 + 8ull * 81 * 3;  // params 3 x (r=8), fields 81 x 3
  CHECK(size == expect);

  const SnapshotSet back = load_snapshots(path);
  CHECK(back.n == set.n);
  CHECK(back.count() == set.count());
  CHECK((back.fields - set.fields).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < set.count(); ++i) {
    CHECK((back.params[i].xi - set.params[i].xi).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.params[i].theta.size() == 0);
  }

  // Only full-domain sets are serialized.
  const SnapshotSet local = restrict_snapshots(set, mesh8(), Rect{0.25, 0.75, 0.25, 0.75});
  CHECK_THROWS_AS(save_snapshots(path, local), std::invalid_argument);

  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE";
  }
  CHECK_THROWS_AS(load_snapshots(path), std::runtime_error);
  std::remove(path.c_str());
}
