// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "epod/fem.hpp"
#include "epod/mesh.hpp"
#include "epod/sparse.hpp"

using namespace epod;

namespace {

constexpr double kPi = std::numbers::pi;

double sin_sin(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

ScalarField nodal_interpolant(const Mesh& mesh, const ScalarFn& f) {
  ScalarField field{mesh.n, Vector(mesh.node_count())};
  for (int i = 0; i < mesh.node_count(); ++i)
    field.values[i] = f(mesh.nodes[i][0], mesh.nodes[i][1]);
  return field;
}

}  // namespace

TEST_CASE("mesh counting and geometry") {
  const Mesh mesh = build_mesh(2);
  CHECK(mesh.node_count() == 9);
  CHECK(mesh.triangles.size() == 8);
  CHECK(mesh.interior_count == 1);
  CHECK(mesh.h == 0.5);
  CHECK(mesh.triangle_area() == doctest::Approx(0.125).epsilon(1e-15));

  const Mesh fine = build_mesh(64);
  CHECK(fine.node_count() == 4225);
  CHECK(fine.interior_count == 3969);

  // Signed area of every triangle is +h^2/2 (CCW orientation).
  for (const auto& t : fine.triangles) {
    const auto& p0 = fine.nodes[t[0]];
    const auto& p1 = fine.nodes[t[1]];
    const auto& p2 = fine.nodes[t[2]];
    const double signed_area =
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
    REQUIRE(signed_area == doctest::Approx(fine.triangle_area()).epsilon(1e-12));
  }

  // Boundary flags exactly on x or y in {0, 1}.
  for (int i = 0; i < fine.node_count(); ++i) {
    const double x = fine.nodes[i][0];
    const double y = fine.nodes[i][1];
    const bool expect = x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0;
    REQUIRE(fine.boundary_mask[i] == expect);
  }

  CHECK_THROWS_AS(build_mesh(1), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(0), std::invalid_argument);
}

TEST_CASE("local element matrices on a leg-h right triangle") {
  const double h = 0.25;
  const std::array<double, 2> p0{0.0, 0.0}, p1{h, 0.0}, p2{0.0, h};

  const Eigen::Matrix3d ke = local_stiffness(p0, p1, p2, 1.0);
  Eigen::Matrix3d expect;
  expect << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  expect *= 0.5;
  CHECK((ke - expect).cwiseAbs().maxCoeff() < 1e-14);

  // Row sums vanish: constants lie in the kernel.
  for (int i = 0; i < 3; ++i) CHECK(std::abs(ke.row(i).sum()) < 1e-14);

  // Exact linearity in the coefficient value.
  const Eigen::Matrix3d scaled = local_stiffness(p0, p1, p2, 3.7);
  CHECK((scaled - 3.7 * ke).cwiseAbs().maxCoeff() < 1e-13);

  const Eigen::Matrix3d me = local_mass(p0, p1, p2);
  const double area = 0.5 * h * h;
  Eigen::Matrix3d mexpect;
  mexpect << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  mexpect *= area / 12.0;
  CHECK((me - mexpect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(me.sum() == doctest::Approx(area).epsilon(1e-14));
}

TEST_CASE("global assembly identities") {
  const Mesh mesh = build_mesh(8);
  const auto one = [](double, double) { return 1.0; };
  const SparseSymMatrix a = assemble_stiffness(mesh, one);
  CHECK(a.symmetry_defect() < 1e-14);

  // Interior row sums vanish before elimination.
  const Vector row_sums = a.apply(Vector::Ones(mesh.node_count()));
  for (int i = 0; i < mesh.node_count(); ++i)
    if (!mesh.boundary_mask[i]) REQUIRE(std::abs(row_sums[i]) < 1e-13);

  // a = c scales exactly.
  const SparseSymMatrix ac = assemble_stiffness(mesh, [](double, double) { return 2.5; });
  Vector probe(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) probe[i] = std::sin(0.3 * i);
  CHECK((ac.apply(probe) - 2.5 * a.apply(probe)).cwiseAbs().maxCoeff() < 1e-12);

  // Linearity: A(f) + A(g) = A(f + g).
  const auto f = [](double x, double y) { return 1.0 + x + y; };
  const auto g = [](double x, double y) { return 2.0 + std::sin(x * y); };
  const auto fg = [&](double x, double y) { return f(x, y) + g(x, y); };
  const Vector lhs = assemble_stiffness(mesh, f).apply(probe) + assemble_stiffness(mesh, g).apply(probe);
  const Vector rhs = assemble_stiffness(mesh, fg).apply(probe);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());

  // Non-positive coefficient at a centroid is a contrast violation.
  CHECK_THROWS_AS(assemble_stiffness(mesh, [](double x, double) { return x - 0.5; }),
                  std::domain_error);
}

TEST_CASE("mass matrix and masked inner product") {
  const Mesh mesh = build_mesh(2);
  const SparseSymMatrix m = assemble_mass(mesh);
  // Total mass is |D| = 1.
  CHECK(Vector::Ones(9).dot(m.apply(Vector::Ones(9))) == doctest::Approx(1.0).epsilon(1e-14));
  // Center node (degree-6) diagonal: 6 * 2 * area / 12 = h^2 / 2.
  CHECK(m.coeff(4, 4) == doctest::Approx(0.125).epsilon(1e-14));

  const Mesh fine = build_mesh(64);
  const SubdomainMask mask = resolve_mask(fine, local_region());
  CHECK(mask.size() == 33 * 17);
  const SparseSymMatrix mm = assemble_mass(fine, mask);
  const Vector ones = Vector::Ones(mask.size());
  // <1,1> over D1 = |D1| exactly (the mask rectangle is grid aligned).
  CHECK(ones.dot(mm.apply(ones)) == doctest::Approx(local_region().area()).epsilon(1e-12));

  // Full-domain mask reproduces the global mass matrix.
  const SubdomainMask all = resolve_mask(fine, full_domain());
  const SparseSymMatrix m_all = assemble_mass(fine, all);
  Vector probe(fine.node_count());
  for (int i = 0; i < fine.node_count(); ++i) probe[i] = std::cos(0.1 * i);
  CHECK((m_all.apply(probe) - assemble_mass(fine).apply(probe)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("load vector quadrature") {
  const Mesh mesh = build_mesh(32);
  CHECK(assemble_load(mesh, [](double, double) { return 0.0; }).cwiseAbs().maxCoeff() == 0.0);
  CHECK(assemble_load(mesh, [](double, double) { return 1.0; }).sum() ==
        doctest::Approx(1.0).epsilon(1e-13));
  const Rect d2 = source_region();
  const Vector b = assemble_load(mesh, [&](double x, double y) {
    return d2.contains(x, y) ? 1.0 : 0.0;
  });
  CHECK(b.sum() == doctest::Approx(d2.area()).epsilon(2.0 / 32));
}

TEST_CASE("dirichlet elimination and zero loads") {
  const Mesh mesh = build_mesh(8);
  const SparseSymMatrix a =
      eliminate_dirichlet(mesh, assemble_stiffness(mesh, [](double, double) { return 1.0; }));
  CHECK(a.dim() == mesh.interior_count);

  const ScalarField u = solve_dirichlet(mesh, a, Vector::Zero(mesh.node_count()));
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);

  // restrict/extend round trip.
  Vector interior(mesh.interior_count);
  for (int i = 0; i < mesh.interior_count; ++i) interior[i] = i + 1.0;
  const ScalarField full = extend_with_zeros(mesh, interior);
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.boundary_mask[i]) REQUIRE(full.values[i] == 0.0);
  CHECK((restrict_interior(mesh, full.values) - interior).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("manufactured poisson solution converges at order two") {
  const auto f = [](double x, double y) { return 2.0 * kPi * kPi * sin_sin(x, y); };
  const auto one = [](double, double) { return 1.0; };

  double previous = 0.0;
  for (const int n : {16, 32}) {
    const Mesh mesh = build_mesh(n);
    const ScalarField u = solve_realization(mesh, one, f);
    const SubdomainMask all = resolve_mask(mesh, full_domain());
    ScalarField err = u;
    for (int i = 0; i < mesh.node_count(); ++i)
      err.values[i] -= sin_sin(mesh.nodes[i][0], mesh.nodes[i][1]);
    const double e = norm_l2(mesh, err, all);
    if (previous > 0.0) {
      const double ratio = previous / e;
      CHECK(ratio > 3.2);
      CHECK(ratio < 4.8);
    }
    CHECK(e < 0.02 / (n * n / 256.0));
    previous = e;
  }
}

TEST_CASE("norms against analytic values") {
  const Mesh mesh = build_mesh(64);
  const SubdomainMask all = resolve_mask(mesh, full_domain());

  const ScalarField ones{mesh.n, Vector::Ones(mesh.node_count())};
  CHECK(norm_l2(mesh, ones, all) == doctest::Approx(1.0).epsilon(1e-13));

  const ScalarField ss = nodal_interpolant(mesh, sin_sin);
  CHECK(norm_l2(mesh, ss, all) == doctest::Approx(0.5).epsilon(2e-3));

  const ScalarField linear = nodal_interpolant(mesh, [](double x, double) { return x; });
  CHECK(seminorm_h1(mesh, linear, all) == doctest::Approx(1.0).epsilon(1e-10));

  // Masked seminorm of the same field is scaled by sqrt(|D1|).
  const SubdomainMask mask = resolve_mask(mesh, local_region());
  CHECK(seminorm_h1(mesh, linear, mask) ==
        doctest::Approx(std::sqrt(local_region().area())).epsilon(1e-10));
}

TEST_CASE("pcg energy monotonicity and convergence report") {
  const Mesh mesh = build_mesh(12);
  const SparseSymMatrix a =
      eliminate_dirichlet(mesh, assemble_stiffness(mesh, [](double x, double y) {
        return 1.0 + 0.5 * std::sin(3.0 * x) * std::cos(2.0 * y);
      }));
  Vector b(a.dim());
  for (int i = 0; i < a.dim(); ++i) b[i] = std::sin(1.0 + i);

  // Direct reference solution for the energy-norm error.
  Matrix dense = Matrix::Zero(a.dim(), a.dim());
  for (int j = 0; j < a.dim(); ++j) {
    Vector e = Vector::Zero(a.dim());
    e[j] = 1.0;
    dense.col(j) = a.apply(e);
  }
  const Vector exact = dense.llt().solve(b);

  std::vector<double> energy_errors;
  const PcgResult result = pcg_solve(a, b, 1e-12, -1, [&](int, const Vector& x) {
    const Vector e = exact - x;
    energy_errors.push_back(e.dot(a.apply(e)));
  });
  REQUIRE(result.converged);
  CHECK(result.relative_residual <= 1e-12);
  REQUIRE(energy_errors.size() >= 4);
  for (std::size_t i = 1; i < energy_errors.size(); ++i)
    REQUIRE(energy_errors[i] <= energy_errors[i - 1] * (1.0 + 1e-12));

  // Solution matches the dense reference.
  CHECK((result.x - exact).cwiseAbs().maxCoeff() < 1e-9 * exact.cwiseAbs().maxCoeff());

  // Non-convergence is reported, not silently returned.
  CHECK_THROWS_AS(solve_dirichlet(mesh, a, Vector::Ones(mesh.node_count()), 1e-30),
                  std::runtime_error);
}

TEST_CASE("field files round trip") {
  const Mesh mesh = build_mesh(5);
  ScalarField field{mesh.n, Vector(mesh.node_count())};
  for (int i = 0; i < mesh.node_count(); ++i) field.values[i] = std::sin(i * 0.7) * 1e-3;

  const std::string path = "test_field.epf";
  save_field(field, path);
  const ScalarField back = load_field(path);
  CHECK(back.n == field.n);
  CHECK((back.values - field.values).cwiseAbs().maxCoeff() == 0.0);

  // Corrupted magic is rejected.
  {
    std::ofstream os(path, std::ios::binary);
    os << "JUNKJUNKJUNK";
  }
  CHECK_THROWS_AS(load_field(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("mask resolution") {
  const Mesh mesh = build_mesh(16);
  CHECK_THROWS_AS(resolve_mask(mesh, Rect{0.26, 0.27, 0.26, 0.27}), std::invalid_argument);
  const SubdomainMask mask = resolve_mask(mesh, Rect{0.25, 0.5, 0.25, 0.5});
  CHECK(mask.size() == 25);
  for (int id : mask.nodes) {
    CHECK(mask.rect.contains(mesh.nodes[id][0], mesh.nodes[id][1]));
    CHECK(mask.local_of_node[id] >= 0);
  }
}
