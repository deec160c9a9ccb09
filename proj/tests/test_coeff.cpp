// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "epod/coeff.hpp"
#include "epod/rng.hpp"

using namespace epod;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ParamVector zeros(const CoeffFamily& fam) {
  ParamVector pv;
  pv.xi = Vector::Zero(fam.r);
  return pv;
}

const std::vector<Family> kAllFamilies = {Family::ex1, Family::ex2, Family::interface_bands,
                                          Family::ex3, Family::ex4};

}  // namespace

TEST_CASE("family constants") {
  const CoeffFamily ex1 = make_coeff_family(Family::ex1);
  CHECK(ex1.r == 5);
  CHECK(ex1.xi_lo == 0.0);
  CHECK(ex1.xi_hi == 1.0);
  CHECK(ex1.eps == std::vector<double>{1.0 / 47, 1.0 / 29, 1.0 / 53, 1.0 / 37, 1.0 / 41});
  CHECK(ex1.p == std::vector<double>{1.98, 1.96, 1.94, 1.92, 1.9});

  const CoeffFamily ex2 = make_coeff_family(Family::ex2);
  CHECK(ex2.r == 8);
  CHECK(ex2.xi_lo == -0.5);
  CHECK(ex2.eps[3] == 1.0 / 29);

  const CoeffFamily iface = make_coeff_family(Family::interface_bands, 64);
  CHECK(iface.r == 12);
  CHECK(iface.xi_hi == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(iface.eps[0] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(iface.eps[5] == doctest::Approx(0.07).epsilon(1e-15));
  CHECK(iface.eps[6] == doctest::Approx(0.20).epsilon(1e-15));
  CHECK(iface.eps[11] == doctest::Approx(0.25).epsilon(1e-15));
  REQUIRE(iface.interface_rects.size() == 3);
  CHECK(iface.interface_width == doctest::Approx(10.0 / 64.0).epsilon(1e-15));
  CHECK(iface.interface_rects[0].x0 == 0.3);
  CHECK(iface.interface_rects[0].x1 == doctest::Approx(0.3 + 10.0 / 64.0).epsilon(1e-15));
  CHECK(iface.interface_rects[0].y0 == 0.1);
  CHECK(iface.interface_rects[0].y1 == 0.9);
  CHECK(iface.interface_rects[2].x0 == 0.7);
  CHECK_THROWS_AS(make_coeff_family(Family::interface_bands), std::invalid_argument);

  const CoeffFamily ex3 = make_coeff_family(Family::ex3);
  CHECK(ex3.r == 18);
  CHECK(ex3.eps[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(ex3.eps[17] == doctest::Approx(1.0 / 45.0).epsilon(1e-15));

  const CoeffFamily ex4 = make_coeff_family(Family::ex4);
  CHECK(ex4.r == 24);
  CHECK(ex4.xi_hi == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(ex4.eps[23] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("string ids round trip") {
  for (Family f : kAllFamilies) CHECK(family_from_string(to_string(f)) == f);
  for (Force f : {Force::trig_indicator_ex1, Force::trig_indicator_ex2, Force::gaussian_center,
                  Force::random_trig})
    CHECK(force_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(family_from_string("ex9"), std::invalid_argument);
  CHECK_THROWS_AS(force_from_string(""), std::invalid_argument);
}

TEST_CASE("zero parameters give the family's base value") {
  for (Family id : kAllFamilies) {
    const CoeffFamily fam = make_coeff_family(id, 64);
    const ParamVector pv = zeros(fam);
    const double expect = id == Family::ex1 ? 0.1 : 1.0;
    for (double x : {0.05, 0.31, 0.77})
      for (double y : {0.13, 0.5, 0.93})
        REQUIRE(eval_coeff(fam, pv, x, y) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("ex1 with a single active variable matches the written term") {
  const CoeffFamily fam = make_coeff_family(Family::ex1);
  ParamVector pv = zeros(fam);
  pv.xi[0] = 1.0;
  const double e1 = 1.0 / 47.0;
  const double p1 = 1.98;
  for (double x : {0.11, 0.5, 0.83}) {
    for (double y : {0.07, 0.62}) {
      const double term = (2.0 + p1 * std::sin(kTwoPi * x / e1)) /
                          (2.0 - p1 * std::cos(kTwoPi * y / e1));
      REQUIRE(eval_coeff(fam, pv, x, y) == doctest::Approx(0.1 + term).epsilon(1e-14));
    }
  }
}

TEST_CASE("analytic contrast bounds match the reported magnitudes") {
  // Per-term interval analysis; reported contrasts are approximate, so
  // assert within a factor of 2.
  const auto kappa = [](Family id) {
    const auto [lo, hi] = contrast_bounds(make_coeff_family(id, 64));
    REQUIRE(lo > 0.0);
    return hi / lo;
  };
  CHECK(kappa(Family::ex1) > 4.5e3 / 2);
  CHECK(kappa(Family::ex1) < 4.5e3 * 2);
  CHECK(kappa(Family::ex2) > 3.0e3 / 2);
  CHECK(kappa(Family::ex2) < 3.0e3 * 2);
  CHECK(kappa(Family::interface_bands) > std::exp(8.0) / 2);
  CHECK(kappa(Family::interface_bands) < std::exp(8.0) * 2);
  CHECK(kappa(Family::ex3) == doctest::Approx(std::exp(7.2)).epsilon(1e-12));
  CHECK(kappa(Family::ex4) == doctest::Approx(std::exp(8.0)).epsilon(1e-12));
}

TEST_CASE("sampled coefficients stay inside the analytic bounds") {
  for (Family id : kAllFamilies) {
    const CoeffFamily fam = make_coeff_family(id, 64);
    const ForceFamily force = make_force_family(default_force(id));
    const auto [lo, hi] = contrast_bounds(fam);
    const auto params = sample_params(fam, force, 7, 100);
    CounterRng rng(99, 0);
    int checked = 0;
    for (const auto& pv : params) {
      for (int k = 0; k < 1000; ++k) {
        const double x = rng.next_double();
        const double y = rng.next_double();
        const double a = eval_coeff(fam, pv, x, y);
        REQUIRE(a > 0.0);
        REQUIRE(a >= lo);
        REQUIRE(a <= hi);
        ++checked;
      }
    }
    CHECK(checked == 100000);
  }
}

TEST_CASE("sampling is reproducible and respects ranges") {
  const CoeffFamily fam = make_coeff_family(Family::ex2);
  const ForceFamily force = make_force_family(Force::trig_indicator_ex2);

  const auto a = sample_params(fam, force, 42, 16);
  const auto b = sample_params(fam, force, 42, 16);
  REQUIRE(a.size() == 16);
  for (std::size_t i = 0; i < a.size(); ++i)
    REQUIRE((a[i].xi - b[i].xi).cwiseAbs().maxCoeff() == 0.0);

  // Prefixes agree: draw i depends only on (seed, i).
  const auto longer = sample_params(fam, force, 42, 64);
  for (int i = 0; i < 16; ++i)
    REQUIRE((longer[i].xi - a[i].xi).cwiseAbs().maxCoeff() == 0.0);

  // Different seeds decorrelate.
  const auto other = sample_params(fam, force, 43, 16);
  CHECK((other[0].xi - a[0].xi).cwiseAbs().maxCoeff() > 0.0);

  // Order statistics of 10^4 uniform draws per dimension.
  const auto big = sample_params(fam, force, 3, 10000);
  for (int d = 0; d < fam.r; ++d) {
    double lo = 1.0, hi = -1.0;
    for (const auto& pv : big) {
      lo = std::min(lo, pv.xi[d]);
      hi = std::max(hi, pv.xi[d]);
    }
    REQUIRE(lo >= -0.5);
    REQUIRE(lo <= -0.45);
    REQUIRE(hi <= 0.5);
    REQUIRE(hi >= 0.45);
  }
}

TEST_CASE("affine split of ex1 is exact; others refuse") {
  const CoeffFamily fam = make_coeff_family(Family::ex1);
  const auto terms = affine_terms(fam);
  REQUIRE(terms.size() == 6);
  CHECK(is_affine(Family::ex1));
  CHECK(!is_affine(Family::ex2));

  const ForceFamily force = make_force_family(Force::trig_indicator_ex1);
  const auto params = sample_params(fam, force, 11, 10);
  CounterRng rng(5, 0);
  for (const auto& pv : params) {
    for (int k = 0; k < 100; ++k) {
      const double x = rng.next_double();
      const double y = rng.next_double();
      double sum = 0.0;
      for (const auto& term : terms) sum += term.weight(pv.xi) * term.field(x, y);
      const double direct = eval_coeff(fam, pv, x, y);
      REQUIRE(sum == doctest::Approx(direct).epsilon(1e-14));
    }
  }

  // Weight selectors are the identity on xi, constant term first.
  Vector e3 = Vector::Zero(5);
  e3[2] = 1.0;
  CHECK(terms[0].weight(e3) == 1.0);
  CHECK(terms[3].weight(e3) == 1.0);
  CHECK(terms[1].weight(e3) == 0.0);

  CHECK_THROWS_AS(affine_terms(make_coeff_family(Family::ex2)), std::invalid_argument);
  CHECK_THROWS_AS(affine_terms(make_coeff_family(Family::ex3)), std::invalid_argument);
}

TEST_CASE("interface family switches branches across the bands") {
  const int n = 64;
  const CoeffFamily fam = make_coeff_family(Family::interface_bands, n);
  ParamVector pv = zeros(fam);

  // Only the matrix-branch variables outside the bands.
  pv.xi[0] = 0.5;
  const double x_in = 0.31;   // inside the first band [0.3, 0.45625]
  const double x_out = 0.05;  // outside all bands
  const double y = 0.5;
  CHECK(eval_coeff(fam, pv, x_in, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_coeff(fam, pv, x_out, y) != doctest::Approx(1.0).epsilon(1e-6));

  // Only the band variables inside the bands.
  ParamVector pb = zeros(fam);
  pb.xi[6] = 0.5;
  CHECK(eval_coeff(fam, pb, x_out, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_coeff(fam, pb, x_in, y) != doctest::Approx(1.0).epsilon(1e-6));

  // Band membership respects the 10h width and [0.1, 0.9] height.
  CHECK(eval_coeff(fam, pb, x_in, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("force families") {
  const Rect d2 = source_region();
  ParamVector none;

  const ForceFamily f1 = make_force_family(Force::trig_indicator_ex1);
  CHECK(f1.param_count == 0);
  CHECK(eval_force(f1, none, 0.0, 0.0) == 0.0);
  CHECK(eval_force(f1, none, 0.5, 0.125) ==
        doctest::Approx(std::sin(kTwoPi * 0.5) * std::cos(kTwoPi * 0.125)).epsilon(1e-15));

  const ForceFamily f2 = make_force_family(Force::trig_indicator_ex2);
  CHECK(eval_force(f2, none, 0.3, 0.2) ==
        doctest::Approx(std::cos(kTwoPi * 0.3) * std::sin(kTwoPi * 0.2)).epsilon(1e-15));
  CHECK(eval_force(f2, none, 0.3, 0.9) == 0.0);

  const ForceFamily fg = make_force_family(Force::gaussian_center);
  CHECK(fg.param_count == 2);
  CHECK(fg.sigma == 0.01);
  ParamVector gp;
  gp.theta = Vector(2);
  gp.theta << 0.4, 0.2;
  CHECK(eval_force(fg, gp, 0.4, 0.2) ==
        doctest::Approx(1.0 / (kTwoPi * 0.0001)).epsilon(1e-13));
  CHECK(eval_force(fg, gp, 0.41, 0.2) ==
        doctest::Approx(std::exp(-0.5) / (kTwoPi * 0.0001)).epsilon(1e-12));
  const auto granges = force_param_ranges(fg);
  REQUIRE(granges.size() == 2);
  CHECK(granges[0].first == d2.x0);
  CHECK(granges[0].second == d2.x1);
  CHECK(granges[1].first == d2.y0);
  CHECK(granges[1].second == d2.y1);

  const ForceFamily fr = make_force_family(Force::random_trig);
  CHECK(fr.param_count == 4);
  const auto rranges = force_param_ranges(fr);
  REQUIRE(rranges.size() == 4);
  for (const auto& [lo, hi] : rranges) {
    CHECK(lo == 0.0);
    CHECK(hi == 2.0);
  }

  CHECK(default_force(Family::ex1) == Force::trig_indicator_ex1);
  CHECK(default_force(Family::ex2) == Force::trig_indicator_ex2);
  CHECK(default_force(Family::ex3) == Force::gaussian_center);
  CHECK(default_force(Family::ex4) == Force::random_trig);
}

TEST_CASE("random_trig integral matches a brute-force quadrature") {
  const ForceFamily fr = make_force_family(Force::random_trig);
  ParamVector pv;
  pv.theta = Vector(4);
  pv.theta << 1.37, 0.25, 0.81, 1.9;
  const Rect d2 = source_region();

  // Closed form: the integrand separates in x and y over D2.
  const double t1 = pv.theta[0], t2 = pv.theta[1], t3 = pv.theta[2], t4 = pv.theta[3];
  const double pi = std::numbers::pi;
  const double ix = (std::cos(pi * (t1 * d2.x0 + 2 * t2)) - std::cos(pi * (t1 * d2.x1 + 2 * t2))) /
                    (pi * t1);
  const double iy = (std::sin(pi * (t3 * d2.y1 + 2 * t4)) - std::sin(pi * (t3 * d2.y0 + 2 * t4))) /
                    (pi * t3);
  const double exact = ix * iy;

  const int cells = 1000;
  double quad = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      quad += eval_force(fr, pv, (i + 0.5) / cells, (j + 0.5) / cells);
  quad /= static_cast<double>(cells) * cells;
  CHECK(quad == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("map input concatenates xi and theta") {
  ParamVector pv;
  pv.xi = Vector(2);
  pv.xi << 1.0, 2.0;
  pv.theta = Vector(3);
  pv.theta << 4.0, 5.0, 6.0;
  const Vector in = pv.map_input();
  REQUIRE(in.size() == 5);
  CHECK(in[0] == 1.0);
  CHECK(in[4] == 6.0);
}
