// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_COEFF_HPP
#define EPOD_COEFF_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epod/fem.hpp"
#include "epod/mesh.hpp"
#include "epod/sparse.hpp"

namespace epod {

enum class Family { ex1, ex2, interface_bands, ex3, ex4 };
enum class Force { trig_indicator_ex1, trig_indicator_ex2, gaussian_center, random_trig };

std::string to_string(Family family);
std::string to_string(Force force);
Family family_from_string(const std::string& name);
Force force_from_string(const std::string& name);

// A parameterized random coefficient family: r i.i.d. uniform variables
// on [xi_lo, xi_hi] plus fixed multiscale constants.
struct CoeffFamily {
  Family id;
  int r;
  double xi_lo, xi_hi;
  std::vector<double> eps;
  std::vector<double> p;          // ex1 only
  double interface_width = 0.0;   // 10h, interface family only
  std::vector<Rect> interface_rects;
};

// mesh_n fixes the 10h band width of the interface family and is ignored
// by the others.
CoeffFamily make_coeff_family(Family id, int mesh_n = 0);

struct ForceFamily {
  Force id;
  int param_count;
  double sigma = 0.01;  // gaussian_center only
};

ForceFamily make_force_family(Force id);
Force default_force(Family family);

// Uniform ranges of the force parameters theta, in draw order.
std::vector<std::pair<double, double>> force_param_ranges(const ForceFamily& force);

struct ParamVector {
  Vector xi;
  Vector theta;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  // (xi, theta) concatenated: the input of the parameter-to-coefficient maps.
  Vector map_input() const;
};

// count i.i.d. parameter vectors, one counter-based stream per index, so
// the result is bitwise reproducible for a given seed regardless of
// evaluation order.
std::vector<ParamVector> sample_params(const CoeffFamily& family, const ForceFamily& force,
                                       std::uint64_t seed, int count);

double eval_coeff(const CoeffFamily& family, const ParamVector& params, double x, double y);
double eval_force(const ForceFamily& force, const ParamVector& params, double x, double y);

// Bound coefficient closures for the FEM assembly.
ScalarFn coeff_fn(const CoeffFamily& family, const ParamVector& params);
ScalarFn force_fn(const ForceFamily& force, const ParamVector& params);

// One term of an affine decomposition a(x, xi) = sum_n theta_n(xi) a_n(x).
struct AffineTerm {
  ScalarFn field;
  std::function<double(const Vector&)> weight;
};

// Exact affine split; only ex1 admits one (r+1 terms: the 0.1 constant
// plus the five ratio fields). Non-affine families throw
// std::invalid_argument.
std::vector<AffineTerm> affine_terms(const CoeffFamily& family);
bool is_affine(Family family);

// Analytic essential bounds [a_min, a_max] of the family, from per-term
// interval analysis; their ratio is the contrast kappa_a.
std::pair<double, double> contrast_bounds(const CoeffFamily& family);

}  // namespace epod

#endif  // EPOD_COEFF_HPP
