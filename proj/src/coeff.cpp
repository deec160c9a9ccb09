// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/coeff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epod/rng.hpp"

namespace epod {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt5 = std::sqrt(5.0);

// The five oscillatory ratio fields multiplying xi_1..xi_5 in the ex1
// coefficient.
double ex1_term(const CoeffFamily& fam, int i, double x, double y) {
  const double e = fam.eps[i];
  const double p = fam.p[i];
  switch (i) {
    case 0:
      return (2.0 + p * std::sin(kTwoPi * x / e)) / (2.0 - p * std::cos(kTwoPi * y / e));
    case 1:
      return (2.0 + p * std::sin(kTwoPi * (x + y) / (kSqrt2 * e))) /
             (2.0 - p * std::sin(kTwoPi * (x - y) / (kSqrt2 * e)));
    case 2:
      return (2.0 + p * std::cos(kTwoPi * (x - 0.5) / e)) /
             (2.0 - p * std::cos(kTwoPi * (y - 0.5) / e));
    case 3:
      return (2.0 + p * std::cos(kTwoPi * (x - y) / (kSqrt2 * e))) /
             (2.0 - p * std::sin(kTwoPi * (x + y) / (kSqrt2 * e)));
    default:
      return (2.0 + p * std::cos(kTwoPi * (2.0 * x - y) / (kSqrt5 * e))) /
             (2.0 - p * std::sin(kTwoPi * (x + 2.0 * y) / (kSqrt5 * e)));
  }
}

// Rotated plane-wave exponent term sin(2 pi (x sin(t) + y cos(t)) / eps).
double plane_wave(double angle, double eps, double x, double y) {
  return std::sin(kTwoPi * (x * std::sin(angle) + y * std::cos(angle)) / eps);
}

bool in_any(const std::vector<Rect>& rects, double x, double y) {
  for (const auto& r : rects)
    if (r.contains(x, y)) return true;
  return false;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::ex1: return "ex1";
    case Family::ex2: return "ex2";
    case Family::interface_bands: return "interface";
    case Family::ex3: return "ex3";
    case Family::ex4: return "ex4";
  }
  return "?";
}

std::string to_string(Force force) {
  switch (force) {
    case Force::trig_indicator_ex1: return "trig_indicator_ex1";
    case Force::trig_indicator_ex2: return "trig_indicator_ex2";
    case Force::gaussian_center: return "gaussian_center";
    case Force::random_trig: return "random_trig";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "ex1") return Family::ex1;
  if (name == "ex2") return Family::ex2;
  if (name == "interface") return Family::interface_bands;
  if (name == "ex3") return Family::ex3;
  if (name == "ex4") return Family::ex4;
  throw std::invalid_argument("unknown coefficient family: " + name);
}

Force force_from_string(const std::string& name) {
  if (name == "trig_indicator_ex1") return Force::trig_indicator_ex1;
  if (name == "trig_indicator_ex2") return Force::trig_indicator_ex2;
  if (name == "gaussian_center") return Force::gaussian_center;
  if (name == "random_trig") return Force::random_trig;
  throw std::invalid_argument("unknown force family: " + name);
}

CoeffFamily make_coeff_family(Family id, int mesh_n) {
  CoeffFamily fam;
  fam.id = id;
  switch (id) {
    case Family::ex1:
      fam.r = 5;
      fam.xi_lo = 0.0;
      fam.xi_hi = 1.0;
      fam.eps = {1.0 / 47, 1.0 / 29, 1.0 / 53, 1.0 / 37, 1.0 / 41};
      fam.p = {1.98, 1.96, 1.94, 1.92, 1.9};
      break;
    case Family::ex2:
      fam.r = 8;
      fam.xi_lo = -0.5;
      fam.xi_hi = 0.5;
      fam.eps = {1.0 / 43, 1.0 / 41, 1.0 / 47, 1.0 / 29, 1.0 / 37, 1.0 / 31, 1.0 / 53, 1.0 / 35};
      break;
    case Family::interface_bands: {
      if (mesh_n < 2)
        throw std::invalid_argument("interface family needs the run mesh n (band width 10h)");
      fam.r = 12;
      fam.xi_lo = -2.0 / 3.0;
      fam.xi_hi = 2.0 / 3.0;
      fam.eps.resize(12);
      for (int i = 1; i <= 6; ++i) fam.eps[i - 1] = (1.0 + i) / 100.0;
      for (int i = 7; i <= 12; ++i) fam.eps[i - 1] = (i + 13.0) / 100.0;
      fam.interface_width = 10.0 / mesh_n;
      for (double corner : {0.3, 0.5, 0.7})
        fam.interface_rects.push_back(Rect{corner, corner + fam.interface_width, 0.1, 0.9});
      break;
    }
    case Family::ex3:
      fam.r = 18;
      fam.xi_lo = -0.2;
      fam.xi_hi = 0.2;
      fam.eps.resize(18);
      for (int i = 1; i <= 18; ++i) fam.eps[i - 1] = 1.0 / (2.0 * i + 9.0);
      break;
    case Family::ex4:
      fam.r = 24;
      fam.xi_lo = -1.0 / 6.0;
      fam.xi_hi = 1.0 / 6.0;
      fam.eps.resize(24);
      for (int i = 1; i <= 24; ++i) fam.eps[i - 1] = (1.0 + i) / 100.0;
      break;
  }
  return fam;
}

ForceFamily make_force_family(Force id) {
  switch (id) {
    case Force::trig_indicator_ex1: return {id, 0};
    case Force::trig_indicator_ex2: return {id, 0};
    case Force::gaussian_center: return {id, 2};
    case Force::random_trig: return {id, 4};
  }
  throw std::invalid_argument("unknown force id");
}

Force default_force(Family family) {
  switch (family) {
    case Family::ex1: return Force::trig_indicator_ex1;
    case Family::ex2: return Force::trig_indicator_ex2;
    case Family::interface_bands: return Force::trig_indicator_ex2;
    case Family::ex3: return Force::gaussian_center;
    case Family::ex4: return Force::random_trig;
  }
  throw std::invalid_argument("unknown family id");
}

std::vector<std::pair<double, double>> force_param_ranges(const ForceFamily& force) {
  switch (force.id) {
    case Force::gaussian_center: {
      const Rect d2 = source_region();
      return {{d2.x0, d2.x1}, {d2.y0, d2.y1}};
    }
    case Force::random_trig:
      return {{0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}};
    default:
      return {};
  }
}

Vector ParamVector::map_input() const {
  Vector v(xi.size() + theta.size());
  v.head(xi.size()) = xi;
  v.tail(theta.size()) = theta;
  return v;
}

std::vector<ParamVector> sample_params(const CoeffFamily& family, const ForceFamily& force,
                                       std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("sample_params: count must be >= 1");
  const auto theta_ranges = force_param_ranges(force);
  std::vector<ParamVector> out(count);
  for (int k = 0; k < count; ++k) {
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    ParamVector pv;
    pv.seed = seed;
    pv.index = static_cast<std::uint64_t>(k);
    pv.xi.resize(family.r);
    for (int i = 0; i < family.r; ++i) pv.xi[i] = rng.next_uniform(family.xi_lo, family.xi_hi);
    pv.theta.resize(static_cast<Eigen::Index>(theta_ranges.size()));
    for (std::size_t i = 0; i < theta_ranges.size(); ++i)
      pv.theta[static_cast<Eigen::Index>(i)] =
          rng.next_uniform(theta_ranges[i].first, theta_ranges[i].second);
    out[k] = std::move(pv);
  }
  return out;
}

double eval_coeff(const CoeffFamily& fam, const ParamVector& params, double x, double y) {
  if (params.xi.size() != fam.r) throw std::invalid_argument("eval_coeff: xi dimension mismatch");
  switch (fam.id) {
    case Family::ex1: {
      double a = 0.1;
      for (int i = 0; i < 5; ++i) a += ex1_term(fam, i, x, y) * params.xi[i];
      return a;
    }
    case Family::ex2: {
      double exponent = 0.0;
      for (int i = 1; i <= 8; ++i) {
        const double e = fam.eps[i - 1];
        exponent += std::sin(kTwoPi * (9.0 - i) * x / (9.0 * e)) *
                    std::cos(kTwoPi * i * y / (9.0 * e)) * params.xi[i - 1];
      }
      return std::exp(exponent);
    }
    case Family::interface_bands: {
      double exponent = 0.0;
      if (in_any(fam.interface_rects, x, y)) {
        for (int i = 1; i <= 6; ++i)
          exponent +=
              plane_wave((i + 0.5) * std::numbers::pi / 6.0, fam.eps[i + 5], x, y) * params.xi[i + 5];
      } else {
        for (int i = 1; i <= 6; ++i)
          exponent += plane_wave(i * std::numbers::pi / 6.0, fam.eps[i - 1], x, y) * params.xi[i - 1];
      }
      return std::exp(exponent);
    }
    case Family::ex3: {
      double exponent = 0.0;
      for (int i = 1; i <= 18; ++i)
        exponent += plane_wave(i * std::numbers::pi / 18.0, fam.eps[i - 1], x, y) * params.xi[i - 1];
      return std::exp(exponent);
    }
    case Family::ex4: {
      double exponent = 0.0;
      for (int i = 1; i <= 24; ++i)
        exponent += plane_wave(i * std::numbers::pi / 24.0, fam.eps[i - 1], x, y) * params.xi[i - 1];
      return std::exp(exponent);
    }
  }
  throw std::invalid_argument("eval_coeff: unknown family");
}

double eval_force(const ForceFamily& force, const ParamVector& params, double x, double y) {
  const Rect d2 = source_region();
  switch (force.id) {
    case Force::trig_indicator_ex1:
      return d2.contains(x, y) ? std::sin(kTwoPi * x) * std::cos(kTwoPi * y) : 0.0;
    case Force::trig_indicator_ex2:
      return d2.contains(x, y) ? std::cos(kTwoPi * x) * std::sin(kTwoPi * y) : 0.0;
    case Force::gaussian_center: {
      const double dx = x - params.theta[0];
      const double dy = y - params.theta[1];
      const double s2 = force.sigma * force.sigma;
      return std::exp(-(dx * dx + dy * dy) / (2.0 * s2)) / (kTwoPi * s2);
    }
    case Force::random_trig:
      if (!d2.contains(x, y)) return 0.0;
      return std::sin(std::numbers::pi * (params.theta[0] * x + 2.0 * params.theta[1])) *
             std::cos(std::numbers::pi * (params.theta[2] * y + 2.0 * params.theta[3]));
  }
  throw std::invalid_argument("eval_force: unknown force family");
}

ScalarFn coeff_fn(const CoeffFamily& family, const ParamVector& params) {
  return [family, params](double x, double y) { return eval_coeff(family, params, x, y); };
}

ScalarFn force_fn(const ForceFamily& force, const ParamVector& params) {
  return [force, params](double x, double y) { return eval_force(force, params, x, y); };
}

bool is_affine(Family family) { return family == Family::ex1; }

std::vector<AffineTerm> affine_terms(const CoeffFamily& family) {
  if (family.id != Family::ex1)
    throw std::invalid_argument("affine_terms: family " + to_string(family.id) +
                                " is not affine in xi");
  std::vector<AffineTerm> terms;
  terms.push_back({[](double, double) { return 0.1; }, [](const Vector&) { return 1.0; }});
  for (int i = 0; i < 5; ++i) {
    terms.push_back({[family, i](double x, double y) { return ex1_term(family, i, x, y); },
                     [i](const Vector& xi) { return xi[i]; }});
  }
  return terms;
}

std::pair<double, double> contrast_bounds(const CoeffFamily& fam) {
  switch (fam.id) {
    case Family::ex1: {
      // Each ratio field ranges over [(2-p)/(2+p), (2+p)/(2-p)] and
      // xi over [0, 1], so the essential bounds are 0.1 and
      // 0.1 + sum_i (2+p_i)/(2-p_i).
      double hi = 0.1;
      for (double p : fam.p) hi += (2.0 + p) / (2.0 - p);
      return {0.1, hi};
    }
    default: {
      // exp(sum s_i xi_i) with each spatial factor s_i spanning [-1, 1].
      const double amplitude = fam.r * std::max(std::abs(fam.xi_lo), std::abs(fam.xi_hi));
      const double spread =
          fam.id == Family::interface_bands ? amplitude / 2.0 : amplitude;  // 6 terms per branch
      return {std::exp(-spread), std::exp(spread)};
    }
  }
}

}  // namespace epod
