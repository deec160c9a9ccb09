// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_RESNET_HPP
#define EPOD_RESNET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "epod/maps.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Residual tanh network from map inputs to basis coefficients:
//   h_1 = W_in x + b_in
//   h_{l+1} = tanh(A_l h_l + b_l) + h_l     l = 1, 2, 3
//   y = W_out h_4 + b_out
// with 50-unit hidden layers. Inputs are optionally rescaled per
// dimension to [-1, 1] by a stored box before entering the net.
class ResNet {
 public:
  static constexpr int kHiddenWidth = 50;
  static constexpr int kTransitions = 3;

  ResNet(int input_dim, int output_dim);  // all parameters zero

  // Uniform init scaled by 1 / sqrt(fan_in), biases zero, seeded.
  static ResNet initialized(int input_dim, int output_dim, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  int parameter_count() const;

  void set_input_box(const Vector& lo, const Vector& hi);
  bool has_input_box() const { return in_lo_.size() > 0; }
  const Vector& input_lo() const { return in_lo_; }
  const Vector& input_hi() const { return in_hi_; }

  Vector forward(const Vector& x) const;

  // Mean over the batch of the per-sample mean squared coefficient
  // error: (1/B) sum_n (1/K) |c_n - y_n|^2.
  double loss(const Matrix& inputs, const Matrix& targets) const;
  // Same value; gradient with respect to the flattened parameters.
  double loss_and_gradient(const Matrix& inputs, const Matrix& targets, Vector& grad) const;

  // Flat layout: W_in, b_in, A_1, b_1, A_2, b_2, A_3, b_3, W_out, b_out,
  // matrices row-major.
  Vector parameters() const;
  void set_parameters(const Vector& flat);

  Matrix w_in, w_out;
  Vector b_in, b_out;
  Matrix a[kTransitions];
  Vector b[kTransitions];

 private:
  Vector rescaled(const Vector& x) const;

  int input_dim_ = 0;
  int output_dim_ = 0;
  Vector in_lo_, in_hi_;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainResult {
  ResNet net;
  std::vector<double> loss_history;  // full-table loss after each epoch
};

// Adam over seeded shuffled minibatches; the input box is taken from the
// per-dimension extent of the training inputs. Non-finite loss aborts
// with the epoch index.
TrainResult train_resnet(const TrainingTable& table, const TrainConfig& config);

// "PNET" container.
void save_net(const std::string& path, const ResNet& net);
ResNet load_net(const std::string& path);

}  // namespace epod

#endif  // EPOD_RESNET_HPP
