// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/resnet.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "epod/binio.hpp"
#include "epod/rng.hpp"

namespace epod {

namespace {

void fill_uniform(Matrix& m, CounterRng& rng, double scale) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.next_uniform(-scale, scale);
}

void append(Vector& flat, Eigen::Index& at, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat[at++] = m(i, j);
}

void append(Vector& flat, Eigen::Index& at, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) flat[at++] = v[i];
}

void take(const Vector& flat, Eigen::Index& at, Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = flat[at++];
}

void take(const Vector& flat, Eigen::Index& at, Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = flat[at++];
}

}  // namespace

ResNet::ResNet(int input_dim, int output_dim) : input_dim_(input_dim), output_dim_(output_dim) {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("ResNet: dimensions must be positive");
  w_in = Matrix::Zero(kHiddenWidth, input_dim);
  b_in = Vector::Zero(kHiddenWidth);
  for (int l = 0; l < kTransitions; ++l) {
    a[l] = Matrix::Zero(kHiddenWidth, kHiddenWidth);
    b[l] = Vector::Zero(kHiddenWidth);
  }
  w_out = Matrix::Zero(output_dim, kHiddenWidth);
  b_out = Vector::Zero(output_dim);
}

ResNet ResNet::initialized(int input_dim, int output_dim, std::uint64_t seed) {
  ResNet net(input_dim, output_dim);
  CounterRng rng(seed, 0);
  fill_uniform(net.w_in, rng, 1.0 / std::sqrt(static_cast<double>(input_dim)));
  const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(kHiddenWidth));
  for (int l = 0; l < kTransitions; ++l) fill_uniform(net.a[l], rng, hidden_scale);
  fill_uniform(net.w_out, rng, hidden_scale);
  return net;
}

int ResNet::parameter_count() const {
  return kHiddenWidth * input_dim_ + kHiddenWidth +
         kTransitions * (kHiddenWidth * kHiddenWidth + kHiddenWidth) +
         output_dim_ * kHiddenWidth + output_dim_;
}

void ResNet::set_input_box(const Vector& lo, const Vector& hi) {
  if (lo.size() != input_dim_ || hi.size() != input_dim_)
    throw std::invalid_argument("ResNet::set_input_box: dimension mismatch");
  for (Eigen::Index d = 0; d < lo.size(); ++d)
    if (!(lo[d] < hi[d])) throw std::invalid_argument("ResNet::set_input_box: empty range");
  in_lo_ = lo;
  in_hi_ = hi;
}

Vector ResNet::rescaled(const Vector& x) const {
  if (!has_input_box()) return x;
  Vector t(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d)
    t[d] = 2.0 * (x[d] - in_lo_[d]) / (in_hi_[d] - in_lo_[d]) - 1.0;
  return t;
}

Vector ResNet::forward(const Vector& x) const {
  if (x.size() != input_dim_) throw std::invalid_argument("ResNet::forward: input size mismatch");
  Vector h = w_in * rescaled(x) + b_in;
  for (int l = 0; l < kTransitions; ++l) {
    const Vector z = a[l] * h + b[l];
    h += z.array().tanh().matrix();
  }
  return w_out * h + b_out;
}

double ResNet::loss(const Matrix& inputs, const Matrix& targets) const {
  if (inputs.rows() != targets.rows() || inputs.rows() == 0)
    throw std::invalid_argument("ResNet::loss: bad batch shape");
  double total = 0.0;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const Vector err = forward(inputs.row(i).transpose()) - targets.row(i).transpose();
    total += err.squaredNorm();
  }
  return total / (static_cast<double>(inputs.rows()) * static_cast<double>(output_dim_));
}

double ResNet::loss_and_gradient(const Matrix& inputs, const Matrix& targets, Vector& grad) const {
  if (inputs.rows() != targets.rows() || inputs.rows() == 0)
    throw std::invalid_argument("ResNet::loss_and_gradient: bad batch shape");

  Matrix d_w_in = Matrix::Zero(w_in.rows(), w_in.cols());
  Vector d_b_in = Vector::Zero(b_in.size());
  Matrix d_a[kTransitions];
  Vector d_b[kTransitions];
  for (int l = 0; l < kTransitions; ++l) {
    d_a[l] = Matrix::Zero(kHiddenWidth, kHiddenWidth);
    d_b[l] = Vector::Zero(kHiddenWidth);
  }
  Matrix d_w_out = Matrix::Zero(w_out.rows(), w_out.cols());
  Vector d_b_out = Vector::Zero(b_out.size());

  const double batch = static_cast<double>(inputs.rows());
  double total = 0.0;
  Vector h[kTransitions + 1];
  Vector t[kTransitions];
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const Vector x = rescaled(inputs.row(i).transpose());
    h[0] = w_in * x + b_in;
    for (int l = 0; l < kTransitions; ++l) {
      t[l] = (a[l] * h[l] + b[l]).array().tanh().matrix();
      h[l + 1] = t[l] + h[l];
    }
    const Vector err = w_out * h[kTransitions] + b_out - targets.row(i).transpose();
    total += err.squaredNorm();

    const Vector g_out = (2.0 / (batch * output_dim_)) * err;
    d_w_out += g_out * h[kTransitions].transpose();
    d_b_out += g_out;
    Vector dh = w_out.transpose() * g_out;
    for (int l = kTransitions - 1; l >= 0; --l) {
      const Vector dz = (dh.array() * (1.0 - t[l].array().square())).matrix();
      d_a[l] += dz * h[l].transpose();
      d_b[l] += dz;
      dh += a[l].transpose() * dz;
    }
    d_w_in += dh * x.transpose();
    d_b_in += dh;
  }

  grad.resize(parameter_count());
  Eigen::Index at = 0;
  append(grad, at, d_w_in);
  append(grad, at, d_b_in);
  for (int l = 0; l < kTransitions; ++l) {
    append(grad, at, d_a[l]);
    append(grad, at, d_b[l]);
  }
  append(grad, at, d_w_out);
  append(grad, at, d_b_out);
  return total / (batch * static_cast<double>(output_dim_));
}

Vector ResNet::parameters() const {
  Vector flat(parameter_count());
  Eigen::Index at = 0;
  append(flat, at, w_in);
  append(flat, at, b_in);
  for (int l = 0; l < kTransitions; ++l) {
    append(flat, at, a[l]);
    append(flat, at, b[l]);
  }
  append(flat, at, w_out);
  append(flat, at, b_out);
  return flat;
}

void ResNet::set_parameters(const Vector& flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("ResNet::set_parameters: size mismatch");
  Eigen::Index at = 0;
  take(flat, at, w_in);
  take(flat, at, b_in);
  for (int l = 0; l < kTransitions; ++l) {
    take(flat, at, a[l]);
    take(flat, at, b[l]);
  }
  take(flat, at, w_out);
  take(flat, at, b_out);
}

TrainResult train_resnet(const TrainingTable& table, const TrainConfig& config) {
  if (table.inputs.rows() == 0) throw std::invalid_argument("train_resnet: empty table");
  if (config.learning_rate < 0.0 || config.batch_size < 1 || config.epochs < 0 ||
      config.epsilon <= 0.0)
    throw std::invalid_argument("train_resnet: bad config");

  const int input_dim = static_cast<int>(table.inputs.cols());
  const int output_dim = static_cast<int>(table.targets.cols());
  ResNet net = ResNet::initialized(input_dim, output_dim, config.seed);

  Vector lo = table.inputs.colwise().minCoeff().transpose();
  Vector hi = table.inputs.colwise().maxCoeff().transpose();
  for (Eigen::Index d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d])) {  // constant input dimension, widen symmetrically
      lo[d] -= 0.5;
      hi[d] += 0.5;
    }
  }
  net.set_input_box(lo, hi);

  Vector params = net.parameters();
  Vector m = Vector::Zero(params.size());
  Vector v = Vector::Zero(params.size());
  Vector grad;
  std::vector<int> order(table.inputs.rows());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{std::move(net), {}};
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    CounterRng rng(config.seed, static_cast<std::uint64_t>(epoch) + 1);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(start + config.batch_size, order.size());
      Matrix bi(stop - start, table.inputs.cols());
      Matrix bt(stop - start, table.targets.cols());
      for (std::size_t r = start; r < stop; ++r) {
        bi.row(static_cast<Eigen::Index>(r - start)) = table.inputs.row(order[r]);
        bt.row(static_cast<Eigen::Index>(r - start)) = table.targets.row(order[r]);
      }
      const double batch_loss = result.net.loss_and_gradient(bi, bt, grad);
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_resnet: non-finite loss at epoch " +
                                 std::to_string(epoch));
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (Eigen::Index p = 0; p < params.size(); ++p) {
        m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * grad[p];
        v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * grad[p] * grad[p];
        params[p] -= config.learning_rate * (m[p] / c1) / (std::sqrt(v[p] / c2) + config.epsilon);
      }
      result.net.set_parameters(params);
    }
    result.loss_history.push_back(result.net.loss(table.inputs, table.targets));
  }
  return result;
}

void save_net(const std::string& path, const ResNet& net) {
  std::ofstream os = binio::open_out(path);
  binio::write_magic(os, "PNET");
  binio::write_le<std::uint32_t>(os, 1);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.input_dim()));
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.output_dim()));
  binio::write_le<std::uint32_t>(os, ResNet::kHiddenWidth);
  binio::write_le<std::uint32_t>(os, ResNet::kTransitions);
  binio::write_le<std::uint32_t>(os, net.has_input_box() ? 1 : 0);
  if (net.has_input_box()) {
    for (Eigen::Index d = 0; d < net.input_lo().size(); ++d) {
      binio::write_le<double>(os, net.input_lo()[d]);
      binio::write_le<double>(os, net.input_hi()[d]);
    }
  }
  const Vector flat = net.parameters();
  for (Eigen::Index i = 0; i < flat.size(); ++i) binio::write_le<double>(os, flat[i]);
  if (!os) throw std::runtime_error("save_net: write failed: " + path);
}

ResNet load_net(const std::string& path) {
  std::ifstream is = binio::open_in(path);
  binio::expect_magic(is, "PNET", path);
  const auto version = binio::read_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_net: unsupported version " + std::to_string(version));
  const auto input_dim = binio::read_le<std::uint32_t>(is);
  const auto output_dim = binio::read_le<std::uint32_t>(is);
  const auto width = binio::read_le<std::uint32_t>(is);
  const auto depth = binio::read_le<std::uint32_t>(is);
  if (width != ResNet::kHiddenWidth || depth != ResNet::kTransitions)
    throw std::runtime_error("load_net: architecture mismatch");
  const auto has_box = binio::read_le<std::uint32_t>(is);

  ResNet net(static_cast<int>(input_dim), static_cast<int>(output_dim));
  if (has_box) {
    Vector lo(input_dim), hi(input_dim);
    for (std::uint32_t d = 0; d < input_dim; ++d) {
      lo[d] = binio::read_le<double>(is);
      hi[d] = binio::read_le<double>(is);
    }
    net.set_input_box(lo, hi);
  }
  Vector flat(net.parameter_count());
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = binio::read_le<double>(is);
  if (!is) throw std::runtime_error("load_net: truncated file: " + path);
  net.set_parameters(flat);
  return net;
}

}  // namespace epod
