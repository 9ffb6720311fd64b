/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "aids/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "aids/errors.hpp"
#include "aids/rng.hpp"

namespace aids {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// sigma'(z) from z itself; y * (1 - y) underflows to 0 once y rounds to 1.
double sigmoid_slope(double z) {
  const double e = std::exp(-std::abs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

// Inputs as a d x N matrix plus targets, built once per training run.
struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::RowVectorXd targets;
};

Batch to_batch(const MlpNetwork& net, std::span<const LabeledVector> data) {
  if (data.empty()) throw EmptyBatch("batch has no examples");
  const auto d = net.input_width();
  Batch b{Eigen::MatrixXd(d, data.size()), Eigen::RowVectorXd(data.size())};
  for (std::size_t n = 0; n < data.size(); ++n) {
    if (data[n].x.size() != d) {
      throw DimensionError("example width " + std::to_string(data[n].x.size()) +
                           " != network input width " + std::to_string(d));
    }
    b.inputs.col(static_cast<Eigen::Index>(n)) =
        Eigen::Map<const Eigen::VectorXd>(data[n].x.data(), static_cast<Eigen::Index>(d));
    b.targets(static_cast<Eigen::Index>(n)) = data[n].y;
  }
  return b;
}

// Activations of every layer (acts[0] is the input) and the sigmoid slope
// at each layer's pre-activation (slopes[l] belongs to acts[l + 1]).
struct Pass {
  std::vector<Eigen::MatrixXd> acts;
  std::vector<Eigen::MatrixXd> slopes;
};

Pass propagate(const MlpNetwork& net, const Eigen::MatrixXd& inputs) {
  Pass p;
  p.acts.reserve(net.layer_count() + 1);
  p.acts.push_back(inputs);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = net.weights(l) * p.acts.back();
    z.colwise() += net.biases(l);
    p.acts.push_back(z.unaryExpr([](double v) { return sigmoid(v); }));
    p.slopes.push_back(z.unaryExpr([](double v) { return sigmoid_slope(v); }));
  }
  return p;
}

double batch_mse(const Eigen::RowVectorXd& y, const Eigen::RowVectorXd& t) {
  return (y - t).squaredNorm() / static_cast<double>(y.size());
}

// Backpropagates output-layer deltas (1 x N); calls sink(layer, delta_out,
// acts_in) for every layer from the last to the first.
template <typename Sink>
void backpropagate(const MlpNetwork& net, const Pass& pass, Eigen::MatrixXd delta, Sink&& sink) {
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    sink(l, delta, pass.acts[l]);
    if (l == 0) break;
    delta = ((net.weights(l).transpose() * delta).array() * pass.slopes[l - 1].array()).matrix();
  }
}

std::vector<std::size_t> layer_offsets(const MlpNetwork& net) {
  std::vector<std::size_t> off(net.layer_count() + 1, 0);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    off[l + 1] = off[l] + static_cast<std::size_t>(net.weights(l).size() + net.biases(l).size());
  }
  return off;
}

struct LossAndGradient {
  double mse;
  Eigen::VectorXd grad;
};

LossAndGradient loss_and_gradient(const MlpNetwork& net, const Batch& b) {
  const auto pass = propagate(net, b.inputs);
  const Eigen::RowVectorXd y = pass.acts.back().row(0);
  const double n = static_cast<double>(y.size());
  Eigen::MatrixXd delta(1, y.size());
  delta.row(0) = ((2.0 / n) * (y - b.targets)).array() * pass.slopes.back().row(0).array();

  LossAndGradient out{batch_mse(y, b.targets), Eigen::VectorXd::Zero(
                                                   static_cast<Eigen::Index>(net.parameter_count()))};
  const auto off = layer_offsets(net);
  backpropagate(net, pass, std::move(delta),
                [&](std::size_t l, const Eigen::MatrixXd& d, const Eigen::MatrixXd& a) {
                  const Eigen::MatrixXd gw = d * a.transpose();
                  const auto rows = gw.rows(), cols = gw.cols();
                  auto base = static_cast<Eigen::Index>(off[l]);
                  for (Eigen::Index j = 0; j < rows; ++j) {
                    out.grad.segment(base + j * cols, cols) = gw.row(j).transpose();
                  }
                  out.grad.segment(base + rows * cols, rows) = d.rowwise().sum();
                });
  return out;
}

Eigen::MatrixXd jacobian(const MlpNetwork& net, const Batch& b, Eigen::RowVectorXd* outputs) {
  const auto pass = propagate(net, b.inputs);
  const Eigen::RowVectorXd y = pass.acts.back().row(0);
  if (outputs != nullptr) *outputs = y;
  const auto n = y.size();
  Eigen::MatrixXd delta = pass.slopes.back();

  Eigen::MatrixXd jac(n, static_cast<Eigen::Index>(net.parameter_count()));
  const auto off = layer_offsets(net);
  backpropagate(net, pass, std::move(delta),
                [&](std::size_t l, const Eigen::MatrixXd& d, const Eigen::MatrixXd& a) {
                  const auto rows = d.rows(), cols = a.rows();
                  auto base = static_cast<Eigen::Index>(off[l]);
                  for (Eigen::Index j = 0; j < rows; ++j) {
                    jac.middleCols(base + j * cols, cols) =
                        (a.array().rowwise() * d.row(j).array()).transpose();
                  }
                  jac.middleCols(base + rows * cols, rows) = d.transpose();
                });
  return jac;
}

}  // namespace

void MlpNetwork::validate(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 3) {
    throw InvalidArchitecture("need input, at least one hidden layer, and output");
  }
  for (auto s : sizes) {
    if (s < 1) throw InvalidArchitecture("layer size must be >= 1");
  }
  if (sizes.back() != 1) throw InvalidArchitecture("output layer must have exactly one unit");
}

MlpNetwork MlpNetwork::zeros(std::vector<std::size_t> layer_sizes) {
  validate(layer_sizes);
  MlpNetwork net;
  net.sizes_ = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(net.sizes_[l]);
    const auto out = static_cast<Eigen::Index>(net.sizes_[l + 1]);
    net.weights_.push_back(Eigen::MatrixXd::Zero(out, in));
    net.biases_.push_back(Eigen::VectorXd::Zero(out));
  }
  return net;
}

MlpNetwork MlpNetwork::init(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  MlpNetwork net = zeros(std::move(layer_sizes));
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    auto& w = net.weights_[l];
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = rng.uniform(-r, r);
    }
    for (Eigen::Index j = 0; j < net.biases_[l].size(); ++j) net.biases_[l](j) = rng.uniform(-r, r);
  }
  return net;
}

std::size_t count_parameters(std::span<const std::size_t> layer_sizes) {
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    p += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return p;
}

std::size_t MlpNetwork::parameter_count() const { return count_parameters(sizes_); }

Eigen::VectorXd MlpNetwork::parameters() const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto& w = weights_[l];
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) theta(k++) = w(j, i);
    }
    theta.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return theta;
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != parameter_count()) {
    throw DimensionError("parameter vector length mismatch");
  }
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    auto& w = weights_[l];
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = theta(k++);
    }
    biases_[l] = theta.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

bool MlpNetwork::all_finite() const {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

bool MlpNetwork::operator==(const MlpNetwork& other) const {
  if (sizes_ != other.sizes_) return false;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  }
  return true;
}

double forward(const MlpNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_width()) {
    throw DimensionError("input width " + std::to_string(x.size()) + " != " +
                         std::to_string(net.input_width()));
  }
  Eigen::VectorXd a =
      Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    a = ((net.weights(l) * a) + net.biases(l)).unaryExpr([](double v) { return sigmoid(v); });
  }
  return a(0);
}

double mse(const MlpNetwork& net, std::span<const LabeledVector> batch) {
  const Batch b = to_batch(net, batch);
  return batch_mse(propagate(net, b.inputs).acts.back().row(0), b.targets);
}

Eigen::VectorXd gradient(const MlpNetwork& net, std::span<const LabeledVector> batch) {
  return loss_and_gradient(net, to_batch(net, batch)).grad;
}

Eigen::MatrixXd output_jacobian(const MlpNetwork& net, std::span<const LabeledVector> batch) {
  return jacobian(net, to_batch(net, batch), nullptr);
}

void RpropConfig::validate() const {
  if (!(0.0 < eta_minus && eta_minus < 1.0 && 1.0 < eta_plus)) {
    throw InvalidConfig("Rprop requires 0 < eta_minus < 1 < eta_plus");
  }
  if (!(0.0 < delta_min && delta_min <= delta0 && delta0 <= delta_max)) {
    throw InvalidConfig("Rprop requires 0 < delta_min <= delta0 <= delta_max");
  }
}

void LmConfig::validate() const {
  if (!(lambda0 > 0.0 && lambda_up > 1.0 && 0.0 < lambda_down && lambda_down < 1.0)) {
    throw InvalidConfig("LM requires lambda0 > 0, lambda_up > 1, 0 < lambda_down < 1");
  }
}

TrainResult train_rprop(MlpNetwork net, std::span<const LabeledVector> data,
                        const RpropConfig& config) {
  config.validate();
  const Batch batch = to_batch(net, data);
  const auto p = static_cast<Eigen::Index>(net.parameter_count());

  Eigen::VectorXd theta = net.parameters();
  Eigen::VectorXd step_size = Eigen::VectorXd::Constant(p, config.delta0);
  Eigen::VectorXd prev_grad = Eigen::VectorXd::Zero(p);

  TrainResult result;
  result.stop_reason = "max_epochs";
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    net.set_parameters(theta);
    auto [loss, grad] = loss_and_gradient(net, batch);
    if (loss <= config.target_mse) {
      result.stop_reason = "target";
      break;
    }
    EpochRecord rec{epoch, loss, 0.0, {}};
    for (Eigen::Index k = 0; k < p; ++k) {
      const double agreement = grad(k) * prev_grad(k);
      if (agreement > 0.0) {
        step_size(k) = std::min(step_size(k) * config.eta_plus, config.delta_max);
      } else if (agreement < 0.0) {
        // iRprop-: shrink, skip this update, forget the gradient.
        step_size(k) = std::max(step_size(k) * config.eta_minus, config.delta_min);
        prev_grad(k) = 0.0;
        continue;
      }
      const double sign = grad(k) > 0.0 ? 1.0 : (grad(k) < 0.0 ? -1.0 : 0.0);
      theta(k) -= sign * step_size(k);
      if (sign != 0.0) rec.max_step = std::max(rec.max_step, step_size(k));
      prev_grad(k) = grad(k);
    }
    if (!theta.allFinite()) throw NumericalFailure("Rprop produced non-finite weights");
    result.log.push_back(std::move(rec));
  }
  net.set_parameters(theta);
  result.final_mse = batch_mse(propagate(net, batch.inputs).acts.back().row(0), batch.targets);
  result.net = std::move(net);
  return result;
}

TrainResult train_lm(MlpNetwork net, std::span<const LabeledVector> data,
                     const LmConfig& config) {
  config.validate();
  if (net.parameter_count() > config.max_parameters) {
    throw ModelTooLarge("LM parameter count " + std::to_string(net.parameter_count()) +
                        " exceeds cap " + std::to_string(config.max_parameters));
  }
  const Batch batch = to_batch(net, data);

  Eigen::VectorXd theta = net.parameters();
  double lambda = config.lambda0;
  Eigen::RowVectorXd y;

  TrainResult result;
  result.stop_reason = "max_epochs";
  double loss = batch_mse(propagate(net, batch.inputs).acts.back().row(0), batch.targets);
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (loss <= config.target_mse) {
      result.stop_reason = "target";
      break;
    }
    net.set_parameters(theta);
    const Eigen::MatrixXd jac = jacobian(net, batch, &y);
    const Eigen::VectorXd residual = (batch.targets - y).transpose();
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jte = jac.transpose() * residual;

    EpochRecord rec{epoch, loss, 0.0, {}};
    bool accepted = false;
    bool any_factorized = false;
    while (lambda <= config.lambda_max) {
      rec.lambdas.push_back(lambda);
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() != Eigen::Success) {
        lambda *= config.lambda_up;
        continue;
      }
      any_factorized = true;
      const Eigen::VectorXd candidate = theta + llt.solve(jte);
      if (!candidate.allFinite()) {
        lambda *= config.lambda_up;
        continue;
      }
      net.set_parameters(candidate);
      const double trial = batch_mse(propagate(net, batch.inputs).acts.back().row(0), batch.targets);
      if (trial < loss) {
        theta = candidate;
        loss = trial;
        lambda *= config.lambda_down;
        accepted = true;
        break;
      }
      lambda *= config.lambda_up;
    }
    result.log.push_back(std::move(rec));
    if (!accepted) {
      if (!any_factorized) {
        throw NumericalFailure("no damped normal-equation system could be factorized");
      }
      result.stop_reason = "lambda_limit";
      break;
    }
  }
  net.set_parameters(theta);
  result.final_mse = loss;
  result.net = std::move(net);
  return result;
}

}  // namespace aids
