/*
 * Copyright 2026 The noiwb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mlp.hpp"

#include <cmath>

#include "noi/rng.hpp"

namespace noi::detail {

Mlp::Mlp(const std::vector<int>& sizes, std::uint64_t seed, double output_scale) {
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const int in = sizes[i], out = sizes[i + 1];
    const double bound = std::sqrt(6.0 / (in + out)) * (i + 2 == sizes.size() ? output_scale : 1.0);
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(out));
    m_w_.push_back(Eigen::MatrixXd::Zero(out, in));
    v_w_.push_back(Eigen::MatrixXd::Zero(out, in));
    m_b_.push_back(Eigen::VectorXd::Zero(out));
    v_b_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  Eigen::MatrixXd h = x;
  if (cache) cache->activations.assign(1, x);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) z = z.array().tanh().matrix();
    h = std::move(z);
    if (cache) cache->activations.push_back(h);
  }
  return h;
}

Mlp::Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_out) const {
  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());
  Eigen::MatrixXd delta = grad_out;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l + 1 < weights_.size()) {
      const auto& a = cache.activations[l + 1];
      delta = (delta.array() * (1.0 - a.array().square())).matrix();
    }
    g.weights[l] = delta * cache.activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) delta = weights_[l].transpose() * delta;
  }
  return g;
}

void Mlp::adam_step(Gradients grads, double lr, double max_grad_norm) {
  double sq = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l) sq += grads.weights[l].squaredNorm() + grads.biases[l].squaredNorm();
  const double norm = std::sqrt(sq);
  const double scale = max_grad_norm > 0.0 && norm > max_grad_norm ? max_grad_norm / norm : 1.0;
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++step_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    grads.weights[l] *= scale;
    grads.biases[l] *= scale;
    m_w_[l] = b1 * m_w_[l] + (1 - b1) * grads.weights[l];
    v_w_[l] = b2 * v_w_[l] + (1 - b2) * grads.weights[l].cwiseAbs2();
    m_b_[l] = b1 * m_b_[l] + (1 - b1) * grads.biases[l];
    v_b_[l] = b2 * v_b_[l] + (1 - b2) * grads.biases[l].cwiseAbs2();
    weights_[l].array() -= lr * (m_w_[l].array() / c1) / ((v_w_[l].array() / c2).sqrt() + eps);
    biases_[l].array() -= lr * (m_b_[l].array() / c1) / ((v_b_[l].array() / c2).sqrt() + eps);
  }
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.insert(out.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
    out.insert(out.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return out;
}

}  // namespace noi::detail
