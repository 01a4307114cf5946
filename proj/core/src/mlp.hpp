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

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace noi::detail {

/// Fully connected network: tanh on hidden layers, linear output.
/// Columns of a batch matrix are samples.
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each layer output
  };
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  Mlp() = default;
  Mlp(const std::vector<int>& sizes, std::uint64_t seed, double output_scale = 1.0);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;
  /// Accumulates parameter gradients for dLoss/dOutput = `grad_out`.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& grad_out) const;
  void adam_step(Gradients grads, double lr, double max_grad_norm);

  std::vector<double> parameters() const;
  int input_size() const { return static_cast<int>(weights_.front().cols()); }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
  long step_ = 0;
};

}  // namespace noi::detail
