// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>

#include "mmbf/rng.hpp"

namespace mmbf {

/// Three-layer fully connected value network: relu, relu, linear output.
struct MlpParams {
  std::array<Eigen::MatrixXd, 3> w;
  std::array<Eigen::VectorXd, 3> b;

  int input_dim() const { return static_cast<int>(w[0].cols()); }
  int output_dim() const { return static_cast<int>(w[2].rows()); }

  static MlpParams zeros(int in, int h1, int h2, int out);
  static MlpParams zeros_like(const MlpParams& other);

  /// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
  static MlpParams glorot(Rng& rng, int in, int h1, int h2, int out);
};

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& x);

/// Intermediate activations kept for backpropagation.
struct MlpCache {
  Eigen::VectorXd x, z1, h1, z2, h2, q;
};

MlpCache mlp_forward_cached(const MlpParams& p, const Eigen::VectorXd& x);

/// Accumulates d/dparams of weight*(q[action] - target)^2 into grads;
/// returns the unweighted squared error. Only the taken action's output
/// unit receives gradient.
double accumulate_action_grad(const MlpParams& p, const MlpCache& cache,
                              int action, double target, double weight,
                              MlpParams& grads);

struct AdamState {
  std::array<Eigen::MatrixXd, 3> m_w, v_w;
  std::array<Eigen::VectorXd, 3> m_b, v_b;
  long step = 0;

  static AdamState zeros_like(const MlpParams& p);
};

/// One Adam update with beta1=0.9, beta2=0.999, eps=1e-8 and bias
/// correction; increments the step counter.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               double lr);

}  // namespace mmbf
