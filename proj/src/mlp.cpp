// SPDX-License-Identifier: Apache-2.0
#include "mmbf/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace mmbf {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void check_dims(int in, int h1, int h2, int out) {
  if (in < 1 || h1 < 1 || h2 < 1 || out < 1)
    throw std::invalid_argument("all layer widths must be >= 1");
}

}  // namespace

MlpParams MlpParams::zeros(int in, int h1, int h2, int out) {
  check_dims(in, h1, h2, out);
  MlpParams p;
  p.w = {Eigen::MatrixXd::Zero(h1, in), Eigen::MatrixXd::Zero(h2, h1),
         Eigen::MatrixXd::Zero(out, h2)};
  p.b = {Eigen::VectorXd::Zero(h1), Eigen::VectorXd::Zero(h2),
         Eigen::VectorXd::Zero(out)};
  return p;
}

MlpParams MlpParams::zeros_like(const MlpParams& other) {
  MlpParams p;
  for (int l = 0; l < 3; ++l) {
    p.w[l] = Eigen::MatrixXd::Zero(other.w[l].rows(), other.w[l].cols());
    p.b[l] = Eigen::VectorXd::Zero(other.b[l].size());
  }
  return p;
}

MlpParams MlpParams::glorot(Rng& rng, int in, int h1, int h2, int out) {
  MlpParams p = zeros(in, h1, h2, out);
  for (auto& w : p.w) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = rng.uniform(-bound, bound);
  }
  return p;
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.w[0].cols())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  const Eigen::VectorXd h1 = (p.w[0] * x + p.b[0]).cwiseMax(0.0);
  const Eigen::VectorXd h2 = (p.w[1] * h1 + p.b[1]).cwiseMax(0.0);
  return p.w[2] * h2 + p.b[2];
}

MlpCache mlp_forward_cached(const MlpParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.w[0].cols())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  MlpCache c;
  c.x = x;
  c.z1 = p.w[0] * x + p.b[0];
  c.h1 = c.z1.cwiseMax(0.0);
  c.z2 = p.w[1] * c.h1 + p.b[1];
  c.h2 = c.z2.cwiseMax(0.0);
  c.q = p.w[2] * c.h2 + p.b[2];
  return c;
}

double accumulate_action_grad(const MlpParams& p, const MlpCache& cache,
                              int action, double target, double weight,
                              MlpParams& grads) {
  if (action < 0 || action >= p.output_dim())
    throw std::out_of_range("action index outside output layer");
  const double err = cache.q(action) - target;

  Eigen::VectorXd dq = Eigen::VectorXd::Zero(p.output_dim());
  dq(action) = weight * 2.0 * err;

  grads.w[2].noalias() += dq * cache.h2.transpose();
  grads.b[2] += dq;

  Eigen::VectorXd dz2 = p.w[2].transpose() * dq;
  dz2 = (cache.z2.array() > 0.0).select(dz2, 0.0);
  grads.w[1].noalias() += dz2 * cache.h1.transpose();
  grads.b[1] += dz2;

  Eigen::VectorXd dz1 = p.w[1].transpose() * dz2;
  dz1 = (cache.z1.array() > 0.0).select(dz1, 0.0);
  grads.w[0].noalias() += dz1 * cache.x.transpose();
  grads.b[0] += dz1;

  return err * err;
}

AdamState AdamState::zeros_like(const MlpParams& p) {
  AdamState s;
  for (int l = 0; l < 3; ++l) {
    s.m_w[l] = Eigen::MatrixXd::Zero(p.w[l].rows(), p.w[l].cols());
    s.v_w[l] = Eigen::MatrixXd::Zero(p.w[l].rows(), p.w[l].cols());
    s.m_b[l] = Eigen::VectorXd::Zero(p.b[l].size());
    s.v_b[l] = Eigen::VectorXd::Zero(p.b[l].size());
  }
  return s;
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               double lr) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v.array().matrix() + (1.0 - kBeta2) * g.array().square().matrix();
    theta.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kAdamEps);
  };
  for (int l = 0; l < 3; ++l) {
    update(params.w[l], grads.w[l], state.m_w[l], state.v_w[l]);
    update(params.b[l], grads.b[l], state.m_b[l], state.v_b[l]);
  }
}

}  // namespace mmbf
