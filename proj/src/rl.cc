// Copyright 2026 The Synloco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synloco/rl.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "synloco/errors.h"

namespace synloco {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
using MatrixMap = Eigen::Map<Eigen::MatrixXd>;

// Offset of layer l's weights inside the flat vector.
int LayerOffset(const std::vector<int>& sizes, int layer) {
  int offset = 0;
  for (int l = 0; l < layer; ++l) offset += sizes[l + 1] * (sizes[l] + 1);
  return offset;
}

Eigen::MatrixXd EluMatrix(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return Elu(v); });
}

}  // namespace

int MlpParamCount(const std::vector<int>& sizes) {
  return LayerOffset(sizes, static_cast<int>(sizes.size()) - 1);
}

MlpParams MakeMlp(const std::vector<int>& sizes, std::mt19937_64& rng,
                  double output_gain) {
  if (sizes.size() < 2) throw InvalidParams("an MLP needs at least 2 sizes");
  for (int s : sizes) {
    if (s < 1) throw InvalidParams("MLP layer sizes must be >= 1");
  }
  MlpParams p;
  p.sizes = sizes;
  p.flat = Eigen::VectorXd::Zero(MlpParamCount(sizes));
  for (int l = 0; l < p.num_layers(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const bool last = l + 1 == p.num_layers();
    const double gain = last ? output_gain : std::sqrt(2.0);
    const double std = gain / std::sqrt(static_cast<double>(in));
    MatrixMap w(p.flat.data() + LayerOffset(sizes, l), out, in);
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) {
        w(r, c) = std * std::normal_distribution<double>(0.0, 1.0)(rng);
      }
    }
  }
  return p;
}

double Elu(double x) { return x > 0.0 ? x : std::expm1(x); }

Eigen::VectorXd MlpForward(const MlpParams& params, const Eigen::VectorXd& x) {
  return MlpForwardBatch(params, x, nullptr).col(0);
}

Eigen::MatrixXd MlpForwardBatch(const MlpParams& params,
                                const Eigen::MatrixXd& x, MlpCache* cache) {
  if (x.rows() != params.input_size()) {
    throw DimensionMismatch("MLP expects input size " +
                            std::to_string(params.input_size()) + ", got " +
                            std::to_string(x.rows()));
  }
  if (params.flat.size() != MlpParamCount(params.sizes)) {
    throw DimensionMismatch("MLP parameter vector has the wrong length");
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < params.num_layers(); ++l) {
    const int in = params.sizes[l];
    const int out = params.sizes[l + 1];
    const int offset = LayerOffset(params.sizes, l);
    ConstMatrixMap w(params.flat.data() + offset, out, in);
    Eigen::Map<const Eigen::VectorXd> b(params.flat.data() + offset + out * in,
                                        out);
    Eigen::MatrixXd pre = w * h;
    pre.colwise() += b;
    if (cache != nullptr) {
      cache->inputs.push_back(h);
      cache->pre.push_back(pre);
    }
    h = (l + 1 == params.num_layers()) ? pre : EluMatrix(pre);
  }
  return h;
}

Eigen::VectorXd MlpBackward(const MlpParams& params, const MlpCache& cache,
                            const Eigen::MatrixXd& dy) {
  const int layers = params.num_layers();
  if (static_cast<int>(cache.pre.size()) != layers) {
    throw DimensionMismatch("MLP cache does not match the network");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.flat.size());
  Eigen::MatrixXd delta = dy;  // d/d(pre-activation) of the current layer
  for (int l = layers - 1; l >= 0; --l) {
    const int in = params.sizes[l];
    const int out = params.sizes[l + 1];
    const int offset = LayerOffset(params.sizes, l);
    MatrixMap gw(grad.data() + offset, out, in);
    gw.noalias() = delta * cache.inputs[l].transpose();
    grad.segment(offset + out * in, out) = delta.rowwise().sum();
    if (l == 0) break;
    ConstMatrixMap w(params.flat.data() + offset, out, in);
    Eigen::MatrixXd d_input = w.transpose() * delta;
    const Eigen::MatrixXd& pre = cache.pre[l - 1];
    delta = d_input.cwiseProduct(
        pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); }));
  }
  return grad;
}

void ValidateNetworkConfig(const NetworkConfig& config) {
  if (config.hidden.empty()) throw InvalidParams("need at least 1 hidden layer");
  for (int h : config.hidden) {
    if (h < 1) throw InvalidParams("hidden layer sizes must be >= 1");
  }
  if (!std::isfinite(config.log_std_init)) {
    throw InvalidParams("log_std_init must be finite");
  }
  if (!(config.actor_output_gain > 0.0 && config.critic_output_gain > 0.0)) {
    throw InvalidParams("output gains must be > 0");
  }
}

PolicyState MakePolicy(int obs_size, int action_size,
                       const NetworkConfig& config, double learning_rate,
                       std::mt19937_64& rng) {
  ValidateNetworkConfig(config);
  std::vector<int> actor_sizes = {obs_size};
  actor_sizes.insert(actor_sizes.end(), config.hidden.begin(),
                     config.hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(action_size);
  critic_sizes.push_back(1);
  PolicyState p;
  p.actor = MakeMlp(actor_sizes, rng, config.actor_output_gain);
  p.critic = MakeMlp(critic_sizes, rng, config.critic_output_gain);
  p.log_std = Eigen::VectorXd::Constant(action_size, config.log_std_init);
  p.learning_rate = learning_rate;
  return p;
}

double GaussianLogProb(const Eigen::VectorXd& action,
                       const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& log_std) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp -= 0.5 * z * z + log_std[i] + kHalfLog2Pi;
  }
  return lp;
}

double GaussianEntropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + static_cast<double>(log_std.size()) * (kHalfLog2Pi + 0.5);
}

ActionSample SampleGaussian(const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& log_std,
                            std::mt19937_64& rng, bool deterministic) {
  ActionSample s;
  s.action = mean;
  if (!deterministic) {
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      s.action[i] +=
          std::exp(log_std[i]) * std::normal_distribution<double>(0.0, 1.0)(rng);
    }
  }
  s.log_prob = GaussianLogProb(s.action, mean, log_std);
  return s;
}

ActionSample PolicySample(const PolicyState& policy, const Eigen::VectorXd& obs,
                          std::mt19937_64& rng, bool deterministic) {
  return SampleGaussian(MlpForward(policy.actor, obs), policy.log_std, rng,
                        deterministic);
}

GaeResult Gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
              const Eigen::VectorXd& dones, double bootstrap_value,
              double gamma, double lambda) {
  const Eigen::Index n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw DimensionMismatch("GAE inputs must have equal lengths");
  }
  GaeResult out;
  out.advantages.resize(n);
  double next_value = bootstrap_value;
  double next_advantage = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double live = 1.0 - dones[t];
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    next_advantage = delta + gamma * lambda * live * next_advantage;
    out.advantages[t] = next_advantage;
    next_value = values[t];
  }
  out.returns = out.advantages + values;
  return out;
}

Eigen::VectorXd NormalizeAdvantages(const Eigen::VectorXd& a) {
  if (a.size() == 0) return a;
  const double mean = a.mean();
  const Eigen::VectorXd centered = a.array() - mean;
  const double var =
      a.size() > 1 ? centered.squaredNorm() / static_cast<double>(a.size() - 1)
                   : 0.0;
  return centered / (std::sqrt(var) + 1e-8);
}

void ValidatePpoConfig(const PpoConfig& c) {
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw InvalidParams("gamma must be in [0, 1]");
  if (!(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0)) {
    throw InvalidParams("gae_lambda must be in [0, 1]");
  }
  if (!(c.clip > 0.0)) throw InvalidParams("clip must be > 0");
  if (c.epochs < 1) throw InvalidParams("epochs must be >= 1");
  if (c.minibatches < 1) throw InvalidParams("minibatches must be >= 1");
  if (!(c.entropy_coef >= 0.0 && c.value_coef >= 0.0)) {
    throw InvalidParams("loss coefficients must be >= 0");
  }
  if (!(c.desired_kl > 0.0)) throw InvalidParams("desired_kl must be > 0");
  if (!(c.max_grad_norm >= 0.0)) throw InvalidParams("max_grad_norm must be >= 0");
  if (!(c.lr_min > 0.0 && c.lr_min <= c.learning_rate &&
        c.learning_rate <= c.lr_max)) {
    throw InvalidParams("learning rate must satisfy 0 < lr_min <= lr <= lr_max");
  }
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0 && c.adam_beta2 >= 0.0 &&
        c.adam_beta2 < 1.0 && c.adam_eps > 0.0)) {
    throw InvalidParams("invalid Adam constants");
  }
}

double AdaptiveLr(double lr, double approx_kl, double desired_kl, double lr_min,
                  double lr_max) {
  if (!(lr > 0.0)) throw InvalidParams("learning rate must be > 0");
  if (approx_kl > 2.0 * desired_kl) {
    lr /= 1.5;
  } else if (approx_kl < 0.5 * desired_kl) {
    lr *= 1.5;
  }
  return std::clamp(lr, lr_min, lr_max);
}

void RolloutBuffer::Resize(int n_envs, int steps, int obs_size,
                           int action_size) {
  num_envs = n_envs;
  horizon = steps;
  const int n = n_envs * steps;
  observations.setZero(obs_size, n);
  actions.setZero(action_size, n);
  log_probs.setZero(n);
  values.setZero(n);
  rewards.setZero(n);
  dones.setZero(n);
  bootstrap_values.setZero(n_envs);
  advantages.setZero(n);
  returns.setZero(n);
}

void ComputeAdvantages(RolloutBuffer& buffer, double gamma, double lambda) {
  const int h = buffer.horizon;
  Eigen::VectorXd r(h), v(h), d(h);
  for (int e = 0; e < buffer.num_envs; ++e) {
    for (int t = 0; t < h; ++t) {
      const int i = buffer.Index(t, e);
      r[t] = buffer.rewards[i];
      v[t] = buffer.values[i];
      d[t] = buffer.dones[i];
    }
    const GaeResult g = Gae(r, v, d, buffer.bootstrap_values[e], gamma, lambda);
    for (int t = 0; t < h; ++t) {
      const int i = buffer.Index(t, e);
      buffer.advantages[i] = g.advantages[t];
      buffer.returns[i] = g.returns[t];
    }
  }
  buffer.advantages = NormalizeAdvantages(buffer.advantages);
}

Eigen::VectorXd PackPolicy(const PolicyState& policy) {
  Eigen::VectorXd packed(policy.actor.flat.size() + policy.critic.flat.size() +
                         policy.log_std.size());
  packed << policy.actor.flat, policy.critic.flat, policy.log_std;
  return packed;
}

void UnpackPolicy(const Eigen::VectorXd& packed, PolicyState& policy) {
  const Eigen::Index a = policy.actor.flat.size();
  const Eigen::Index c = policy.critic.flat.size();
  const Eigen::Index s = policy.log_std.size();
  if (packed.size() != a + c + s) {
    throw DimensionMismatch("packed parameter vector has the wrong length");
  }
  policy.actor.flat = packed.head(a);
  policy.critic.flat = packed.segment(a, c);
  policy.log_std = packed.tail(s);
}

void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
              AdamState& state, double lr, const PpoConfig& config) {
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.m = b1 * state.m + (1.0 - b1) * grad;
  state.v = b2 * state.v + (1.0 - b2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + config.adam_eps);
}

PpoLoss EvaluatePpoLoss(const PolicyState& policy, const RolloutBuffer& buffer,
                        const std::vector<int>& indices,
                        const PpoConfig& config, bool with_grad) {
  const int m = static_cast<int>(indices.size());
  if (m == 0) throw InvalidParams("empty minibatch");
  const int obs_size = static_cast<int>(buffer.observations.rows());
  const int act_size = static_cast<int>(buffer.actions.rows());
  Eigen::MatrixXd obs(obs_size, m);
  Eigen::MatrixXd act(act_size, m);
  for (int k = 0; k < m; ++k) {
    obs.col(k) = buffer.observations.col(indices[k]);
    act.col(k) = buffer.actions.col(indices[k]);
  }
  MlpCache actor_cache;
  MlpCache critic_cache;
  const Eigen::MatrixXd mean = MlpForwardBatch(
      policy.actor, obs, with_grad ? &actor_cache : nullptr);
  const Eigen::MatrixXd value = MlpForwardBatch(
      policy.critic, obs, with_grad ? &critic_cache : nullptr);
  const Eigen::VectorXd inv_var = (-2.0 * policy.log_std).array().exp();

  PpoLoss loss;
  Eigen::MatrixXd d_mean(act_size, m);
  Eigen::MatrixXd d_value(1, m);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(act_size);
  const double inv_m = 1.0 / m;
  int clipped = 0;
  for (int k = 0; k < m; ++k) {
    const int i = indices[k];
    const double adv = buffer.advantages[i];
    const Eigen::VectorXd diff = act.col(k) - mean.col(k);
    const double logp = GaussianLogProb(act.col(k), mean.col(k), policy.log_std);
    const double ratio = std::exp(logp - buffer.log_probs[i]);
    const double clamped = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
    const double unclipped_obj = ratio * adv;
    const double clipped_obj = clamped * adv;
    const bool use_unclipped = unclipped_obj <= clipped_obj;
    loss.policy_loss -= inv_m * std::min(unclipped_obj, clipped_obj);
    if (clamped != ratio) ++clipped;
    const double err = value(0, k) - buffer.returns[i];
    loss.value_loss += inv_m * err * err;
    if (with_grad) {
      // d(policy loss)/d(log prob); zero where the clipped branch is active.
      const double g = use_unclipped ? -inv_m * ratio * adv : 0.0;
      d_mean.col(k) = g * diff.cwiseProduct(inv_var);
      d_log_std += g * (diff.cwiseAbs2().cwiseProduct(inv_var).array() - 1.0)
                           .matrix();
      d_value(0, k) = config.value_coef * 2.0 * inv_m * err;
    }
  }
  loss.entropy = GaussianEntropy(policy.log_std);
  loss.clip_fraction = static_cast<double>(clipped) * inv_m;
  loss.total = loss.policy_loss + config.value_coef * loss.value_loss -
               config.entropy_coef * loss.entropy;
  if (with_grad) {
    d_log_std.array() -= config.entropy_coef;
    const Eigen::Index a = policy.actor.flat.size();
    const Eigen::Index c = policy.critic.flat.size();
    loss.grad.resize(a + c + act_size);
    loss.grad.head(a) = MlpBackward(policy.actor, actor_cache, d_mean);
    loss.grad.segment(a, c) = MlpBackward(policy.critic, critic_cache, d_value);
    loss.grad.tail(act_size) = d_log_std;
  }
  return loss;
}

double ApproxKl(const PolicyState& policy, const RolloutBuffer& buffer) {
  const Eigen::MatrixXd mean = MlpForwardBatch(policy.actor, buffer.observations);
  double kl = 0.0;
  const int n = buffer.size();
  for (int i = 0; i < n; ++i) {
    const double log_ratio =
        GaussianLogProb(buffer.actions.col(i), mean.col(i), policy.log_std) -
        buffer.log_probs[i];
    kl += std::expm1(log_ratio) - log_ratio;
  }
  return n > 0 ? kl / n : 0.0;
}

UpdateStats PpoUpdate(PolicyState& policy, AdamState& adam,
                      const RolloutBuffer& buffer, const PpoConfig& config,
                      std::mt19937_64& rng) {
  const int n = buffer.size();
  if (n == 0) throw InvalidParams("rollout buffer is empty");
  const int batches = std::min(config.minibatches, n);
  std::vector<int> order(n);
  UpdateStats stats;
  int steps = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int b = 0; b < batches; ++b) {
      const auto first = order.begin() + static_cast<long>(b) * n / batches;
      const auto last = order.begin() + static_cast<long>(b + 1) * n / batches;
      const std::vector<int> indices(first, last);
      PpoLoss loss = EvaluatePpoLoss(policy, buffer, indices, config, true);
      const int minibatch = epoch * batches + b;
      if (!std::isfinite(loss.total) || !loss.grad.allFinite()) {
        throw NonFiniteLoss("non-finite PPO loss in epoch " +
                                std::to_string(epoch) + ", minibatch " +
                                std::to_string(b),
                            minibatch);
      }
      if (config.max_grad_norm > 0.0) {
        const double norm = loss.grad.norm();
        if (norm > config.max_grad_norm) loss.grad *= config.max_grad_norm / norm;
      }
      Eigen::VectorXd packed = PackPolicy(policy);
      AdamStep(packed, loss.grad, adam, policy.learning_rate, config);
      UnpackPolicy(packed, policy);
      stats.policy_loss += loss.policy_loss;
      stats.value_loss += loss.value_loss;
      stats.entropy += loss.entropy;
      stats.clip_fraction += loss.clip_fraction;
      ++steps;
    }
    stats.approx_kl = ApproxKl(policy, buffer);
    if (!std::isfinite(stats.approx_kl)) {
      throw NonFiniteLoss("non-finite KL estimate after epoch " +
                              std::to_string(epoch),
                          (epoch + 1) * batches - 1);
    }
    if (config.adaptive_lr) {
      policy.learning_rate = AdaptiveLr(policy.learning_rate, stats.approx_kl,
                                        config.desired_kl, config.lr_min,
                                        config.lr_max);
    }
  }
  stats.policy_loss /= steps;
  stats.value_loss /= steps;
  stats.entropy /= steps;
  stats.clip_fraction /= steps;
  stats.learning_rate = policy.learning_rate;
  return stats;
}

}  // namespace synloco
