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

#ifndef SYNLOCO_RL_H_
#define SYNLOCO_RL_H_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace synloco {

// Fully connected network stored as one flat parameter vector. Layer l
// occupies W_l (out x in, column-major) followed by b_l. Hidden layers use
// ELU, the output layer is linear.
struct MlpParams {
  std::vector<int> sizes;  // input, hidden..., output
  Eigen::VectorXd flat;

  int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
};

int MlpParamCount(const std::vector<int>& sizes);

// Gaussian weights with std gain/sqrt(fan_in): gain sqrt(2) on hidden
// layers, `output_gain` on the last one. Biases start at zero.
MlpParams MakeMlp(const std::vector<int>& sizes, std::mt19937_64& rng,
                  double output_gain);

double Elu(double x);

Eigen::VectorXd MlpForward(const MlpParams& params, const Eigen::VectorXd& x);

// Activations kept from a batched forward pass, one column per sample.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;  // input of each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
};

Eigen::MatrixXd MlpForwardBatch(const MlpParams& params,
                                const Eigen::MatrixXd& x,
                                MlpCache* cache = nullptr);

// Gradient of sum_ij dy(i, j) * y(i, j) with respect to the flat
// parameters, given the cache of the forward pass that produced y.
Eigen::VectorXd MlpBackward(const MlpParams& params, const MlpCache& cache,
                            const Eigen::MatrixXd& dy);

struct NetworkConfig {
  std::vector<int> hidden = {512, 256, 128};
  double log_std_init = -1.0;
  double actor_output_gain = 0.01;
  double critic_output_gain = 1.0;
};

void ValidateNetworkConfig(const NetworkConfig& config);

// Diagonal Gaussian actor with a state-independent log std, plus critic.
struct PolicyState {
  MlpParams actor;
  MlpParams critic;
  Eigen::VectorXd log_std;
  double learning_rate = 1e-3;
};

PolicyState MakePolicy(int obs_size, int action_size,
                       const NetworkConfig& config, double learning_rate,
                       std::mt19937_64& rng);

double GaussianLogProb(const Eigen::VectorXd& action,
                       const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& log_std);
double GaussianEntropy(const Eigen::VectorXd& log_std);

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

// Draws mean + exp(log_std) * N(0, 1); deterministic mode returns the mean.
ActionSample SampleGaussian(const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& log_std,
                            std::mt19937_64& rng, bool deterministic);

ActionSample PolicySample(const PolicyState& policy, const Eigen::VectorXd& obs,
                          std::mt19937_64& rng, bool deterministic);

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

// One environment's trajectory. dones[t] = 1 when the episode ended at step
// t, in which case the value of the next entry is not bootstrapped.
GaeResult Gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
              const Eigen::VectorXd& dones, double bootstrap_value,
              double gamma, double lambda);

// Shifts and scales to zero mean and unit variance.
Eigen::VectorXd NormalizeAdvantages(const Eigen::VectorXd& a);

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double desired_kl = 0.01;
  int epochs = 5;
  int minibatches = 4;
  double value_coef = 1.0;
  double max_grad_norm = 0.0;  // 0 disables clipping
  double learning_rate = 1e-3;
  double lr_min = 1e-6;
  double lr_max = 1e-2;
  bool adaptive_lr = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

void ValidatePpoConfig(const PpoConfig& config);

// lr / 1.5 above twice the target KL, lr * 1.5 below half of it, clamped.
double AdaptiveLr(double lr, double approx_kl, double desired_kl,
                  double lr_min = 1e-6, double lr_max = 1e-2);

// Transitions of n_envs environments over `horizon` steps. Column
// t * num_envs + e holds step t of environment e.
struct RolloutBuffer {
  int num_envs = 0;
  int horizon = 0;
  Eigen::MatrixXd observations;
  Eigen::MatrixXd actions;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;
  Eigen::VectorXd dones;
  Eigen::VectorXd bootstrap_values;  // per environment
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  void Resize(int n_envs, int steps, int obs_size, int action_size);
  int size() const { return num_envs * horizon; }
  int Index(int step, int env) const { return step * num_envs + env; }
};

// Fills advantages (normalized) and returns for every environment.
void ComputeAdvantages(RolloutBuffer& buffer, double gamma, double lambda);

// Adam state over the packed parameters (actor, critic, log_std).
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int64_t step = 0;
};

Eigen::VectorXd PackPolicy(const PolicyState& policy);
void UnpackPolicy(const Eigen::VectorXd& packed, PolicyState& policy);

void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
              AdamState& state, double lr, const PpoConfig& config);

struct PpoLoss {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
  Eigen::VectorXd grad;  // d total / d packed parameters
};

// Clipped surrogate, value and entropy terms on the samples `indices`;
// the buffer must already carry advantages and returns.
PpoLoss EvaluatePpoLoss(const PolicyState& policy, const RolloutBuffer& buffer,
                        const std::vector<int>& indices,
                        const PpoConfig& config, bool with_grad);

// Mean of (r - 1) - log r over the buffer, r = pi_new / pi_old.
double ApproxKl(const PolicyState& policy, const RolloutBuffer& buffer);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double learning_rate = 0.0;
};

// Epochs of shuffled minibatch steps; the learning rate adapts after each
// epoch. Throws NonFiniteLoss naming the minibatch if a loss is not finite.
UpdateStats PpoUpdate(PolicyState& policy, AdamState& adam,
                      const RolloutBuffer& buffer, const PpoConfig& config,
                      std::mt19937_64& rng);

}  // namespace synloco

#endif  // SYNLOCO_RL_H_
