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

#include "synloco/trainer.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "synloco/errors.h"

namespace synloco {

void ValidateTrainConfig(const TrainConfig& c) {
  if (c.num_envs < 1) throw InvalidParams("num_envs must be >= 1");
  if (c.horizon < 1) throw InvalidParams("horizon must be >= 1");
  if (c.iterations < 0) throw InvalidParams("iterations must be >= 0");
  if (c.checkpoint_every < 0) throw InvalidParams("checkpoint_every must be >= 0");
  if (c.workers < 1) throw InvalidParams("workers must be >= 1");
}

std::string MetricsCsvHeader() {
  std::string h = "iteration,mean_reward";
  for (int k = 0; k < kNumRewardTerms; ++k) {
    h += ",";
    h += RewardTermName(k);
  }
  h += ",tracking_fraction,mean_episode_length,episodes,collisions,"
       "policy_loss,value_loss,entropy,approx_kl,clip_fraction,learning_rate,"
       "impulse_interval,impulse_cap,tracking_ema";
  return h;
}

std::string MetricsCsvRow(const IterationMetrics& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.iteration << ',' << m.mean_reward;
  for (double v : m.term_means) out << ',' << v;
  out << ',' << m.tracking_fraction << ',' << m.mean_episode_length << ','
      << m.episodes << ',' << m.collisions << ',' << m.update.policy_loss << ','
      << m.update.value_loss << ',' << m.update.entropy << ','
      << m.update.approx_kl << ',' << m.update.clip_fraction << ','
      << m.update.learning_rate << ',' << m.curriculum.impulse_interval << ','
      << m.curriculum.impulse_mag_cap << ','
      << m.curriculum.tracking_reward_ema;
  return out.str();
}

Trainer::Trainer(std::shared_ptr<const EnvConfig> env_config,
                 std::shared_ptr<const GaitPlannerModel> planner,
                 const NetworkConfig& network, const PpoConfig& ppo,
                 const CurriculumConfig& curriculum, const TrainConfig& train,
                 uint64_t seed)
    : env_config_(std::move(env_config)),
      planner_(std::move(planner)),
      ppo_(ppo),
      curriculum_config_(curriculum),
      train_(train),
      update_rng_(MakeStreamRng(seed, 0xffffffffu)) {
  ValidateEnvConfig(*env_config_);
  ValidatePpoConfig(ppo_);
  ValidateCurriculumConfig(curriculum_config_);
  ValidateTrainConfig(train_);
  ValidateGaitPlannerModel(*planner_);
  Rng init_rng = MakeStreamRng(seed, 0xfffffffeu);
  policy_ = MakePolicy(kObservationSize, kNumJoints, network,
                       ppo_.learning_rate, init_rng);
  curriculum_ = InitialCurriculum(env_config_->dr, curriculum_config_);
  envs_.reserve(train_.num_envs);
  for (int e = 0; e < train_.num_envs; ++e) {
    envs_.emplace_back(env_config_, planner_, MakeStreamRng(seed, e));
    envs_.back().Reset(curriculum_);
  }
}

IterationMetrics Trainer::RunIteration() {
  RolloutBuffer buffer;
  const RolloutStats stats = CollectRollouts(envs_, policy_, curriculum_,
                                             train_.horizon, train_.workers,
                                             buffer);
  ComputeAdvantages(buffer, ppo_.gamma, ppo_.gae_lambda);
  IterationMetrics m;
  m.update = PpoUpdate(policy_, adam_, buffer, ppo_, update_rng_);
  const double steps = static_cast<double>(stats.steps);
  m.iteration = iteration_;
  m.mean_reward = stats.total_sum / steps;
  for (int k = 0; k < kNumRewardTerms; ++k) {
    m.term_means[k] = stats.weighted_sum[k] / steps;
  }
  m.tracking_fraction = stats.TrackingFraction();
  m.episodes = stats.episodes;
  m.collisions = stats.collisions;
  m.mean_episode_length =
      stats.episodes > 0 ? static_cast<double>(stats.episode_steps_sum) /
                               static_cast<double>(stats.episodes)
                         : 0.0;
  curriculum_ = CurriculumUpdate(curriculum_,
                                 std::clamp(m.tracking_fraction, 0.0, 1.0),
                                 curriculum_config_);
  m.curriculum = curriculum_;
  ++iteration_;
  return m;
}

// Binary checkpoint layout: magic, version, then length-prefixed fields in
// a fixed order. Doubles are stored as their in-memory bytes.
namespace {

constexpr char kMagic[8] = {'S', 'Y', 'N', 'L', 'C', 'K', 'P', 'T'};
constexpr uint32_t kCheckpointVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void Pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void Str(const std::string& s) {
    Pod<uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <typename Derived>
  void Vec(const Eigen::MatrixBase<Derived>& v) {
    Pod<uint64_t>(static_cast<uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) Pod<double>(v(i));
  }
  void Quat(const Eigen::Quaterniond& q) {
    Pod(q.w());
    Pod(q.x());
    Pod(q.y());
    Pod(q.z());
  }
  void Ints(const std::vector<int>& v) {
    Pod<uint64_t>(v.size());
    for (int x : v) Pod<int32_t>(x);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}
  template <typename T>
  T Pod() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw CheckpointError(path_ + ": truncated checkpoint");
    return v;
  }
  std::string Str() {
    const uint64_t n = Length();
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw CheckpointError(path_ + ": truncated checkpoint");
    return s;
  }
  Eigen::VectorXd Vec() {
    const uint64_t n = Length();
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (uint64_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = Pod<double>();
    return v;
  }
  template <int N>
  Eigen::Matrix<double, N, 1> Fixed() {
    const Eigen::VectorXd v = Vec();
    if (v.size() != N) throw CheckpointError(path_ + ": field has wrong size");
    return v;
  }
  Eigen::Quaterniond Quat() {
    const double w = Pod<double>();
    const double x = Pod<double>();
    const double y = Pod<double>();
    const double z = Pod<double>();
    return Eigen::Quaterniond(w, x, y, z);
  }
  std::vector<int> Ints() {
    const uint64_t n = Length();
    std::vector<int> v(n);
    for (auto& x : v) x = Pod<int32_t>();
    return v;
  }

 private:
  uint64_t Length() {
    const uint64_t n = Pod<uint64_t>();
    if (n > (uint64_t{1} << 34)) throw CheckpointError(path_ + ": corrupt length");
    return n;
  }
  std::istream& in_;
  std::string path_;
};

void WritePolicy(Writer& w, const PolicyState& p) {
  w.Ints(p.actor.sizes);
  w.Vec(p.actor.flat);
  w.Ints(p.critic.sizes);
  w.Vec(p.critic.flat);
  w.Vec(p.log_std);
  w.Pod(p.learning_rate);
}

PolicyState ReadPolicy(Reader& r, const std::string& path) {
  PolicyState p;
  p.actor.sizes = r.Ints();
  p.actor.flat = r.Vec();
  p.critic.sizes = r.Ints();
  p.critic.flat = r.Vec();
  p.log_std = r.Vec();
  p.learning_rate = r.Pod<double>();
  if (p.actor.sizes.size() < 2 || p.critic.sizes.size() < 2 ||
      p.actor.flat.size() != MlpParamCount(p.actor.sizes) ||
      p.critic.flat.size() != MlpParamCount(p.critic.sizes) ||
      p.log_std.size() != p.actor.output_size()) {
    throw CheckpointError(path + ": inconsistent policy dimensions");
  }
  return p;
}

void WriteRng(Writer& w, const Rng& rng) {
  std::ostringstream s;
  s << rng;
  w.Str(s.str());
}

Rng ReadRng(Reader& r, const std::string& path) {
  std::istringstream s(r.Str());
  Rng rng;
  s >> rng;
  if (!s) throw CheckpointError(path + ": bad random generator state");
  return rng;
}

void WriteEnvParams(Writer& w, const EnvParams& p) {
  w.Pod(p.trunk_mass);
  w.Vec(p.trunk_inertia);
  w.Pod(p.friction);
  w.Pod(p.contact_stiffness);
  w.Pod(p.contact_damping);
  w.Pod(p.tangential_gain);
  w.Pod(p.gravity);
  w.Pod<int32_t>(static_cast<int32_t>(p.terrain.kind));
  w.Pod(p.terrain.angle);
}

EnvParams ReadEnvParams(Reader& r) {
  EnvParams p;
  p.trunk_mass = r.Pod<double>();
  p.trunk_inertia = r.Fixed<3>();
  p.friction = r.Pod<double>();
  p.contact_stiffness = r.Pod<double>();
  p.contact_damping = r.Pod<double>();
  p.tangential_gain = r.Pod<double>();
  p.gravity = r.Pod<double>();
  p.terrain.kind = static_cast<Terrain::Kind>(r.Pod<int32_t>());
  p.terrain.angle = r.Pod<double>();
  return p;
}

void WriteRobotState(Writer& w, const RobotState& s) {
  w.Vec(s.trunk.position);
  w.Quat(s.trunk.orientation);
  w.Vec(s.trunk.linear_velocity);
  w.Vec(s.trunk.angular_velocity);
  w.Vec(s.q);
  w.Vec(s.qdot);
  w.Vec(s.filter_mem);
  for (int l = 0; l < kNumLegs; ++l) {
    w.Pod<uint8_t>(s.contacts[l]);
    w.Pod(s.air_time[l]);
    w.Vec(s.contact_forces[l]);
    w.Pod<uint8_t>(s.touchdown[l]);
    w.Pod(s.touchdown_air_time[l]);
  }
  w.Pod(s.episode_time);
}

RobotState ReadRobotState(Reader& r) {
  RobotState s;
  s.trunk.position = r.Fixed<3>();
  s.trunk.orientation = r.Quat();
  s.trunk.linear_velocity = r.Fixed<3>();
  s.trunk.angular_velocity = r.Fixed<3>();
  s.q = r.Fixed<kNumJoints>();
  s.qdot = r.Fixed<kNumJoints>();
  s.filter_mem = r.Fixed<kNumJoints>();
  for (int l = 0; l < kNumLegs; ++l) {
    s.contacts[l] = r.Pod<uint8_t>() != 0;
    s.air_time[l] = r.Pod<double>();
    s.contact_forces[l] = r.Fixed<3>();
    s.touchdown[l] = r.Pod<uint8_t>() != 0;
    s.touchdown_air_time[l] = r.Pod<double>();
  }
  s.episode_time = r.Pod<double>();
  return s;
}

void CheckMagic(Reader& r, const std::string& path) {
  char magic[sizeof(kMagic)];
  for (char& c : magic) c = r.Pod<char>();
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(path + " is not a checkpoint");
  }
  if (r.Pod<uint32_t>() != kCheckpointVersion) {
    throw CheckpointError(path + ": unsupported checkpoint version");
  }
}

}  // namespace

void Trainer::SaveCheckpoint(const std::string& path,
                             const std::string& header) const {
  // Written to a temporary name first so an interrupted save never replaces
  // a good checkpoint with a partial one.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp);
    Writer w(out);
    for (char c : kMagic) w.Pod(c);
    w.Pod(kCheckpointVersion);
    w.Str(header);
    w.Pod<int32_t>(iteration_);
    WritePolicy(w, policy_);
    w.Vec(adam_.m);
    w.Vec(adam_.v);
    w.Pod<int64_t>(adam_.step);
    w.Pod(curriculum_.impulse_interval);
    w.Pod(curriculum_.impulse_mag_cap);
    w.Pod(curriculum_.tracking_reward_ema);
    WriteRng(w, update_rng_);
    w.Pod<uint64_t>(envs_.size());
    for (const auto& env : envs_) {
      const LocomotionEnv::Snapshot s = env.Save();
      WriteRobotState(w, s.state);
      WriteEnvParams(w, s.params);
      w.Pod(s.planner.o0);
      w.Pod(s.planner.o1);
      w.Pod(s.command.vx);
      w.Pod(s.command.vy);
      w.Pod(s.command.wz);
      w.Pod<uint8_t>(s.command_fixed);
      w.Vec(s.last_action);
      w.Pod<int64_t>(s.episode_steps);
      w.Vec(s.observation);
      WriteRng(w, s.rng);
    }
    out.flush();
    if (!out) throw CheckpointError("failed writing checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw CheckpointError("cannot move checkpoint into place at " + path);
  }
}

void Trainer::LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  Reader r(in, path);
  CheckMagic(r, path);
  r.Str();  // header, checked by the caller
  iteration_ = r.Pod<int32_t>();
  PolicyState policy = ReadPolicy(r, path);
  if (policy.actor.sizes != policy_.actor.sizes ||
      policy.critic.sizes != policy_.critic.sizes) {
    throw CheckpointError(path + ": network shape differs from the config");
  }
  policy_ = std::move(policy);
  adam_.m = r.Vec();
  adam_.v = r.Vec();
  adam_.step = r.Pod<int64_t>();
  curriculum_.impulse_interval = r.Pod<double>();
  curriculum_.impulse_mag_cap = r.Pod<double>();
  curriculum_.tracking_reward_ema = r.Pod<double>();
  update_rng_ = ReadRng(r, path);
  if (r.Pod<uint64_t>() != envs_.size()) {
    throw CheckpointError(path + ": environment count differs from the config");
  }
  for (auto& env : envs_) {
    LocomotionEnv::Snapshot s;
    s.state = ReadRobotState(r);
    s.params = ReadEnvParams(r);
    s.planner.o0 = r.Pod<double>();
    s.planner.o1 = r.Pod<double>();
    s.command.vx = r.Pod<double>();
    s.command.vy = r.Pod<double>();
    s.command.wz = r.Pod<double>();
    s.command_fixed = r.Pod<uint8_t>() != 0;
    s.last_action = r.Fixed<kNumJoints>();
    s.episode_steps = r.Pod<int64_t>();
    s.observation = r.Fixed<kObservationSize>();
    s.rng = ReadRng(r, path);
    env.Restore(s);
  }
}

CheckpointContents ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  Reader r(in, path);
  CheckMagic(r, path);
  CheckpointContents c;
  c.header = r.Str();
  c.iteration = r.Pod<int32_t>();
  c.policy = ReadPolicy(r, path);
  return c;
}

}  // namespace synloco
