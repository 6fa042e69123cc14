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

#include "synloco/config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "synloco/errors.h"

namespace synloco {
namespace {

using nlohmann::json;

// Each struct lists its fields once; the same list drives reading and
// writing so the two cannot drift apart.
template <class V> void Fields(V& v, OscillatorParams& p) {
  v("phi", p.phi);
  v("alpha", p.alpha);
  v("tick_rate", p.tick_rate);
}
template <class V> void Fields(V& v, PlannerConfig& p) {
  Fields(v, p.oscillator);
  v("num_centers", p.num_centers);
  v("rbf_sigma", p.rbf_sigma);
  v("burn_in_ticks", p.burn_in_ticks);
}
template <class V> void Fields(V& v, DemoTrotParams& p) {
  v("frequency", p.frequency);
  v("clearance_front", p.clearance_front);
  v("clearance_rear", p.clearance_rear);
  v("step_length", p.step_length);
  v("stance_fraction", p.stance_fraction);
  v("sample_rate", p.sample_rate);
  v("stand_height", p.stand_height);
  v("num_periods", p.num_periods);
}
template <class V> void Fields(V& v, FitOptions& p) {
  v("ridge", p.ridge);
  v("refine_steps", p.refine_steps);
  v("refine_step_size", p.refine_step_size);
  v("train_fraction", p.train_fraction);
}
template <class V> void Fields(V& v, DemoConfig& p) {
  v("source", p.source);
  v("csv_gait_frequency", p.csv_gait_frequency);
  v("trot", p.trot);
  v("fit", p.fit);
}
template <class V> void Fields(V& v, JointLimits& p) {
  v("lower", p.lower);
  v("upper", p.upper);
}
template <class V> void Fields(V& v, RobotGeometry& p) {
  v("hip_offset", p.hip_offset);
  v("thigh_length", p.thigh_length);
  v("calf_length", p.calf_length);
  v("hip_mount_x", p.hip_mount_x);
  v("hip_mount_y", p.hip_mount_y);
  v("joint_limits", p.limits);
}
template <class V> void Fields(V& v, SimConfig& p) {
  v("dt", p.dt);
  v("kp", p.kp);
  v("kd", p.kd);
  v("torque_limit", p.torque_limit);
  v("reflected_inertia", p.reflected_inertia);
  v("trunk_half_extents", p.trunk_half_extents);
  v("collision_margin", p.collision_margin);
  v("max_episode_time", p.max_episode_time);
  v("divergence_limit", p.divergence_limit);
  v("foot_collision_distance", p.foot_collision_distance);
}
template <class V> void Fields(V& v, Terrain& p) {
  v("kind", p.kind);
  v("angle", p.angle);
}
template <class V> void Fields(V& v, EnvParams& p) {
  v("trunk_mass", p.trunk_mass);
  v("trunk_inertia", p.trunk_inertia);
  v("friction", p.friction);
  v("contact_stiffness", p.contact_stiffness);
  v("contact_damping", p.contact_damping);
  v("tangential_gain", p.tangential_gain);
  v("gravity", p.gravity);
}
template <class V> void Fields(V& v, RewardWeights& p) {
  v("weights", p.weight);
  v("tracking_sigma", p.tracking_sigma);
  v("height_sigma", p.height_sigma);
  v("foot_position_sigma", p.foot_position_sigma);
  v("air_time_target", p.air_time_target);
  v("target_height", p.target_height);
  v("collision_distance", p.collision_distance);
}
template <class V> void Fields(V& v, ObservationScales& p) {
  v("linear_command", p.linear_command);
  v("angular", p.angular);
  v("joint_velocity", p.joint_velocity);
}
template <class V> void Fields(V& v, RandomizationConfig& p) {
  v("mass_offset", p.mass_offset);
  v("friction", p.friction);
  v("impulse_magnitude", p.impulse_magnitude);
  v("impulse_interval", p.impulse_interval);
  v("angular_velocity_noise", p.angular_velocity_noise);
  v("gravity_noise", p.gravity_noise);
  v("joint_position_noise", p.joint_position_noise);
  v("joint_velocity_noise", p.joint_velocity_noise);
}
template <class V> void Fields(V& v, CommandConfig& p) {
  v("vx", p.vx);
  v("vy", p.vy);
  v("wz", p.wz);
  v("resample_interval", p.resample_interval);
}
template <class V> void Fields(V& v, CurriculumConfig& p) {
  v("threshold", p.threshold);
  v("interval_factor", p.interval_factor);
  v("cap_factor", p.cap_factor);
  v("interval_floor", p.interval_floor);
  v("initial_cap", p.initial_cap);
  v("cap_ceiling", p.cap_ceiling);
  v("ema_decay", p.ema_decay);
}
template <class V> void Fields(V& v, NetworkConfig& p) {
  v("hidden", p.hidden);
  v("log_std_init", p.log_std_init);
  v("actor_output_gain", p.actor_output_gain);
  v("critic_output_gain", p.critic_output_gain);
}
template <class V> void Fields(V& v, PpoConfig& p) {
  v("gamma", p.gamma);
  v("gae_lambda", p.gae_lambda);
  v("clip", p.clip);
  v("entropy_coef", p.entropy_coef);
  v("desired_kl", p.desired_kl);
  v("epochs", p.epochs);
  v("minibatches", p.minibatches);
  v("value_coef", p.value_coef);
  v("max_grad_norm", p.max_grad_norm);
  v("learning_rate", p.learning_rate);
  v("lr_min", p.lr_min);
  v("lr_max", p.lr_max);
  v("adaptive_lr", p.adaptive_lr);
  v("adam_beta1", p.adam_beta1);
  v("adam_beta2", p.adam_beta2);
  v("adam_eps", p.adam_eps);
}
template <class V> void Fields(V& v, TrainConfig& p) {
  v("num_envs", p.num_envs);
  v("horizon", p.horizon);
  v("iterations", p.iterations);
  v("checkpoint_every", p.checkpoint_every);
  v("workers", p.workers);
}
template <class V> void Fields(V& v, EvalConfig& p) {
  v("profile", p.profile);
  v("command_vx", p.command_vx);
  v("knots", p.knots);
  v("duration", p.duration);
  v("dynamics_randomization", p.dynamics_randomization);
}
// Environment scalars that do not belong to a nested block.
struct EnvScalars {
  EnvConfig* env;
};
template <class V> void Fields(V& v, EnvScalars& p) {
  v("residual_limit", p.env->residual_limit);
  v("filter_alpha", p.env->filter_alpha);
  v("stand_height", p.env->stand_height);
  v("spawn_height", p.env->spawn_height);
  v("substeps", p.env->substeps);
  v("randomize_dynamics", p.env->randomize_dynamics);
  v("sensor_noise", p.env->sensor_noise);
  v("impulses", p.env->impulses);
}

// Top level. `hashed` limits the visit to the policy-shaping blocks.
template <class V> void Fields(V& v, RunConfig& c, bool hashed) {
  if (!hashed) {
    v("seed", c.seed);
    v("mode", c.mode);
    v("out_dir", c.out_dir);
  }
  v("cpg", c.planner);
  v("demo", c.demo);
  v("robot", c.env.sim.robot);
  v("sim", c.env.sim);
  v("physics", c.env.physics);
  v("terrain", c.env.physics.terrain);
  EnvScalars scalars{&c.env};
  v("env", scalars);
  v("observation", c.env.scales);
  v("reward", c.env.reward);
  v("dr", c.env.dr);
  v("command", c.env.command);
  v("curriculum", c.curriculum);
  v("network", c.network);
  v("ppo", c.ppo);
  v("train", c.train);
  if (!hashed) v("eval", c.eval);
}

template <class T, class = void>
struct HasFields : std::false_type {};
struct Probe {
  template <class U> void operator()(const char*, U&) {}
};
template <class T>
struct HasFields<T, std::void_t<decltype(Fields(std::declval<Probe&>(),
                                                std::declval<T&>()))>>
    : std::true_type {};

class Writer {
 public:
  explicit Writer(json* out) : out_(out) {}

  template <class T> void operator()(const char* key, T& value) {
    (*out_)[key] = Encode(value);
  }

  template <class T> static json Encode(T& value) {
    if constexpr (HasFields<T>::value) {
      json obj = json::object();
      Writer w(&obj);
      Fields(w, value);
      return obj;
    } else {
      return Leaf(value);
    }
  }

 private:
  static json Leaf(double x) { return x; }
  static json Leaf(int x) { return x; }
  static json Leaf(bool x) { return x; }
  static json Leaf(uint64_t x) { return x; }
  static json Leaf(const std::string& x) { return x; }
  static json Leaf(const Range& r) { return json::array({r.low, r.high}); }
  static json Leaf(const Eigen::Vector3d& x) {
    return json::array({x.x(), x.y(), x.z()});
  }
  static json Leaf(const std::vector<int>& x) { return x; }
  static json Leaf(const std::vector<std::pair<double, double>>& x) {
    json a = json::array();
    for (const auto& [t, v] : x) a.push_back(json::array({t, v}));
    return a;
  }
  static json Leaf(const Terrain::Kind& k) {
    return k == Terrain::Kind::kFlat ? "flat" : "slope";
  }
  static json Leaf(const std::array<double, kNumRewardTerms>& w) {
    json obj = json::object();
    for (int k = 0; k < kNumRewardTerms; ++k) {
      obj[std::string(RewardTermName(k))] = w[k];
    }
    return obj;
  }

  json* out_;
};

class Reader {
 public:
  Reader(const json& in, std::string path) : in_(in), path_(std::move(path)) {
    if (!in_.is_object()) Fail(path_, "expected an object");
  }

  template <class T> void operator()(const char* key, T& value) {
    seen_.insert(key);
    auto it = in_.find(key);
    if (it == in_.end()) return;
    Decode(*it, Join(path_, key), value);
  }

  // Anything the field list did not ask for is a typo or a stale key.
  void RejectUnknown() const {
    for (auto it = in_.begin(); it != in_.end(); ++it) {
      if (!seen_.count(it.key())) Fail(Join(path_, it.key()), "unknown key");
    }
  }

  template <class T>
  static void Decode(const json& j, const std::string& path, T& value) {
    if constexpr (HasFields<T>::value) {
      Reader r(j, path);
      Fields(r, value);
      r.RejectUnknown();
    } else {
      Leaf(j, path, value);
    }
  }

 private:
  [[noreturn]] static void Fail(const std::string& path, const std::string& msg) {
    throw ConfigError((path.empty() ? std::string("<root>") : path) + ": " + msg);
  }
  static std::string Join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

  static void Leaf(const json& j, const std::string& path, double& x) {
    if (!j.is_number()) Fail(path, "expected a number");
    x = j.get<double>();
  }
  static void Leaf(const json& j, const std::string& path, int& x) {
    if (!j.is_number_integer()) Fail(path, "expected an integer");
    x = j.get<int>();
  }
  static void Leaf(const json& j, const std::string& path, uint64_t& x) {
    if (!j.is_number_unsigned()) Fail(path, "expected a non-negative integer");
    x = j.get<uint64_t>();
  }
  static void Leaf(const json& j, const std::string& path, bool& x) {
    if (!j.is_boolean()) Fail(path, "expected true or false");
    x = j.get<bool>();
  }
  static void Leaf(const json& j, const std::string& path, std::string& x) {
    if (!j.is_string()) Fail(path, "expected a string");
    x = j.get<std::string>();
  }
  static std::vector<double> Numbers(const json& j, const std::string& path,
                                     size_t n) {
    if (!j.is_array() || (n > 0 && j.size() != n)) {
      Fail(path, "expected an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const json& e : j) {
      if (!e.is_number()) Fail(path, "expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  static void Leaf(const json& j, const std::string& path, Range& r) {
    const auto v = Numbers(j, path, 2);
    r = {v[0], v[1]};
  }
  static void Leaf(const json& j, const std::string& path, Eigen::Vector3d& x) {
    const auto v = Numbers(j, path, 3);
    x = {v[0], v[1], v[2]};
  }
  static void Leaf(const json& j, const std::string& path, std::vector<int>& x) {
    if (!j.is_array()) Fail(path, "expected an array of integers");
    x.clear();
    for (const json& e : j) {
      if (!e.is_number_integer()) Fail(path, "expected integers");
      x.push_back(e.get<int>());
    }
  }
  static void Leaf(const json& j, const std::string& path,
                   std::vector<std::pair<double, double>>& x) {
    if (!j.is_array()) Fail(path, "expected an array of [t, value] pairs");
    x.clear();
    for (const json& e : j) {
      const auto v = Numbers(e, path, 2);
      x.emplace_back(v[0], v[1]);
    }
  }
  static void Leaf(const json& j, const std::string& path, Terrain::Kind& k) {
    if (j == "flat") {
      k = Terrain::Kind::kFlat;
    } else if (j == "slope") {
      k = Terrain::Kind::kSlope;
    } else {
      Fail(path, "expected \"flat\" or \"slope\"");
    }
  }
  static void Leaf(const json& j, const std::string& path,
                   std::array<double, kNumRewardTerms>& w) {
    if (!j.is_object()) Fail(path, "expected an object of term weights");
    for (auto it = j.begin(); it != j.end(); ++it) {
      int term = -1;
      for (int k = 0; k < kNumRewardTerms; ++k) {
        if (RewardTermName(k) == it.key()) term = k;
      }
      if (term < 0) Fail(Join(path, it.key()), "unknown reward term");
      Leaf(*it, Join(path, it.key()), w[term]);
    }
  }

  const json& in_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F> void Check(const std::string& block, F&& fn) {
  try {
    fn();
  } catch (const InvalidParams& e) {
    throw ConfigError(block + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(block + ": " + e.what());
  }
}

void Require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParams(msg);
}

}  // namespace

double EvalCommandAt(const EvalConfig& eval, double t) {
  if (eval.profile == "constant") return eval.command_vx;
  const auto& k = eval.knots;
  if (k.empty()) throw InvalidParams("piecewise profile needs knots");
  if (t <= k.front().first) return k.front().second;
  for (size_t i = 1; i < k.size(); ++i) {
    if (t <= k[i].first) {
      const double span = k[i].first - k[i - 1].first;
      if (span <= 0.0) return k[i].second;
      const double s = (t - k[i - 1].first) / span;
      return k[i - 1].second + s * (k[i].second - k[i - 1].second);
    }
  }
  return k.back().second;
}

void ValidateRunConfig(const RunConfig& c) {
  Check("cpg", [&] {
    ValidateOscillatorParams(c.planner.oscillator);
    Require(c.planner.num_centers >= 1, "num_centers must be >= 1");
    Require(c.planner.rbf_sigma > 0.0, "rbf_sigma must be > 0");
    Require(c.planner.burn_in_ticks >= 0, "burn_in_ticks must be >= 0");
  });
  Check("demo", [&] {
    const DemoTrotParams& d = c.demo.trot;
    Require(!c.demo.source.empty(), "source must be \"synthetic\" or a path");
    Require(c.demo.csv_gait_frequency >= 0.0, "csv_gait_frequency must be >= 0");
    Require(d.frequency > 0.0 && d.sample_rate > 0.0,
            "frequency and sample_rate must be > 0");
    Require(d.clearance_front > 0.0 && d.clearance_rear > 0.0 &&
                d.step_length > 0.0,
            "clearances and step length must be > 0");
    Require(d.stance_fraction >= 0.5 && d.stance_fraction < 1.0,
            "stance_fraction must be in [0.5, 1)");
    Require(d.num_periods >= 1, "num_periods must be >= 1");
    Require(c.demo.fit.train_fraction > 0.0 && c.demo.fit.train_fraction < 1.0,
            "fit.train_fraction must be in (0, 1)");
    Require(c.demo.fit.ridge >= 0.0 && c.demo.fit.refine_steps >= 0 &&
                c.demo.fit.refine_step_size > 0.0,
            "fit options out of range");
  });
  Check("env", [&] { ValidateEnvConfig(c.env); });
  Check("curriculum", [&] { ValidateCurriculumConfig(c.curriculum); });
  Check("network", [&] { ValidateNetworkConfig(c.network); });
  Check("ppo", [&] { ValidatePpoConfig(c.ppo); });
  Check("train", [&] { ValidateTrainConfig(c.train); });
  Check("eval", [&] {
    Require(c.eval.profile == "constant" || c.eval.profile == "piecewise",
            "profile must be \"constant\" or \"piecewise\"");
    Require(c.eval.duration > 0.0, "duration must be > 0");
    if (c.eval.profile == "piecewise") {
      Require(!c.eval.knots.empty(), "piecewise profile needs knots");
      for (size_t i = 1; i < c.eval.knots.size(); ++i) {
        Require(c.eval.knots[i].first >= c.eval.knots[i - 1].first,
                "knot times must be non-decreasing");
      }
    }
  });
}

RunConfig ParseRunConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  RunConfig c;
  Reader r(j, "");
  Fields(r, c, false);
  r.RejectUnknown();
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

std::string RunConfigToJson(const RunConfig& config) {
  RunConfig c = config;
  json j = json::object();
  Writer w(&j);
  Fields(w, c, false);
  return j.dump(2) + "\n";
}

void WriteRunConfig(const std::string& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << RunConfigToJson(config);
  if (!out) throw ConfigError("failed writing " + path);
}

uint64_t ConfigHash(const RunConfig& config) {
  RunConfig c = config;
  json j = json::object();
  Writer w(&j);
  Fields(w, c, true);
  // nlohmann::json keeps keys sorted and prints doubles round-trip exact.
  const std::string canonical = j.dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string HashToHex(uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace synloco
