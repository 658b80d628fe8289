// Copyright 2026 The bgdbs Authors
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bgdbs/biomarkers.hpp"

namespace bgdbs {

inline constexpr std::size_t kActionDim = 2;
using Action = std::array<double, kActionDim>;

/// Fully connected network, ReLU on hidden layers. Parameters live in one
/// flat vector: for each layer, the row-major (out x in) weights followed by
/// the biases.
class DenseNet {
 public:
  enum class Output : std::uint8_t { kIdentity = 0, kTanh = 1 };

  /// Activations of every layer from one forward pass, input first.
  struct Tape {
    std::vector<std::vector<double>> a;
  };

  DenseNet() = default;
  /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  DenseNet(std::vector<int> sizes, Output output, std::mt19937_64& rng);

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> forward(std::span<const double> x, Tape& tape) const;

  /// Adds dL/dparams into `grad` (same layout as params()) for the pass
  /// recorded in `tape`, given dL/doutput. Returns dL/dinput.
  std::vector<double> backward(const Tape& tape, std::span<const double> d_out,
                               std::span<double> grad) const;

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  Output output() const noexcept { return output_; }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(sizes_.front()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(sizes_.back()); }

  /// Rebuilds a network from stored shapes and parameters.
  static DenseNet from_params(std::vector<int> sizes, Output output, std::vector<double> params);

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }
  void build_offsets();

  std::vector<int> sizes_;
  Output output_ = Output::kIdentity;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

/// Adaptive moment estimation with bias correction.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_ = 0.0, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct Transition {
  Observation obs{};
  Action action{};
  double reward = 0.0;
  Observation next_obs{};
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Ring buffer; the oldest entry is overwritten once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_.at(i); }

  /// Uniform sample of distinct entries. kInvalidArgument if batch > size.
  std::vector<Transition> sample(std::size_t batch, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

struct AgentParams {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double target_noise_sigma = 0.2;
  double target_noise_clip = 0.5;
  double exploration_sigma = 0.1;
  int batch_size = 64;
  std::size_t buffer_capacity = 5000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  int warmup_steps = 500;
  std::vector<int> hidden = {64, 64};
  std::uint64_t seed = 0;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// Throws kConfig on the first violated constraint.
void validate(const AgentParams& params);

struct UpdateDiagnostics {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double critic1_grad_norm = 0.0;
  double critic2_grad_norm = 0.0;
  std::optional<double> actor_loss;  // set on policy-delay steps
  std::optional<double> actor_grad_norm;
};

/// Mean squared error of `critic` against `targets` on the batch and its
/// gradient, accumulated into `grad`.
double critic_loss_grad(const DenseNet& critic, std::span<const Transition> batch,
                        std::span<const double> targets, std::span<double> grad);

/// Policy objective -mean Q(s, pi(s)) and its gradient with respect to the
/// actor parameters, accumulated into `grad`. The critic is held fixed.
double actor_loss_grad(const DenseNet& actor, const DenseNet& critic,
                       std::span<const Transition> batch, std::span<double> grad);

/// Identifies the checkpoint's provenance.
struct CheckpointMeta {
  std::string norm_spec_id;
  std::uint64_t config_hash = 0;
};

class Agent {
 public:
  explicit Agent(AgentParams params);

  /// Deterministic policy, plus N(0, exploration_sigma) noise when exploring.
  /// The first warmup_steps exploring calls return uniform random actions.
  Action act(const Observation& obs, bool explore);

  /// Deterministic actor output. Pure, so a frozen agent may be shared
  /// across threads.
  Action policy(const Observation& obs) const;

  /// y = r + gamma (1 - done) min(Q1', Q2')(s', clip(pi'(s') + noise)).
  std::vector<double> critic_target(std::span<const Transition> batch);

  /// One TD3 update on a batch sampled from `buffer`.
  UpdateDiagnostics update(const ReplayBuffer& buffer);
  /// Same on an explicit batch.
  UpdateDiagnostics update_on(std::span<const Transition> batch);

  std::vector<std::uint8_t> save(const CheckpointMeta& meta) const;
  /// kCorruptCheckpoint for damaged bytes, kVersionMismatch for a foreign
  /// format version, feature order or a missing norm-spec id.
  static Agent load(std::span<const std::uint8_t> bytes, CheckpointMeta* meta = nullptr);

  const AgentParams& params() const noexcept { return params_; }
  DenseNet& actor() noexcept { return actor_; }
  DenseNet& critic1() noexcept { return critic1_; }
  DenseNet& critic2() noexcept { return critic2_; }
  DenseNet& actor_target() noexcept { return actor_t_; }
  DenseNet& critic1_target() noexcept { return critic1_t_; }
  DenseNet& critic2_target() noexcept { return critic2_t_; }
  const DenseNet& actor() const noexcept { return actor_; }
  std::int64_t updates() const noexcept { return updates_; }
  std::int64_t explore_calls() const noexcept { return explore_calls_; }

 private:
  void polyak();

  AgentParams params_;
  std::mt19937_64 rng_;
  DenseNet actor_, critic1_, critic2_;
  DenseNet actor_t_, critic1_t_, critic2_t_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  std::int64_t updates_ = 0;
  std::int64_t explore_calls_ = 0;
};

/// Critic input: observation followed by action.
std::array<double, kFeatureCount + kActionDim> critic_input(const Observation& obs,
                                                            const Action& action);

}  // namespace bgdbs
