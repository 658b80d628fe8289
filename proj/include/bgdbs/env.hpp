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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "bgdbs/biomarkers.hpp"
#include "bgdbs/model_params.hpp"
#include "bgdbs/network.hpp"
#include "bgdbs/stim.hpp"

namespace bgdbs {

/// Raw S_Gi band power values mapped to r1 = 0 and r1 = 1.
struct R1Norm {
  double min = 0.0;
  double max = 1.0;
};

struct EnvConfig {
  double timestep_ms = 100.0;
  int episode_len = 10;
  double theta = 0.85;    // frequency share of the power penalty
  double epsilon = 0.68;  // weight of the biomarker term
  Condition condition = Condition::kParkinsonian;
  NormalizationSpec norm_spec;
  R1Norm r1_norm;
  ModelParams model;
  std::uint64_t seed = 0;
  double settle_ms = 200.0;
  FeatureOptions features;
};

/// Throws kConfig on the first violated constraint.
void validate(const EnvConfig& config);

struct RewardTerms {
  double reward = 0.0;
  double r1 = 0.0;  // normalized, in [0, 1]
  double r2 = 0.0;
};

/// reward = -epsilon * r1 - (1 - epsilon) * r2 with
/// r1 = clamp((r1_raw - min) / (max - min), 0, 1) and
/// r2 = theta * (a0 + 1) / 2 + (1 - theta) * (a1 + 1) / 2.
/// Actions are clamped to [-1, 1] first.
RewardTerms compute_reward(double r1_raw, double a0, double a1, const EnvConfig& config);

struct StepInfo {
  double r1_raw = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  FeatureVector features{};
  StimulusCommand command;
  double rms = 0.0;  // electrode current RMS over the window
  int pulses = 0;
  bool diverged = false;
  std::string error;  // divergence message, empty otherwise
};

struct StepResult {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  int timestep = 0;  // 1-based index of the step just taken
  StepInfo info;
};

/// One JSON object per line, for trace streams.
std::string to_json_line(const StepResult& result);

/// Control-loop wrapper around the network: one step stimulates for
/// `timestep_ms`, then observes and scores that same window.
class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// Fresh network from `seed`, settle without stimulation, observe the last
  /// `timestep_ms` of the settle interval.
  Observation reset(std::uint64_t seed);
  Observation reset() { return reset(config_.seed); }

  /// kEpisodeFinished after done or before the first reset. A numerical
  /// divergence ends the episode with reward -1 instead of throwing.
  StepResult step(double a0, double a1);

  bool done() const noexcept { return done_; }
  int timestep() const noexcept { return t_; }
  const EnvConfig& config() const noexcept { return config_; }
  const NetworkState& state() const noexcept { return state_; }
  /// Trace of the most recent window (settle tail after reset).
  const TraceWindow& last_trace() const noexcept { return trace_; }

  /// Called with every StepResult when set.
  void set_trace_sink(std::function<void(const StepResult&)> sink) { sink_ = std::move(sink); }

 private:
  EnvConfig config_;
  ModelParams params_;
  NetworkState state_;
  TraceWindow trace_;
  Observation last_obs_{};
  int t_ = 0;
  bool started_ = false;
  bool done_ = true;
  std::function<void(const StepResult&)> sink_;
};

}  // namespace bgdbs
