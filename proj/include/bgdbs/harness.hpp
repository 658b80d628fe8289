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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgdbs/env.hpp"
#include "bgdbs/td3.hpp"

namespace bgdbs {

struct Stat {
  double mean = 0.0;
  double sd = 0.0;  // population
  std::size_t count = 0;

  friend bool operator==(const Stat&, const Stat&) = default;
};

Stat summarize(std::span<const double> x);

struct RunReport {
  std::string label;
  Stat sgi_power;  // S_Gi 1-20 Hz power per control window
  Stat vgi_beta;   // V_Gi 13-30 Hz power per 1 s episode
  Stat rms;        // electrode RMS current per window
  Stat frequency;  // chosen frequency per window (Hz)
  Stat amplitude;  // chosen amplitude per window (uA/cm^2)
  std::vector<double> returns;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Normalization bounds and reward anchors from stimulus-free runs.
struct Calibration {
  NormalizationSpec norm_spec;
  R1Norm r1_norm;
  std::size_t windows = 0;  // per condition
};

/// Runs `episodes` stimulus-free episodes per condition. The feature
/// bounds span both conditions; r1_norm is (mean healthy, mean Parkinsonian)
/// window S_Gi power.
Calibration calibrate(const EnvConfig& base, int episodes, std::uint64_t seed);

std::string to_json(const Calibration& c);
Calibration calibration_from_json(std::string_view text);

using Policy = std::function<Action(const Observation&)>;

/// Runs whole episodes with `policy`. Episode i uses seed
/// derive_seed(seed, i), so reports built from the same seed share their
/// initial networks.
RunReport run_policy(std::string label, const EnvConfig& config, const Policy& policy,
                     int episodes, std::uint64_t seed);

enum class Baseline { kHealthy, kPd, kOdbs };

struct OdbsSetting {
  double frequency_hz = 130.0;
  double amplitude = 2500.0;
};

/// Healthy and PD use zero stimulus on their own parameters; oDBS applies
/// the fixed command on Parkinsonian parameters.
RunReport run_baseline(Baseline which, const EnvConfig& config, int episodes, std::uint64_t seed,
                       OdbsSetting odbs = {});

struct TrainOptions {
  int max_steps = 5000;
  int ma_window = 20;
  int patience = 50;
  double tolerance = 0.01;
  int validation_episodes = 5;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  int episode = 0;
  int steps = 0;  // cumulative environment steps
  double episode_return = 0.0;
  double moving_average = 0.0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TrainResult {
  Agent agent;
  std::vector<EpisodeRecord> curve;
  bool early_stopped = false;
  int steps = 0;
  double validation_return = 0.0;
};

/// True when the last `patience` moving averages stay within
/// tolerance * |latest| of each other.
bool converged(std::span<const double> moving_averages, int patience, double tolerance);

/// TD3 on Parkinsonian parameters: one update per environment step after
/// warmup, capped at max_steps, stopping early on convergence.
TrainResult train(const EnvConfig& config, const AgentParams& agent_params,
                  const TrainOptions& options,
                  const std::function<void(const EpisodeRecord&)>& progress = {});

/// Mean deterministic-policy return over held-out episodes.
double validation_return(const Agent& agent, const EnvConfig& config, int episodes,
                         std::uint64_t seed);

struct BestOf {
  std::vector<TrainResult> runs;
  std::size_t best = 0;  // index into runs by validation return
};

BestOf train_best_of(const EnvConfig& config, const AgentParams& agent_params,
                     const TrainOptions& options, std::span<const std::uint64_t> seeds,
                     const std::function<void(std::size_t, const EpisodeRecord&)>& progress = {});

/// Deterministic policy on Parkinsonian parameters.
RunReport evaluate(const Agent& agent, const EnvConfig& config, int episodes,
                   std::uint64_t seed, std::string label = "TD3-DBS");

/// CSV with a versioned header; values use round-trip precision.
void write_reports_csv(std::ostream& out, std::span<const RunReport> reports);
std::vector<RunReport> read_reports_csv(std::istream& in);

void write_curve_csv(std::ostream& out, std::span<const EpisodeRecord> curve);
std::vector<EpisodeRecord> read_curve_csv(std::istream& in);

/// Human-readable table: one row per report, columns S_Gi power, V_Gi beta
/// power, RMS power, frequency and amplitude.
std::string summary_table(std::span<const RunReport> reports);

/// crc32 of the bytes as 8 hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace bgdbs
