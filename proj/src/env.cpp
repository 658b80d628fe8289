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

#include "bgdbs/env.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "bgdbs/errors.hpp"

namespace bgdbs {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Multiple of `step` within rounding.
bool is_multiple(double x, double step) {
  const double k = std::round(x / step);
  return k >= 1.0 && std::abs(x - k * step) < 1e-9 * std::max(1.0, x);
}

}  // namespace

void validate(const EnvConfig& c) {
  validate(c.model);
  if (!is_multiple(c.timestep_ms, c.model.dt_sample)) {
    raise(ErrorKind::kConfig, "timestep_ms must be a positive multiple of dt_sample");
  }
  if (c.episode_len < 1) raise(ErrorKind::kConfig, "episode_len must be >= 1");
  if (!in_unit(c.theta) || !in_unit(c.epsilon)) {
    raise(ErrorKind::kConfig, "theta and epsilon must lie in [0, 1]");
  }
  if (!(c.r1_norm.max > c.r1_norm.min)) raise(ErrorKind::kConfig, "r1_norm needs max > min");
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (!(c.norm_spec.max[k] > c.norm_spec.min[k])) {
      raise(ErrorKind::kConfig,
            "norm_spec range for '" + std::string(kFeatureNames[k]) + "' is empty");
    }
  }
  if (!(c.settle_ms >= c.timestep_ms) || !is_multiple(c.settle_ms, c.model.dt_sample)) {
    raise(ErrorKind::kConfig, "settle_ms must be a multiple of dt_sample and >= timestep_ms");
  }
}

RewardTerms compute_reward(double r1_raw, double a0, double a1, const EnvConfig& config) {
  const double span = config.r1_norm.max - config.r1_norm.min;
  RewardTerms out;
  out.r1 = std::clamp((r1_raw - config.r1_norm.min) / span, 0.0, 1.0);
  if (std::isnan(out.r1)) out.r1 = 1.0;
  const StimulusCommand cmd = denormalize(a0, a1);
  out.r2 = config.theta * (cmd.a0 + 1.0) / 2.0 + (1.0 - config.theta) * (cmd.a1 + 1.0) / 2.0;
  out.reward = -config.epsilon * out.r1 - (1.0 - config.epsilon) * out.r2;
  return out;
}

std::string to_json_line(const StepResult& r) {
  nlohmann::ordered_json j;
  j["t"] = r.timestep;
  j["reward"] = r.reward;
  j["done"] = r.done;
  j["r1_raw"] = r.info.r1_raw;
  j["r1"] = r.info.r1;
  j["r2"] = r.info.r2;
  j["frequency_hz"] = r.info.command.frequency_hz;
  j["amplitude"] = r.info.command.amplitude;
  j["clamped"] = r.info.command.clamped;
  j["rms"] = r.info.rms;
  j["pulses"] = r.info.pulses;
  nlohmann::ordered_json feats;
  for (std::size_t k = 0; k < kFeatureCount; ++k) feats[std::string(kFeatureNames[k])] = r.info.features[k];
  j["features"] = feats;
  j["observation"] = r.observation;
  j["diverged"] = r.info.diverged;
  if (!r.info.error.empty()) j["error"] = r.info.error;
  return j.dump();
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  validate(config_);
  params_ = config_.model.with_condition(config_.condition);
}

Observation Environment::reset(std::uint64_t seed) {
  state_ = init_network(params_, seed);
  const double lead = config_.settle_ms - config_.timestep_ms;
  if (lead > 0.0) state_ = step_network(state_, params_, lead).first;
  auto [next, trace] = step_network(state_, params_, config_.timestep_ms);
  state_ = std::move(next);
  trace_ = std::move(trace);
  last_obs_ = normalize(extract_features(trace_, config_.features), config_.norm_spec);
  t_ = 0;
  started_ = true;
  done_ = false;
  return last_obs_;
}

StepResult Environment::step(double a0, double a1) {
  if (!started_) raise(ErrorKind::kEpisodeFinished, "step called before reset");
  if (done_) raise(ErrorKind::kEpisodeFinished, "episode already finished; call reset");

  StepResult out;
  out.info.command = denormalize(a0, a1);
  const PulseTrain train(out.info.command, config_.timestep_ms, params_.dt);
  out.info.pulses = static_cast<int>(train.pulse_count());
  out.info.rms = out.info.pulses == 0
                     ? 0.0
                     : rms_power(synthesize(out.info.command, config_.timestep_ms, params_.dt));
  ++t_;
  out.timestep = t_;

  try {
    auto [next, trace] = step_network(state_, params_, as_dbs_source(train), config_.timestep_ms);
    state_ = std::move(next);
    trace_ = std::move(trace);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumericalDivergence) throw;
    out.info.diverged = true;
    out.info.error = e.what();
    out.info.r2 = compute_reward(0.0, a0, a1, config_).r2;
    out.info.r1 = 1.0;
    out.reward = -1.0;
    out.observation = last_obs_;
    out.done = true;
    done_ = true;
    if (sink_) sink_(out);
    return out;
  }

  out.info.features = extract_features(trace_, config_.features);
  out.observation = normalize(out.info.features, config_.norm_spec);
  out.info.r1_raw = banded_psd(std::span<const std::vector<double>>(trace_.s_gi),
                               trace_.dt_sample, kSgiBand, config_.features.resolution_hz);
  const RewardTerms terms = compute_reward(out.info.r1_raw, a0, a1, config_);
  out.info.r1 = terms.r1;
  out.info.r2 = terms.r2;
  out.reward = terms.reward;
  out.done = t_ >= config_.episode_len;
  done_ = out.done;
  last_obs_ = out.observation;
  if (sink_) sink_(out);
  return out;
}

}  // namespace bgdbs
