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
#include <vector>

#include "bgdbs/network.hpp"

namespace bgdbs {

inline constexpr double kMaxFrequencyHz = 185.0;
inline constexpr double kMaxAmplitude = 5000.0;  // uA/cm^2
inline constexpr double kPhaseWidthMs = 0.150;   // anodic, then cathodic
inline constexpr double kPulseWidthMs = 2.0 * kPhaseWidthMs;

/// One stimulation decision in physical and normalized form.
struct StimulusCommand {
  double frequency_hz = 0.0;
  double amplitude = 0.0;  // uA/cm^2
  double a0 = -1.0;
  double a1 = -1.0;
  /// Set when denormalize had to clamp an out-of-range action component.
  bool clamped = false;

  friend bool operator==(const StimulusCommand&, const StimulusCommand&) = default;
};

/// Maps an action in [-1, 1]^2 onto [0, 185] Hz x [0, 5000] uA/cm^2.
/// Out-of-range components are clamped and flagged; NaN maps to -1.
StimulusCommand denormalize(double a0, double a1) noexcept;

/// Inverse of denormalize for an in-range physical command.
StimulusCommand normalize(double frequency_hz, double amplitude);

/// Charge-balanced biphasic pulse train sampled on a fixed grid.
///
/// Pulse k nominally starts at k / frequency from the window start and is
/// snapped to the nearest sample. Each phase spans round(0.15 ms / dt)
/// samples, +amplitude first then -amplitude. Pulses that would not finish
/// inside the window are not emitted, so every window is charge balanced.
class PulseTrain {
 public:
  PulseTrain(const StimulusCommand& cmd, double duration_ms, double dt_ms);

  double operator()(std::int64_t sample) const noexcept;

  std::int64_t samples() const noexcept { return samples_; }
  std::int64_t pulse_count() const noexcept;
  double dt() const noexcept { return dt_; }

 private:
  std::int64_t start_of(std::int64_t pulse) const noexcept;

  double amplitude_ = 0.0;
  double period_ms_ = 0.0;  // 0 means no pulses
  double dt_ = 0.0;
  std::int64_t samples_ = 0;
  std::int64_t phase_samples_ = 0;
};

struct Waveform {
  double dt = 0.0;
  double duration = 0.0;
  std::vector<double> samples;
};

/// Materializes the pulse train. Requires dt <= 0.025 ms and duration > 0.
Waveform synthesize(const StimulusCommand& cmd, double duration_ms, double dt_ms);

/// Root-mean-square current sqrt((1/T) sum I^2 dt).
double rms_power(const Waveform& wave);

/// Closed form A sqrt(f * 0.3 ms) of an ideal biphasic train.
double ideal_rms_power(double frequency_hz, double amplitude) noexcept;

/// Adapts a pulse train to the integrator's per-step current callback.
DbsSource as_dbs_source(PulseTrain train);

}  // namespace bgdbs
