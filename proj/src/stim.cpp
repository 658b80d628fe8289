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

#include "bgdbs/stim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bgdbs/errors.hpp"

namespace bgdbs {

namespace {

double clamp_unit(double a, bool& clamped) {
  if (std::isnan(a)) {
    clamped = true;
    return -1.0;
  }
  if (a < -1.0 || a > 1.0) clamped = true;
  return std::clamp(a, -1.0, 1.0);
}

}  // namespace

StimulusCommand denormalize(double a0, double a1) noexcept {
  StimulusCommand cmd;
  cmd.a0 = clamp_unit(a0, cmd.clamped);
  cmd.a1 = clamp_unit(a1, cmd.clamped);
  cmd.frequency_hz = (cmd.a0 + 1.0) / 2.0 * kMaxFrequencyHz;
  cmd.amplitude = (cmd.a1 + 1.0) / 2.0 * kMaxAmplitude;
  return cmd;
}

StimulusCommand normalize(double frequency_hz, double amplitude) {
  if (!(frequency_hz >= 0.0 && frequency_hz <= kMaxFrequencyHz) ||
      !(amplitude >= 0.0 && amplitude <= kMaxAmplitude)) {
    std::ostringstream msg;
    msg << "command (" << frequency_hz << " Hz, " << amplitude << " uA/cm^2) is out of range";
    raise(ErrorKind::kInvalidArgument, msg.str());
  }
  StimulusCommand cmd;
  cmd.frequency_hz = frequency_hz;
  cmd.amplitude = amplitude;
  cmd.a0 = 2.0 * frequency_hz / kMaxFrequencyHz - 1.0;
  cmd.a1 = 2.0 * amplitude / kMaxAmplitude - 1.0;
  return cmd;
}

PulseTrain::PulseTrain(const StimulusCommand& cmd, double duration_ms, double dt_ms) {
  if (!(dt_ms > 0.0) || !(duration_ms > 0.0)) {
    raise(ErrorKind::kInvalidArgument, "pulse train needs dt > 0 and duration > 0");
  }
  dt_ = dt_ms;
  samples_ = static_cast<std::int64_t>(std::llround(duration_ms / dt_ms));
  phase_samples_ = static_cast<std::int64_t>(std::llround(kPhaseWidthMs / dt_ms));
  if (phase_samples_ < 1) raise(ErrorKind::kInvalidArgument, "dt is wider than a pulse phase");
  amplitude_ = cmd.amplitude;
  if (cmd.frequency_hz > 0.0 && cmd.amplitude > 0.0) {
    period_ms_ = 1000.0 / cmd.frequency_hz;
    const auto period_samples = static_cast<std::int64_t>(std::floor(period_ms_ / dt_ms));
    if (period_samples < 2 * phase_samples_) {
      raise(ErrorKind::kPulseOverlap, "pulse period shorter than the biphasic pulse");
    }
  }
}

std::int64_t PulseTrain::start_of(std::int64_t pulse) const noexcept {
  return static_cast<std::int64_t>(
      std::llround(static_cast<double>(pulse) * period_ms_ / dt_));
}

double PulseTrain::operator()(std::int64_t sample) const noexcept {
  if (period_ms_ == 0.0 || sample < 0 || sample >= samples_) return 0.0;
  const auto guess =
      static_cast<std::int64_t>(std::floor(static_cast<double>(sample) * dt_ / period_ms_));
  // Rounding of pulse starts can move the owning pulse by one either way.
  for (std::int64_t k = guess + 1; k >= std::max<std::int64_t>(0, guess - 1); --k) {
    const std::int64_t start = start_of(k);
    if (sample < start) continue;
    if (start + 2 * phase_samples_ > samples_) return 0.0;
    const std::int64_t offset = sample - start;
    if (offset < phase_samples_) return amplitude_;
    if (offset < 2 * phase_samples_) return -amplitude_;
    return 0.0;
  }
  return 0.0;
}

std::int64_t PulseTrain::pulse_count() const noexcept {
  if (period_ms_ == 0.0) return 0;
  std::int64_t k = 0;
  while (start_of(k) + 2 * phase_samples_ <= samples_) ++k;
  return k;
}

Waveform synthesize(const StimulusCommand& cmd, double duration_ms, double dt_ms) {
  if (!(dt_ms <= 0.025 + 1e-12)) {
    raise(ErrorKind::kInvalidArgument, "waveform dt must be <= 0.025 ms");
  }
  PulseTrain train(cmd, duration_ms, dt_ms);
  Waveform w;
  w.dt = dt_ms;
  w.duration = duration_ms;
  w.samples.resize(static_cast<std::size_t>(train.samples()));
  for (std::int64_t i = 0; i < train.samples(); ++i) {
    w.samples[static_cast<std::size_t>(i)] = train(i);
  }
  return w;
}

double rms_power(const Waveform& wave) {
  if (!(wave.duration > 0.0)) raise(ErrorKind::kInvalidArgument, "waveform duration must be > 0");
  double acc = 0.0;
  for (double s : wave.samples) acc += s * s;
  return std::sqrt(acc * wave.dt / wave.duration);
}

double ideal_rms_power(double frequency_hz, double amplitude) noexcept {
  return amplitude * std::sqrt(frequency_hz * kPulseWidthMs * 1e-3);
}

DbsSource as_dbs_source(PulseTrain train) {
  return [train = std::move(train)](std::int64_t step) { return train(step); };
}

}  // namespace bgdbs
