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
#include <algorithm>
#include <cmath>
#include <random>

#include "bgdbs/stim.hpp"
#include "support.hpp"

using namespace bgdbs;
using bgdbs::test::check_error;

namespace {

double charge_imbalance(const Waveform& w) {
  double net = 0.0, total = 0.0;
  for (double s : w.samples) {
    net += s * w.dt;
    total += std::abs(s) * w.dt;
  }
  return total > 0.0 ? std::abs(net) / total : 0.0;
}

}  // namespace

TEST_CASE("denormalize maps the action box onto the physical ranges") {
  const auto lo = denormalize(-1.0, -1.0);
  CHECK(lo.frequency_hz == 0.0);
  CHECK(lo.amplitude == 0.0);
  const auto hi = denormalize(1.0, 1.0);
  CHECK(hi.frequency_hz == 185.0);
  CHECK(hi.amplitude == 5000.0);
  const auto odbs = denormalize(0.4054, 0.0);
  CHECK(odbs.frequency_hz == doctest::Approx(130.0).epsilon(0.01 / 130.0));
  CHECK(odbs.amplitude == 2500.0);
  CHECK_FALSE(odbs.clamped);

  const auto wild = denormalize(3.0, -7.0);
  CHECK(wild.clamped);
  CHECK(wild.frequency_hz == 185.0);
  CHECK(wild.amplitude == 0.0);
  CHECK(denormalize(std::nan(""), 0.0).clamped);
}

TEST_CASE("normalize and denormalize round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f(0.0, 185.0), a(0.0, 5000.0);
  for (int i = 0; i < 1000; ++i) {
    const auto cmd = normalize(f(rng), a(rng));
    const auto back = denormalize(cmd.a0, cmd.a1);
    CHECK(back.frequency_hz == doctest::Approx(cmd.frequency_hz).epsilon(1e-14));
    CHECK(back.amplitude == doctest::Approx(cmd.amplitude).epsilon(1e-14));
  }
  check_error(ErrorKind::kInvalidArgument, [] { normalize(190.0, 10.0); });
  check_error(ErrorKind::kInvalidArgument, [] { normalize(100.0, -1.0); });
}

TEST_CASE("waveform shape") {
  SUBCASE("no stimulation") {
    for (auto cmd : {normalize(0.0, 2500.0), normalize(130.0, 0.0)}) {
      const auto w = synthesize(cmd, 100.0, 0.025);
      CHECK(w.samples.size() == 4000);
      CHECK(std::all_of(w.samples.begin(), w.samples.end(), [](double s) { return s == 0.0; }));
      CHECK(rms_power(w) == 0.0);
    }
  }
  SUBCASE("130 Hz for one second gives 130 biphasic pulses") {
    const auto cmd = normalize(130.0, 2500.0);
    CHECK(PulseTrain(cmd, 1000.0, 0.025).pulse_count() == 130);
    const auto w = synthesize(cmd, 1000.0, 0.025);
    // +A for 6 samples, then -A for 6 samples, from t = 0
    for (int i = 0; i < 6; ++i) CHECK(w.samples[static_cast<std::size_t>(i)] == 2500.0);
    for (int i = 6; i < 12; ++i) CHECK(w.samples[static_cast<std::size_t>(i)] == -2500.0);
    CHECK(w.samples[12] == 0.0);
    int rising = 0;
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      if (w.samples[i] > 0 && (i == 0 || w.samples[i - 1] <= 0)) ++rising;
    }
    CHECK(rising == 130);
    CHECK(*std::max_element(w.samples.begin(), w.samples.end()) == 2500.0);
  }
  SUBCASE("dt too coarse for a phase") {
    check_error(ErrorKind::kInvalidArgument,
                [] { synthesize(normalize(130.0, 1.0), 100.0, 0.05); });
  }
}

TEST_CASE("every command is charge balanced") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> f(0.5, 185.0), a(1.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const auto w = synthesize(normalize(f(rng), a(rng)), 100.0, 0.025);
    CHECK(charge_imbalance(w) < 1e-9);
  }
}

TEST_CASE("rms matches the duty-cycle closed form") {
  CHECK(ideal_rms_power(130.0, 2500.0) == doctest::Approx(493.71).epsilon(1e-4));
  CHECK(ideal_rms_power(135.0, 1690.0) == doctest::Approx(340.12).epsilon(1e-4));
  CHECK(rms_power(synthesize(normalize(130.0, 2500.0), 100.0, 0.025)) ==
        doctest::Approx(ideal_rms_power(130.0, 2500.0)).epsilon(0.005));

  // long enough for at least 200 pulses so window edges stay below the tolerance
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> f(2.0, 185.0), a(1.0, 5000.0);
  for (int i = 0; i < 30; ++i) {
    const double fr = f(rng), amp = a(rng);
    const double duration = std::ceil(200.0 / fr) * 1000.0;
    const double rms = rms_power(synthesize(normalize(fr, amp), duration, 0.025));
    CHECK(rms == doctest::Approx(ideal_rms_power(fr, amp)).epsilon(0.005));
  }
}

TEST_CASE("rms is nondecreasing in frequency and amplitude") {
  double prev = 0.0;
  for (double fr = 0.0; fr <= 185.0; fr += 5.0) {
    const double r = rms_power(synthesize(normalize(fr, 2000.0), 1000.0, 0.025));
    CHECK(r >= prev);
    prev = r;
  }
  prev = 0.0;
  for (double amp = 0.0; amp <= 5000.0; amp += 250.0) {
    const double r = rms_power(synthesize(normalize(90.0, amp), 100.0, 0.025));
    CHECK(r >= prev);
    prev = r;
  }
}
