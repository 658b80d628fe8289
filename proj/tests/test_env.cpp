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
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <vector>

#include "bgdbs/env.hpp"
#include "support.hpp"

using namespace bgdbs;
using bgdbs::test::check_error;
using bgdbs::test::unit_config;

namespace {

EnvConfig raw_r1_config() {
  EnvConfig cfg = unit_config();
  cfg.r1_norm = {0.0, 1.0};
  return cfg;
}

}  // namespace

TEST_CASE("reward worked example") {
  const auto t = compute_reward(0.5, 0.4054, 0.0, raw_r1_config());
  CHECK(t.r1 == doctest::Approx(0.5));
  CHECK(t.r2 == doctest::Approx(0.85 * 0.7027 + 0.15 * 0.5).epsilon(1e-4));
  CHECK(t.r2 == doctest::Approx(0.6723).epsilon(1e-4));
  CHECK(t.reward == doctest::Approx(-0.5551).epsilon(1e-4));
}

TEST_CASE("reward extremes and clamping") {
  const EnvConfig cfg = raw_r1_config();
  CHECK(compute_reward(0.0, -1.0, -1.0, cfg).reward == 0.0);
  CHECK(compute_reward(1.0, 1.0, 1.0, cfg).reward == doctest::Approx(-1.0));
  CHECK(compute_reward(-3.0, -1.0, -1.0, cfg).r1 == 0.0);
  CHECK(compute_reward(7.0, -1.0, -1.0, cfg).r1 == 1.0);
  CHECK(compute_reward(std::nan(""), 0.0, 0.0, cfg).r1 == 1.0);
  // out-of-box actions are clamped before the power term
  CHECK(compute_reward(0.2, 5.0, -9.0, cfg).r2 == compute_reward(0.2, 1.0, -1.0, cfg).r2);

  EnvConfig anchored = unit_config();
  anchored.r1_norm = {0.03, 0.15};
  CHECK(compute_reward(0.09, 0.0, 0.0, anchored).r1 == doctest::Approx(0.5));
}

TEST_CASE("reward is bounded and monotone") {
  const EnvConfig cfg = raw_r1_config();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r1 = r(rng), a0 = u(rng), a1 = u(rng);
    const auto t = compute_reward(r1, a0, a1, cfg);
    CHECK((t.reward >= -1.0 && t.reward <= 0.0));
    CHECK((t.r2 >= 0.0 && t.r2 <= 1.0));
    const double d = 0.01;
    if (a0 + d <= 1.0) CHECK(compute_reward(r1, a0 + d, a1, cfg).reward < t.reward);
    if (a1 + d <= 1.0) CHECK(compute_reward(r1, a0, a1 + d, cfg).reward < t.reward);
    if (r1 + d <= 1.0) CHECK(compute_reward(r1 + d, a0, a1, cfg).reward < t.reward);
  }
}

TEST_CASE("config validation") {
  auto bad = [](auto mutate) {
    EnvConfig cfg = unit_config();
    mutate(cfg);
    check_error(ErrorKind::kConfig, [&] { validate(cfg); });
  };
  bad([](EnvConfig& c) { c.timestep_ms = 0.15; });
  bad([](EnvConfig& c) { c.episode_len = 0; });
  bad([](EnvConfig& c) { c.theta = 1.5; });
  bad([](EnvConfig& c) { c.epsilon = -0.1; });
  bad([](EnvConfig& c) { c.r1_norm = {0.2, 0.2}; });
  bad([](EnvConfig& c) { c.norm_spec.max[3] = c.norm_spec.min[3]; });
  bad([](EnvConfig& c) { c.settle_ms = 50.0; });
  CHECK_NOTHROW(validate(unit_config()));
}

TEST_CASE("episode lifecycle") {
  Environment env(unit_config());
  check_error(ErrorKind::kEpisodeFinished, [&] { env.step(0.0, 0.0); });
  const Observation first = env.reset(4);
  for (double o : first) CHECK((o >= 0.0 && o <= 1.0));
  CHECK(env.timestep() == 0);
  CHECK_FALSE(env.done());

  int seen = 0;
  env.set_trace_sink([&](const StepResult&) { ++seen; });
  for (int t = 1; t <= 10; ++t) {
    const StepResult r = env.step(0.4054, 0.0);
    CHECK(r.timestep == t);
    CHECK(r.done == (t == 10));
    CHECK(r.info.pulses == 13);
    CHECK(r.info.rms == doctest::Approx(493.7).epsilon(0.005));
    CHECK(r.info.command.frequency_hz == doctest::Approx(130.0).epsilon(1e-4));
    for (double o : r.observation) CHECK((o >= 0.0 && o <= 1.0));
    CHECK((r.reward >= -1.0 && r.reward <= 0.0));
  }
  CHECK(seen == 10);
  CHECK(env.done());
  check_error(ErrorKind::kEpisodeFinished, [&] { env.step(0.0, 0.0); });
  env.reset(5);
  CHECK_NOTHROW(env.step(-1.0, -1.0));
}

TEST_CASE("episodes are reproducible from the seed") {
  auto run = [](std::uint64_t seed) {
    Environment env(unit_config());
    std::vector<StepResult> out;
    env.reset(seed);
    for (int t = 0; t < 4; ++t) out.push_back(env.step(-0.2 + 0.1 * t, 0.3 - 0.2 * t));
    return out;
  };
  const auto a = run(31), b = run(31), c = run(32);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].observation == b[i].observation);
    CHECK(a[i].reward == b[i].reward);
    CHECK(a[i].info.features == b[i].info.features);
  }
  CHECK(a.back().info.features != c.back().info.features);
}

TEST_CASE("no stimulation means no power") {
  Environment env(unit_config());
  env.reset(1);
  const StepResult r = env.step(-1.0, 0.5);
  CHECK(r.info.pulses == 0);
  CHECK(r.info.rms == 0.0);
  CHECK(env.last_trace().i_dbs == std::vector<double>(1000, 0.0));
}

TEST_CASE("divergence ends the episode with the worst reward") {
  EnvConfig cfg = unit_config();
  cfg.model.dbs_coupling = 1e4;
  Environment env(cfg);
  const Observation obs = env.reset(2);
  const StepResult r = env.step(1.0, 1.0);
  CHECK(r.info.diverged);
  CHECK(r.done);
  CHECK(r.reward == -1.0);
  CHECK(r.info.r1 == 1.0);
  CHECK(r.observation == obs);
  CHECK_FALSE(r.info.error.empty());
  check_error(ErrorKind::kEpisodeFinished, [&] { env.step(0.0, 0.0); });
}

TEST_CASE("step diagnostics serialize to one JSON line") {
  Environment env(unit_config());
  env.reset(3);
  const StepResult r = env.step(0.0, 0.0);
  const std::string line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["t"] == 1);
  CHECK(j["reward"].get<double>() == r.reward);
  CHECK(j["features"].size() == kFeatureCount);
  CHECK(j["features"]["sampen_stn"].get<double>() == r.info.features[5]);
  CHECK(j["observation"].size() == kFeatureCount);
}

TEST_CASE("parkinsonian windows show stronger beta and more regular STN") {
  double beta[2] = {0, 0}, sampen[2] = {0, 0}, sgi[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    Environment env(unit_config(c == 0 ? Condition::kHealthy : Condition::kParkinsonian));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      env.reset(seed);
      while (!env.done()) {
        const StepResult r = env.step(-1.0, -1.0);
        beta[c] += r.info.features[4];
        sampen[c] += r.info.features[5];
        sgi[c] += r.info.r1_raw;
      }
    }
  }
  MESSAGE("beta " << beta[0] << " vs " << beta[1] << ", sampen " << sampen[0] << " vs "
                  << sampen[1]);
  CHECK(beta[1] > beta[0]);
  CHECK(sampen[1] < sampen[0]);
  CHECK(sgi[1] > 1.2 * sgi[0]);
}
