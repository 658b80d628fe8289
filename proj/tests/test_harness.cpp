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
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bgdbs/harness.hpp"
#include "support.hpp"

using namespace bgdbs;
using bgdbs::test::check_error;
using bgdbs::test::unit_config;

namespace {

RunReport random_report(std::mt19937_64& rng, const std::string& label) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  auto stat = [&] { return Stat{u(rng), std::abs(u(rng)) * 1e-7, static_cast<std::size_t>(rng() % 500)}; };
  RunReport r;
  r.label = label;
  r.sgi_power = stat();
  r.vgi_beta = stat();
  r.rms = stat();
  r.frequency = stat();
  r.amplitude = stat();
  for (int i = 0; i < 7; ++i) {
    r.returns.push_back(u(rng) / 3.0);
    r.seeds.push_back(rng());
  }
  r.config_hash = "0f1e2d3c";
  return r;
}

}  // namespace

TEST_CASE("summaries use the population standard deviation") {
  const std::vector<double> x = {2, 4, 4, 4, 5, 5, 7, 9};
  const Stat s = summarize(x);
  CHECK(s.mean == 5.0);
  CHECK(s.sd == 2.0);
  CHECK(s.count == 8);
  CHECK(summarize(std::vector<double>{}).count == 0);
}

TEST_CASE("early-stopping plateau rule") {
  std::vector<double> ma(60, -2.0);
  CHECK(converged(ma, 50, 0.01));
  CHECK_FALSE(converged(std::span<const double>(ma).first(49), 50, 0.01));
  ma[5] = -1.0;  // outside the last 50
  CHECK(converged(ma, 50, 0.01));
  ma[30] = -2.03;  // spread 0.03 > 1% of 2
  CHECK_FALSE(converged(ma, 50, 0.01));
  ma[30] = -2.019;
  CHECK(converged(ma, 50, 0.01));
}

TEST_CASE("report CSV round trips exactly") {
  std::mt19937_64 rng(77);
  std::vector<RunReport> reports = {random_report(rng, "Healthy"), random_report(rng, "o-DBS"),
                                    random_report(rng, "TD3-DBS")};
  reports[1].returns.clear();
  reports[1].seeds.clear();
  std::stringstream ss;
  write_reports_csv(ss, reports);
  const auto back = read_reports_csv(ss);
  REQUIRE(back.size() == reports.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == reports[i]);

  std::stringstream bad("label,x\nfoo,1\n");
  check_error(ErrorKind::kVersionMismatch, [&] { read_reports_csv(bad); });
  reports[0].label = "a,b";
  std::stringstream sink;
  check_error(ErrorKind::kInvalidArgument, [&] { write_reports_csv(sink, reports); });
}

TEST_CASE("curve CSV round trips exactly") {
  std::mt19937_64 rng(78);
  std::normal_distribution<double> n;
  std::vector<EpisodeRecord> curve;
  for (int e = 1; e <= 40; ++e) curve.push_back({e, e * 10, n(rng), n(rng) / 7.0});
  std::stringstream ss;
  write_curve_csv(ss, curve);
  CHECK(read_curve_csv(ss) == curve);
  std::stringstream bad("# bgdbs-curve v1\nepisode,steps,return,moving_average\n1,2,3\n");
  check_error(ErrorKind::kInvalidArgument, [&] { read_curve_csv(bad); });
}

TEST_CASE("content hash is crc32") {
  CHECK(content_hash("123456789") == "cbf43926");
  CHECK(content_hash("") == "00000000");
}

TEST_CASE("calibration round trip and anchors") {
  const Calibration cal = calibrate(unit_config(), 1, 9);
  CHECK(cal.r1_norm.max > cal.r1_norm.min);
  CHECK(cal.windows == 10);
  for (std::size_t k = 0; k < kFeatureCount; ++k) CHECK(cal.norm_spec.max[k] > cal.norm_spec.min[k]);

  const std::string text = to_json(cal);
  const Calibration back = calibration_from_json(text);
  CHECK(back.norm_spec.min == cal.norm_spec.min);
  CHECK(back.norm_spec.max == cal.norm_spec.max);
  CHECK(back.r1_norm.min == cal.r1_norm.min);
  CHECK(back.r1_norm.max == cal.r1_norm.max);
  CHECK(to_json(back) == text);
  CHECK(to_json(calibrate(unit_config(), 1, 9)) == text);

  check_error(ErrorKind::kConfig, [] { calibration_from_json("{not json"); });
  check_error(ErrorKind::kVersionMismatch, [] { calibration_from_json("{\"format\": \"other\"}"); });
}

TEST_CASE("baselines are deterministic and labelled") {
  const EnvConfig cfg = unit_config();
  const RunReport a = run_baseline(Baseline::kOdbs, cfg, 2, 5);
  const RunReport b = run_baseline(Baseline::kOdbs, cfg, 2, 5);
  CHECK(a == b);
  CHECK(a.label == "o-DBS");
  CHECK(a.frequency.mean == doctest::Approx(130.0));
  CHECK(a.amplitude.mean == doctest::Approx(2500.0));
  CHECK(a.rms.mean == doctest::Approx(493.7).epsilon(0.005));
  CHECK(a.sgi_power.count == 20);
  CHECK(a.vgi_beta.count == 2);
  CHECK(a.returns.size() == 2);

  const RunReport pd = run_baseline(Baseline::kPd, cfg, 2, 5);
  CHECK(pd.rms.mean == 0.0);
  CHECK(pd.sgi_power.mean > a.sgi_power.mean);
  const RunReport h = run_baseline(Baseline::kHealthy, cfg, 2, 5);
  CHECK(h.label == "Healthy");
  CHECK(h.seeds == pd.seeds);
  CHECK(run_baseline(Baseline::kPd, cfg, 2, 6).seeds != pd.seeds);
  CHECK(summary_table(std::vector<RunReport>{h, pd, a}).find("o-DBS") != std::string::npos);
}

TEST_CASE("short training is reproducible") {
  EnvConfig cfg = unit_config();
  AgentParams ap;
  ap.hidden = {16, 16};
  ap.warmup_steps = 30;
  ap.batch_size = 16;
  TrainOptions opts;
  opts.max_steps = 60;
  opts.validation_episodes = 1;
  opts.seed = 4;
  std::vector<EpisodeRecord> seen;
  const TrainResult a = train(cfg, ap, opts, [&](const EpisodeRecord& r) { seen.push_back(r); });
  const TrainResult b = train(cfg, ap, opts);
  CHECK(a.curve.size() == 6);
  CHECK(seen == a.curve);
  CHECK(a.curve == b.curve);
  CHECK(a.steps == 60);
  CHECK(a.validation_return == b.validation_return);
  CHECK(a.agent.actor() == b.agent.actor());
  CHECK(a.agent.updates() == 30);
  CHECK(a.curve.back().steps == 60);

  const std::vector<std::uint64_t> seeds = {1, 2};
  const BestOf best = train_best_of(cfg, ap, opts, seeds);
  REQUIRE(best.runs.size() == 2);
  for (const auto& r : best.runs) CHECK(r.validation_return <= best.runs[best.best].validation_return);

  const RunReport eval = evaluate(best.runs[best.best].agent, cfg, 1, 3);
  CHECK(eval.label == "TD3-DBS");
  CHECK(eval.sgi_power.count == 10);
}
