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

#include "bgdbs/harness.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "bgdbs/errors.hpp"
#include "bgdbs/random.hpp"

namespace bgdbs {

namespace {

// Seed streams. Episode i of a run uses derive_seed(seed, i); the offsets
// keep training, validation and agent initialization apart from that.
constexpr std::uint64_t kTrainEpisodeStream = 1'000'000;
constexpr std::uint64_t kAgentStream = 2'000'000;
constexpr std::uint64_t kValidationStream = 3'000'000;
constexpr std::uint64_t kCalibrationHealthy = 4'000'000;
constexpr std::uint64_t kCalibrationPd = 5'000'000;

// Permissive bounds so calibration can run the environment before any spec
// exists.
NormalizationSpec unit_spec() {
  NormalizationSpec s;
  s.min.fill(0.0);
  s.max.fill(1.0);
  s.provenance = "identity";
  return s;
}

struct EpisodeTrace {
  std::vector<double> sgi_power;
  std::vector<double> rms;
  std::vector<double> frequency;
  std::vector<double> amplitude;
  std::vector<FeatureVector> features;
  std::vector<std::vector<double>> v_gi;  // concatenated per cell
  double ret = 0.0;
};

EpisodeTrace run_episode(Environment& env, const Policy& policy, std::uint64_t seed) {
  EpisodeTrace ep;
  Observation obs = env.reset(seed);
  ep.v_gi.assign(env.last_trace().v_gi.size(), {});
  while (!env.done()) {
    const Action a = policy(obs);
    const StepResult r = env.step(a[0], a[1]);
    ep.ret += r.reward;
    ep.rms.push_back(r.info.rms);
    ep.frequency.push_back(r.info.command.frequency_hz);
    ep.amplitude.push_back(r.info.command.amplitude);
    if (r.info.diverged) break;
    ep.sgi_power.push_back(r.info.r1_raw);
    ep.features.push_back(r.info.features);
    const auto& trace = env.last_trace();
    for (std::size_t c = 0; c < trace.v_gi.size(); ++c) {
      ep.v_gi[c].insert(ep.v_gi[c].end(), trace.v_gi[c].begin(), trace.v_gi[c].end());
    }
    obs = r.observation;
  }
  return ep;
}

Action zero_action(const Observation&) { return {-1.0, -1.0}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view s) {
  // from_chars for double is missing in some toolchains; strtod is exact too.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    raise(ErrorKind::kInvalidArgument, "bad number '" + tmp + "' in CSV");
  }
  return v;
}

template <typename T>
T parse_int(std::string_view s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    raise(ErrorKind::kInvalidArgument, "bad integer '" + std::string(s) + "' in CSV");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr std::string_view kReportHeader =
    "# bgdbs-report v1\n"
    "label,sgi_mean,sgi_sd,sgi_n,vgi_mean,vgi_sd,vgi_n,rms_mean,rms_sd,rms_n,"
    "freq_mean,freq_sd,freq_n,amp_mean,amp_sd,amp_n,returns,seeds,config_hash";

constexpr std::string_view kCurveHeader =
    "# bgdbs-curve v1\n"
    "episode,steps,return,moving_average";

}  // namespace

Stat summarize(std::span<const double> x) {
  return Stat{mean_of(x), stddev_of(x), x.size()};
}

Calibration calibrate(const EnvConfig& base, int episodes, std::uint64_t seed) {
  if (episodes < 1) raise(ErrorKind::kInvalidArgument, "calibration needs >= 1 episode");
  EnvConfig cfg = base;
  cfg.norm_spec = unit_spec();
  std::vector<FeatureVector> features;
  double means[2] = {0.0, 0.0};
  std::size_t windows = 0;
  const Condition conds[2] = {Condition::kHealthy, Condition::kParkinsonian};
  const std::uint64_t streams[2] = {kCalibrationHealthy, kCalibrationPd};
  for (int c = 0; c < 2; ++c) {
    cfg.condition = conds[c];
    Environment env(cfg);
    std::vector<double> power;
    for (int e = 0; e < episodes; ++e) {
      const auto ep = run_episode(env, zero_action, derive_seed(seed, streams[c] + e));
      features.insert(features.end(), ep.features.begin(), ep.features.end());
      power.insert(power.end(), ep.sgi_power.begin(), ep.sgi_power.end());
    }
    means[c] = mean_of(power);
    windows = power.size();
  }
  Calibration out;
  out.norm_spec = calibrate_normalization(
      features, "healthy+parkinsonian no-DBS, " + std::to_string(episodes) + " episodes each, seed " +
                    std::to_string(seed));
  out.r1_norm = R1Norm{means[0], means[1]};
  out.windows = windows;
  if (!(out.r1_norm.max > out.r1_norm.min)) {
    raise(ErrorKind::kDegenerateRange,
          "Parkinsonian S_Gi power does not exceed healthy; r1 anchors are unusable");
  }
  return out;
}

std::string to_json(const Calibration& c) {
  nlohmann::ordered_json j;
  j["format"] = "bgdbs-calibration v1";
  j["norm_spec_id"] = spec_id(c.norm_spec);
  j["feature_names"] = kFeatureNames;
  j["min"] = c.norm_spec.min;
  j["max"] = c.norm_spec.max;
  j["provenance"] = c.norm_spec.provenance;
  j["r1_norm"] = {{"min", c.r1_norm.min}, {"max", c.r1_norm.max}};
  j["windows_per_condition"] = c.windows;
  return j.dump(2) + "\n";
}

Calibration calibration_from_json(std::string_view text) {
  Calibration c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "bgdbs-calibration v1") {
      raise(ErrorKind::kVersionMismatch, "unknown calibration format");
    }
    const auto names = j.at("feature_names").get<std::vector<std::string>>();
    if (names.size() != kFeatureCount ||
        !std::equal(names.begin(), names.end(), kFeatureNames.begin())) {
      raise(ErrorKind::kVersionMismatch, "calibration feature order differs");
    }
    c.norm_spec.min = j.at("min").get<std::array<double, kFeatureCount>>();
    c.norm_spec.max = j.at("max").get<std::array<double, kFeatureCount>>();
    c.norm_spec.provenance = j.at("provenance").get<std::string>();
    c.r1_norm.min = j.at("r1_norm").at("min").get<double>();
    c.r1_norm.max = j.at("r1_norm").at("max").get<double>();
    c.windows = j.at("windows_per_condition").get<std::size_t>();
    if (j.at("norm_spec_id").get<std::string>() != spec_id(c.norm_spec)) {
      raise(ErrorKind::kCorruptCheckpoint, "calibration bounds do not match their id");
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kConfig, std::string("calibration file: ") + e.what());
  }
  return c;
}

RunReport run_policy(std::string label, const EnvConfig& config, const Policy& policy,
                     int episodes, std::uint64_t seed) {
  if (episodes < 1) raise(ErrorKind::kInvalidArgument, "need >= 1 episode");
  Environment env(config);
  std::vector<double> sgi, vgi, rms, freq, amp;
  RunReport report;
  report.label = std::move(label);
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(e));
    const auto ep = run_episode(env, policy, s);
    sgi.insert(sgi.end(), ep.sgi_power.begin(), ep.sgi_power.end());
    rms.insert(rms.end(), ep.rms.begin(), ep.rms.end());
    freq.insert(freq.end(), ep.frequency.begin(), ep.frequency.end());
    amp.insert(amp.end(), ep.amplitude.begin(), ep.amplitude.end());
    const double dt = env.last_trace().dt_sample;
    if (!ep.v_gi.empty() && !ep.v_gi.front().empty()) {
      vgi.push_back(banded_psd(std::span<const std::vector<double>>(ep.v_gi), dt, kBetaBand,
                               config.features.resolution_hz));
    }
    report.returns.push_back(ep.ret);
    report.seeds.push_back(s);
  }
  report.sgi_power = summarize(sgi);
  report.vgi_beta = summarize(vgi);
  report.rms = summarize(rms);
  report.frequency = summarize(freq);
  report.amplitude = summarize(amp);
  return report;
}

RunReport run_baseline(Baseline which, const EnvConfig& config, int episodes, std::uint64_t seed,
                       OdbsSetting odbs) {
  EnvConfig cfg = config;
  switch (which) {
    case Baseline::kHealthy:
      cfg.condition = Condition::kHealthy;
      return run_policy("Healthy", cfg, zero_action, episodes, seed);
    case Baseline::kPd:
      cfg.condition = Condition::kParkinsonian;
      return run_policy("PD", cfg, zero_action, episodes, seed);
    case Baseline::kOdbs: {
      cfg.condition = Condition::kParkinsonian;
      const StimulusCommand cmd = normalize(odbs.frequency_hz, odbs.amplitude);
      const Policy fixed = [cmd](const Observation&) { return Action{cmd.a0, cmd.a1}; };
      return run_policy("o-DBS", cfg, fixed, episodes, seed);
    }
  }
  raise(ErrorKind::kInvalidArgument, "unknown baseline");
}

bool converged(std::span<const double> ma, int patience, double tolerance) {
  if (patience < 1 || ma.size() < static_cast<std::size_t>(patience)) return false;
  const auto tail = ma.last(static_cast<std::size_t>(patience));
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  return *hi - *lo <= tolerance * std::abs(tail.back());
}

double validation_return(const Agent& agent, const EnvConfig& config, int episodes,
                         std::uint64_t seed) {
  EnvConfig cfg = config;
  cfg.condition = Condition::kParkinsonian;
  const Policy pi = [&agent](const Observation& o) { return agent.policy(o); };
  const RunReport r = run_policy("validation", cfg, pi, episodes, seed);
  return mean_of(r.returns);
}

TrainResult train(const EnvConfig& config, const AgentParams& agent_params,
                  const TrainOptions& options,
                  const std::function<void(const EpisodeRecord&)>& progress) {
  if (options.max_steps < 1 || options.ma_window < 1) {
    raise(ErrorKind::kInvalidArgument, "max_steps and ma_window must be >= 1");
  }
  EnvConfig cfg = config;
  cfg.condition = Condition::kParkinsonian;
  AgentParams ap = agent_params;
  ap.seed = derive_seed(options.seed, kAgentStream);
  TrainResult result{Agent(ap), {}, false, 0, 0.0};
  Agent& agent = result.agent;
  ReplayBuffer buffer(ap.buffer_capacity);
  Environment env(cfg);

  std::vector<double> returns, averages;
  int steps = 0;
  for (int episode = 0; steps < options.max_steps; ++episode) {
    Observation obs =
        env.reset(derive_seed(options.seed, kTrainEpisodeStream + static_cast<std::uint64_t>(episode)));
    double ret = 0.0;
    while (!env.done() && steps < options.max_steps) {
      const Action a = agent.act(obs, true);
      const StepResult r = env.step(a[0], a[1]);
      buffer.push(Transition{obs, a, r.reward, r.observation, r.done});
      ret += r.reward;
      obs = r.observation;
      ++steps;
      if (steps > ap.warmup_steps && buffer.size() >= static_cast<std::size_t>(ap.batch_size)) {
        agent.update(buffer);
      }
    }
    // A step cap mid-episode leaves a partial return; it is not recorded.
    if (!env.done()) break;
    returns.push_back(ret);
    const std::size_t w = std::min<std::size_t>(returns.size(), options.ma_window);
    averages.push_back(mean_of(std::span<const double>(returns).last(w)));
    EpisodeRecord rec{episode, steps, ret, averages.back()};
    result.curve.push_back(rec);
    if (progress) progress(rec);
    const bool past_warmup = steps > ap.warmup_steps + options.ma_window * cfg.episode_len;
    if (past_warmup && converged(averages, options.patience, options.tolerance)) {
      result.early_stopped = true;
      break;
    }
  }
  result.steps = steps;
  result.validation_return = validation_return(agent, config, options.validation_episodes,
                                               derive_seed(config.seed, kValidationStream));
  return result;
}

BestOf train_best_of(const EnvConfig& config, const AgentParams& agent_params,
                     const TrainOptions& options, std::span<const std::uint64_t> seeds,
                     const std::function<void(std::size_t, const EpisodeRecord&)>& progress) {
  if (seeds.empty()) raise(ErrorKind::kInvalidArgument, "need at least one training seed");
  BestOf out;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    TrainOptions opts = options;
    opts.seed = seeds[k];
    std::function<void(const EpisodeRecord&)> hook;
    if (progress) hook = [&progress, k](const EpisodeRecord& r) { progress(k, r); };
    out.runs.push_back(train(config, agent_params, opts, hook));
    if (out.runs[k].validation_return > out.runs[out.best].validation_return) out.best = k;
  }
  return out;
}

RunReport evaluate(const Agent& agent, const EnvConfig& config, int episodes, std::uint64_t seed,
                   std::string label) {
  EnvConfig cfg = config;
  cfg.condition = Condition::kParkinsonian;
  const Policy pi = [&agent](const Observation& o) { return agent.policy(o); };
  return run_policy(std::move(label), cfg, pi, episodes, seed);
}

void write_reports_csv(std::ostream& out, std::span<const RunReport> reports) {
  out << kReportHeader << "\n";
  for (const auto& r : reports) {
    if (r.label.find_first_of(",\n") != std::string::npos) {
      raise(ErrorKind::kInvalidArgument, "report label may not contain ',' or newlines");
    }
    out << r.label;
    for (const Stat* s : {&r.sgi_power, &r.vgi_beta, &r.rms, &r.frequency, &r.amplitude}) {
      out << ',' << fmt(s->mean) << ',' << fmt(s->sd) << ',' << s->count;
    }
    out << ',';
    for (std::size_t i = 0; i < r.returns.size(); ++i) out << (i ? ";" : "") << fmt(r.returns[i]);
    out << ',';
    for (std::size_t i = 0; i < r.seeds.size(); ++i) out << (i ? ";" : "") << r.seeds[i];
    out << ',' << r.config_hash << "\n";
  }
}

std::vector<RunReport> read_reports_csv(std::istream& in) {
  std::string line;
  std::string header;
  for (int i = 0; i < 2 && std::getline(in, line); ++i) header += (i ? "\n" : "") + line;
  if (header != kReportHeader) raise(ErrorKind::kVersionMismatch, "unrecognized report CSV header");
  std::vector<RunReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 19) raise(ErrorKind::kInvalidArgument, "report CSV row has wrong field count");
    RunReport r;
    r.label = std::string(f[0]);
    Stat* stats[] = {&r.sgi_power, &r.vgi_beta, &r.rms, &r.frequency, &r.amplitude};
    for (std::size_t k = 0; k < 5; ++k) {
      stats[k]->mean = parse_double(f[1 + 3 * k]);
      stats[k]->sd = parse_double(f[2 + 3 * k]);
      stats[k]->count = parse_int<std::size_t>(f[3 + 3 * k]);
    }
    if (!f[16].empty()) {
      for (auto v : split(f[16], ';')) r.returns.push_back(parse_double(v));
    }
    if (!f[17].empty()) {
      for (auto v : split(f[17], ';')) r.seeds.push_back(parse_int<std::uint64_t>(v));
    }
    r.config_hash = std::string(f[18]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const EpisodeRecord> curve) {
  out << kCurveHeader << "\n";
  for (const auto& r : curve) {
    out << r.episode << ',' << r.steps << ',' << fmt(r.episode_return) << ','
        << fmt(r.moving_average) << "\n";
  }
}

std::vector<EpisodeRecord> read_curve_csv(std::istream& in) {
  std::string line;
  std::string header;
  for (int i = 0; i < 2 && std::getline(in, line); ++i) header += (i ? "\n" : "") + line;
  if (header != kCurveHeader) raise(ErrorKind::kVersionMismatch, "unrecognized curve CSV header");
  std::vector<EpisodeRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) raise(ErrorKind::kInvalidArgument, "curve CSV row has wrong field count");
    out.push_back(EpisodeRecord{parse_int<int>(f[0]), parse_int<int>(f[1]), parse_double(f[2]),
                                parse_double(f[3])});
  }
  return out;
}

std::string summary_table(std::span<const RunReport> reports) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s | %-21s | %-21s | %-19s | %9s | %9s\n", "",
                "S_Gi 1-20 Hz power", "V_Gi 13-30 Hz power", "RMS power", "freq Hz",
                "amplitude");
  out << buf;
  out << std::string(104, '-') << "\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf),
                  "%-10s | %9.4g +- %-8.3g | %9.4g +- %-8.3g | %8.4g +- %-7.3g | %9.1f | %9.0f\n",
                  r.label.c_str(), r.sgi_power.mean, r.sgi_power.sd, r.vgi_beta.mean,
                  r.vgi_beta.sd, r.rms.mean, r.rms.sd, r.frequency.mean, r.amplitude.mean);
    out << buf;
  }
  return out.str();
}

std::string content_hash(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

}  // namespace bgdbs
