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

// bgdbs command-line driver. All file I/O lives here; the library only sees
// buffers. Every run writes config.json, config.hash and manifest.json into
// its output directory.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bgdbs/bgdbs.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kDivergence = 3, kNan = 4 };

// Failure carrying the process exit code.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(bgdbs_status s) {
  switch (s) {
    case BGDBS_E_DIVERGENCE: return kDivergence;
    case BGDBS_E_NAN_GRADIENT: return kNan;
    case BGDBS_E_INTERNAL: return kInternal;
    default: return kConfig;
  }
}

void check(bgdbs_status s, const char* what) {
  if (s == BGDBS_OK) return;
  throw CliError(exit_code_for(s), std::string(what) + ": " + bgdbs_status_name(s) + ": " +
                                       bgdbs_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Model = std::unique_ptr<bgdbs_model, Deleter<bgdbs_model, bgdbs_model_free>>;
using Cal = std::unique_ptr<bgdbs_calibration, Deleter<bgdbs_calibration, bgdbs_calibration_free>>;
using Env = std::unique_ptr<bgdbs_env, Deleter<bgdbs_env, bgdbs_env_free>>;
using Agent = std::unique_ptr<bgdbs_agent, Deleter<bgdbs_agent, bgdbs_agent_free>>;
using Training = std::unique_ptr<bgdbs_training, Deleter<bgdbs_training, bgdbs_training_free>>;
using Report = std::unique_ptr<bgdbs_report, Deleter<bgdbs_report, bgdbs_report_free>>;

// Calls fn(buf, cap, needed) twice: once to size, once to fill.
template <typename Fn>
std::string fetch_text(Fn&& fn, const char* what) {
  std::size_t needed = 0;
  const bgdbs_status probe = fn(nullptr, 0, &needed);
  if (probe != BGDBS_E_BUFFER_TOO_SMALL) check(probe, what);
  std::string out(needed + 1, '\0');
  check(fn(out.data(), out.size(), &needed), what);
  out.resize(needed);
  return out;
}

std::string read_file(const fs::path& p, const char* what) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CliError(kConfig, std::string("cannot read ") + what + " '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string hash_of(const std::string& bytes) {
  char out[9];
  bgdbs_content_hash(bytes.data(), bytes.size(), out);
  return out;
}

// Output directory plus the list of artifacts written so far.
class RunDir {
 public:
  explicit RunDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw CliError(kConfig, "cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw CliError(kConfig, "cannot write '" + p.string() + "'");
    artifacts_.push_back({{"file", name}, {"bytes", bytes.size()}, {"hash", hash_of(bytes)}});
  }

  // Snapshot of the resolved run configuration. Returns its content hash.
  std::string snapshot(const json& config) {
    const std::string text = config.dump(2) + "\n";
    const std::string h = hash_of(text);
    write("config.json", text);
    write("config.hash", h + "\n");
    return h;
  }

  void manifest(int code, const std::string& error) {
    json m;
    m["status"] = code == kOk ? "complete" : "partial";
    m["exit_code"] = code;
    if (!error.empty()) m["error"] = error;
    m["artifacts"] = artifacts_;
    std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
    out << m.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  json artifacts_ = json::array();
};

struct CommonOptions {
  std::string params = BGDBS_DEFAULT_PARAMS;
  std::string out;
  std::uint64_t seed = 0;
  bgdbs_env_options env{};
  int trace_episodes = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  bgdbs_env_options_default(&o.env);
  cmd->add_option("--params", o.params, "model parameter YAML file")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory (created if missing)")->required();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--timestep-ms", o.env.timestep_ms, "agent timestep (ms)")->capture_default_str();
  cmd->add_option("--episode-len", o.env.episode_len, "timesteps per episode")->capture_default_str();
  cmd->add_option("--theta", o.env.theta, "frequency weight of the power penalty")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.env.epsilon, "weight of the S_Gi term in the reward")
      ->capture_default_str();
  cmd->add_option("--settle-ms", o.env.settle_ms, "simulated time before the first observation (ms)")
      ->capture_default_str();
}

json env_json(const bgdbs_env_options& e) {
  return {{"timestep_ms", e.timestep_ms}, {"episode_len", e.episode_len}, {"theta", e.theta},
          {"epsilon", e.epsilon},         {"settle_ms", e.settle_ms}};
}

json common_json(const std::string& cmd, const CommonOptions& o, const std::string& params_text) {
  json j;
  j["subcommand"] = cmd;
  j["version"] = bgdbs_version();
  j["params_file"] = o.params;
  j["params_hash"] = hash_of(params_text);
  j["seed"] = o.seed;
  j["env"] = env_json(o.env);
  return j;
}

Model load_model(const std::string& text) {
  bgdbs_model* m = nullptr;
  check(bgdbs_model_parse(text.data(), text.size(), &m), "parameter file");
  return Model(m);
}

Cal load_calibration(const std::string& path) {
  const std::string text = read_file(path, "calibration file");
  bgdbs_calibration* c = nullptr;
  check(bgdbs_calibration_parse(text.data(), text.size(), &c), "calibration file");
  return Cal(c);
}

std::string calibration_id(const bgdbs_calibration* cal) {
  return fetch_text([&](char* b, std::size_t n, std::size_t* k) { return bgdbs_calibration_id(cal, b, n, k); },
                    "calibration id");
}

std::uint64_t hash_value(const std::string& hex) { return std::stoull(hex, nullptr, 16); }

// Writes report.csv and summary.txt for a set of reports.
void write_reports(RunDir& dir, const std::vector<Report>& reports) {
  std::vector<const bgdbs_report*> raw;
  for (const auto& r : reports) raw.push_back(r.get());
  dir.write("report.csv", fetch_text([&](char* b, std::size_t n, std::size_t* k) {
              return bgdbs_reports_csv(raw.data(), raw.size(), b, n, k);
            }, "report csv"));
  const std::string table = fetch_text([&](char* b, std::size_t n, std::size_t* k) {
    return bgdbs_reports_table(raw.data(), raw.size(), b, n, k);
  }, "summary table");
  dir.write("summary.txt", table);
  std::cout << table;
}

// Re-runs `episodes` episodes step by step and writes per-step JSON lines.
template <typename Policy>
void write_trace(RunDir& dir, const std::string& name, const bgdbs_model* model,
                 const bgdbs_calibration* cal, const CommonOptions& o, bgdbs_condition cond,
                 Policy&& policy) {
  if (o.trace_episodes <= 0) return;
  bgdbs_env* raw = nullptr;
  check(bgdbs_env_create(model, cal, &o.env, cond, &raw), "trace env");
  Env env(raw);
  std::string lines;
  for (int e = 0; e < o.trace_episodes; ++e) {
    double obs[BGDBS_FEATURES];
    check(bgdbs_env_reset(env.get(), bgdbs_derive_seed(o.seed, 7000000u + e), obs), "trace reset");
    bgdbs_step_result r{};
    do {
      double a[BGDBS_ACTIONS];
      policy(obs, a);
      check(bgdbs_env_step(env.get(), a[0], a[1], &r), "trace step");
      std::copy(std::begin(r.observation), std::end(r.observation), obs);
      lines += fetch_text([&](char* b, std::size_t n, std::size_t* k) {
        return bgdbs_env_last_step_json(env.get(), b, n, k);
      }, "trace line");
      lines += '\n';
    } while (r.done == 0);
  }
  dir.write(name, lines);
}

// Normalized action for a fixed (frequency, amplitude) setting.
void fixed_action(double f, double amp, double a[BGDBS_ACTIONS]) {
  a[0] = f / 185.0 * 2.0 - 1.0;
  a[1] = amp / 5000.0 * 2.0 - 1.0;
}

// ---------------------------------------------------------------- commands

struct CalibrateOptions {
  int episodes = 10;
};

void cmd_calibrate(const CommonOptions& o, const CalibrateOptions& c, RunDir& dir) {
  const std::string params = read_file(o.params, "parameter file");
  json cfg = common_json("calibrate", o, params);
  cfg["episodes"] = c.episodes;
  dir.snapshot(cfg);
  dir.write("params.yaml", params);
  const Model model = load_model(params);
  bgdbs_calibration* raw = nullptr;
  check(bgdbs_calibrate(model.get(), &o.env, c.episodes, o.seed, &raw), "calibration");
  const Cal cal(raw);
  dir.write("calibration.json", fetch_text([&](char* b, std::size_t n, std::size_t* k) {
              return bgdbs_calibration_json(cal.get(), b, n, k);
            }, "calibration json"));
  double lo = 0, hi = 0;
  check(bgdbs_calibration_r1(cal.get(), &lo, &hi), "r1 anchors");
  std::printf("calibration %s  r1 anchors [%.6g, %.6g]\n", calibration_id(cal.get()).c_str(), lo, hi);
}

struct BaselineOptions {
  std::string calibration;
  std::string condition = "all";
  int episodes = 30;
  double frequency = 130.0;
  double amplitude = 2500.0;
};

void cmd_baseline(const CommonOptions& o, const BaselineOptions& b, RunDir& dir) {
  const std::string params = read_file(o.params, "parameter file");
  const Model model = load_model(params);
  const Cal cal = load_calibration(b.calibration);
  json cfg = common_json("baseline", o, params);
  cfg["calibration_id"] = calibration_id(cal.get());
  cfg["condition"] = b.condition;
  cfg["episodes"] = b.episodes;
  cfg["odbs"] = {{"frequency_hz", b.frequency}, {"amplitude", b.amplitude}};
  const std::string h = dir.snapshot(cfg);

  std::vector<bgdbs_baseline> which;
  if (b.condition == "healthy" || b.condition == "all") which.push_back(BGDBS_BASELINE_HEALTHY);
  if (b.condition == "pd" || b.condition == "all") which.push_back(BGDBS_BASELINE_PD);
  if (b.condition == "odbs" || b.condition == "all") which.push_back(BGDBS_BASELINE_ODBS);

  std::vector<Report> reports;
  for (const auto w : which) {
    bgdbs_report* raw = nullptr;
    check(bgdbs_run_baseline(model.get(), cal.get(), &o.env, w, b.episodes, o.seed, b.frequency,
                             b.amplitude, &raw),
          "baseline");
    reports.emplace_back(raw);
    check(bgdbs_report_set_config_hash(raw, h.c_str()), "config hash");
  }
  write_reports(dir, reports);
  if (b.condition == "odbs") {
    write_trace(dir, "trace.jsonl", model.get(), cal.get(), o, BGDBS_PARKINSONIAN,
                [&](const double*, double* a) { fixed_action(b.frequency, b.amplitude, a); });
  }
}

struct TrainOptions {
  std::string calibration;
  int runs = 3;
  bgdbs_train_options train{};
  bgdbs_agent_options agent{};
};

void progress(void* user, std::size_t run, const bgdbs_episode_record* rec) {
  const int every = *static_cast<const int*>(user);
  if (every > 0 && rec->episode % every == 0) {
    std::fprintf(stderr, "run %zu  episode %4d  steps %5d  return %8.4f  ma %8.4f\n", run,
                 rec->episode, rec->steps, rec->episode_return, rec->moving_average);
  }
}

void cmd_train(const CommonOptions& o, const TrainOptions& t, RunDir& dir, int report_every) {
  const std::string params = read_file(o.params, "parameter file");
  const Model model = load_model(params);
  const Cal cal = load_calibration(t.calibration);
  if (t.runs < 1) throw CliError(kConfig, "--runs must be at least 1");

  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < t.runs; ++k) seeds.push_back(bgdbs_derive_seed(o.seed, 8000000u + k));

  json cfg = common_json("train", o, params);
  cfg["calibration_id"] = calibration_id(cal.get());
  cfg["run_seeds"] = seeds;
  cfg["train"] = {{"max_steps", t.train.max_steps},
                  {"ma_window", t.train.ma_window},
                  {"patience", t.train.patience},
                  {"tolerance", t.train.tolerance},
                  {"validation_episodes", t.train.validation_episodes}};
  const auto& a = t.agent;
  cfg["agent"] = {{"gamma", a.gamma},
                  {"tau", a.tau},
                  {"policy_delay", a.policy_delay},
                  {"target_noise_sigma", a.target_noise_sigma},
                  {"target_noise_clip", a.target_noise_clip},
                  {"exploration_sigma", a.exploration_sigma},
                  {"batch_size", a.batch_size},
                  {"buffer_capacity", a.buffer_capacity},
                  {"actor_lr", a.actor_lr},
                  {"critic_lr", a.critic_lr},
                  {"warmup_steps", a.warmup_steps},
                  {"hidden", {a.hidden[0], a.hidden[1]}}};
  const std::string h = dir.snapshot(cfg);

  bgdbs_training* raw = nullptr;
  int every = report_every;
  check(bgdbs_train(model.get(), cal.get(), &o.env, &t.agent, &t.train, seeds.data(), seeds.size(),
                    progress, &every, &raw),
        "training");
  const Training tr(raw);

  std::string summary = "run  seed                  steps  early_stop  validation_return\n";
  for (std::size_t k = 0; k < bgdbs_training_runs(tr.get()); ++k) {
    dir.write("curve_run" + std::to_string(k) + ".csv",
              fetch_text([&](char* b, std::size_t n, std::size_t* need) {
                return bgdbs_training_curve_csv(tr.get(), k, b, n, need);
              }, "curve csv"));
    double val = 0;
    int steps = 0, early = 0;
    check(bgdbs_training_run_info(tr.get(), k, &val, &steps, &early), "run info");
    char line[160];
    std::snprintf(line, sizeof line, "%-4zu %-21llu %5d  %-10s  %.6f\n", k,
                  static_cast<unsigned long long>(seeds[k]), steps, early != 0 ? "yes" : "no", val);
    summary += line;
  }
  const std::size_t best = bgdbs_training_best(tr.get());
  summary += "best run " + std::to_string(best) + "\n";
  dir.write("training.txt", summary);
  std::cout << summary;

  bgdbs_agent* agent_raw = nullptr;
  check(bgdbs_training_agent(tr.get(), best, &agent_raw), "best agent");
  const Agent agent(agent_raw);
  std::string ckpt;
  std::size_t needed = 0;
  bgdbs_agent_save(agent.get(), cal.get(), hash_value(h), nullptr, 0, &needed);
  ckpt.resize(needed);
  check(bgdbs_agent_save(agent.get(), cal.get(), hash_value(h),
                         reinterpret_cast<std::uint8_t*>(ckpt.data()), ckpt.size(), &needed),
        "checkpoint");
  dir.write("checkpoint.bin", ckpt);
}

struct EvaluateOptions {
  std::string calibration;
  std::string checkpoint;
  int episodes = 30;
  bool baselines = false;
};

void cmd_evaluate(const CommonOptions& o, const EvaluateOptions& e, RunDir& dir) {
  const std::string params = read_file(o.params, "parameter file");
  const Model model = load_model(params);
  const Cal cal = load_calibration(e.calibration);
  const std::string bytes = read_file(e.checkpoint, "checkpoint");
  bgdbs_agent* agent_raw = nullptr;
  check(bgdbs_agent_load(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size(),
                         &agent_raw),
        "checkpoint");
  const Agent agent(agent_raw);

  const std::string cal_id = calibration_id(cal.get());
  const std::string ckpt_id = fetch_text([&](char* b, std::size_t n, std::size_t* k) {
    return bgdbs_agent_norm_id(agent.get(), b, n, k);
  }, "checkpoint id");

  json cfg = common_json("evaluate", o, params);
  cfg["calibration_id"] = cal_id;
  cfg["checkpoint"] = e.checkpoint;
  cfg["checkpoint_hash"] = hash_of(bytes);
  cfg["checkpoint_norm_id"] = ckpt_id;
  cfg["episodes"] = e.episodes;
  cfg["baselines"] = e.baselines;
  const std::string h = dir.snapshot(cfg);
  if (ckpt_id != cal_id) {
    throw CliError(kConfig, "checkpoint was trained against calibration " + ckpt_id +
                                " but " + cal_id + " was given");
  }

  std::vector<Report> reports;
  if (e.baselines) {
    for (const auto w : {BGDBS_BASELINE_HEALTHY, BGDBS_BASELINE_PD, BGDBS_BASELINE_ODBS}) {
      bgdbs_report* raw = nullptr;
      check(bgdbs_run_baseline(model.get(), cal.get(), &o.env, w, e.episodes, o.seed, 130.0, 2500.0,
                               &raw),
            "baseline");
      reports.emplace_back(raw);
    }
  }
  bgdbs_report* raw = nullptr;
  check(bgdbs_evaluate(agent.get(), model.get(), cal.get(), &o.env, e.episodes, o.seed, &raw),
        "evaluation");
  reports.emplace_back(raw);
  for (const auto& r : reports) check(bgdbs_report_set_config_hash(r.get(), h.c_str()), "config hash");
  write_reports(dir, reports);
  write_trace(dir, "trace.jsonl", model.get(), cal.get(), o, BGDBS_PARKINSONIAN,
              [&](const double* obs, double* a) {
                check(bgdbs_agent_act(agent.get(), obs, a), "policy");
              });
}

struct WaveformOptions {
  double frequency = 130.0;
  double amplitude = 2500.0;
  double duration_ms = 100.0;
  double dt_ms = 0.025;
};

void cmd_waveform(const CommonOptions& o, const WaveformOptions& w, RunDir& dir) {
  json cfg;
  cfg["subcommand"] = "export-waveform";
  cfg["version"] = bgdbs_version();
  cfg["frequency_hz"] = w.frequency;
  cfg["amplitude"] = w.amplitude;
  cfg["duration_ms"] = w.duration_ms;
  cfg["dt_ms"] = w.dt_ms;
  dir.snapshot(cfg);
  (void)o;

  std::size_t needed = 0;
  bgdbs_stim_synthesize(w.frequency, w.amplitude, w.duration_ms, w.dt_ms, nullptr, 0, &needed);
  std::vector<double> samples(needed);
  check(bgdbs_stim_synthesize(w.frequency, w.amplitude, w.duration_ms, w.dt_ms, samples.data(),
                              samples.size(), &needed),
        "waveform");
  double rms = 0;
  check(bgdbs_stim_rms(w.frequency, w.amplitude, w.duration_ms, w.dt_ms, &rms), "rms");

  std::ostringstream csv;
  csv << "# bgdbs-waveform v1\nt_ms,i_dbs\n";
  char line[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", static_cast<double>(i) * w.dt_ms, samples[i]);
    csv << line;
  }
  dir.write("waveform.csv", csv.str());
  std::printf("%zu samples  rms %.4f  closed form %.4f\n", samples.size(), rms,
              bgdbs_ideal_rms(w.frequency, w.amplitude));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Basal-ganglia DBS simulator and TD3 controller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bgdbs_version());

  CommonOptions common;

  auto* calibrate = app.add_subcommand("calibrate", "derive feature and reward normalization");
  CalibrateOptions cal_opts;
  add_common(calibrate, common);
  calibrate->add_option("--episodes", cal_opts.episodes, "episodes per condition")
      ->capture_default_str();

  auto* baseline = app.add_subcommand("baseline", "run healthy, PD or open-loop DBS baselines");
  BaselineOptions base_opts;
  add_common(baseline, common);
  baseline->add_option("--calibration", base_opts.calibration, "calibration.json")->required();
  baseline->add_option("--condition", base_opts.condition, "healthy, pd, odbs or all")
      ->check(CLI::IsMember({"healthy", "pd", "odbs", "all"}))
      ->capture_default_str();
  baseline->add_option("--episodes", base_opts.episodes, "1 s episodes per report")
      ->capture_default_str();
  baseline->add_option("--frequency", base_opts.frequency, "open-loop frequency (Hz)")
      ->capture_default_str();
  baseline->add_option("--amplitude", base_opts.amplitude, "open-loop amplitude (uA/cm^2)")
      ->capture_default_str();
  baseline->add_option("--trace", common.trace_episodes, "episodes to record as trace.jsonl (odbs)")
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "train TD3 agents and keep the best");
  TrainOptions train_opts;
  bgdbs_train_options_default(&train_opts.train);
  bgdbs_agent_options_default(&train_opts.agent);
  int report_every = 10;
  add_common(train, common);
  train->add_option("--calibration", train_opts.calibration, "calibration.json")->required();
  train->add_option("--runs", train_opts.runs, "independent runs, best kept")->capture_default_str();
  train->add_option("--max-steps", train_opts.train.max_steps, "environment steps per run")
      ->capture_default_str();
  train->add_option("--ma-window", train_opts.train.ma_window, "episodes in the moving average")
      ->capture_default_str();
  train->add_option("--patience", train_opts.train.patience, "plateau length in episodes")
      ->capture_default_str();
  train->add_option("--tolerance", train_opts.train.tolerance, "relative plateau band")
      ->capture_default_str();
  train->add_option("--validation-episodes", train_opts.train.validation_episodes,
                    "episodes used to rank runs")
      ->capture_default_str();
  train->add_option("--warmup", train_opts.agent.warmup_steps, "uniform-action steps")
      ->capture_default_str();
  train->add_option("--batch-size", train_opts.agent.batch_size)->capture_default_str();
  train->add_option("--actor-lr", train_opts.agent.actor_lr)->capture_default_str();
  train->add_option("--critic-lr", train_opts.agent.critic_lr)->capture_default_str();
  train->add_option("--gamma", train_opts.agent.gamma)->capture_default_str();
  train->add_option("--tau", train_opts.agent.tau)->capture_default_str();
  train->add_option("--exploration-sigma", train_opts.agent.exploration_sigma)
      ->capture_default_str();
  train->add_option("--progress-every", report_every, "episodes between progress lines (0 = off)")
      ->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on PD parameters");
  EvaluateOptions eval_opts;
  add_common(evaluate, common);
  evaluate->add_option("--calibration", eval_opts.calibration, "calibration.json")->required();
  evaluate->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint.bin")->required();
  evaluate->add_option("--episodes", eval_opts.episodes, "1 s episodes")->capture_default_str();
  evaluate->add_flag("--baselines", eval_opts.baselines, "also report healthy, PD and o-DBS rows");
  evaluate->add_option("--trace", common.trace_episodes, "episodes to record as trace.jsonl")
      ->capture_default_str();

  auto* waveform = app.add_subcommand("export-waveform", "write a sampled stimulus train");
  WaveformOptions wave_opts;
  waveform->add_option("--out", common.out, "output directory")->required();
  waveform->add_option("--frequency", wave_opts.frequency, "Hz")->capture_default_str();
  waveform->add_option("--amplitude", wave_opts.amplitude, "uA/cm^2")->capture_default_str();
  waveform->add_option("--duration-ms", wave_opts.duration_ms, "ms")->capture_default_str();
  waveform->add_option("--dt-ms", wave_opts.dt_ms, "sample interval (ms)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  std::unique_ptr<RunDir> dir;
  try {
    dir = std::make_unique<RunDir>(common.out);
    if (calibrate->parsed()) cmd_calibrate(common, cal_opts, *dir);
    if (baseline->parsed()) cmd_baseline(common, base_opts, *dir);
    if (train->parsed()) cmd_train(common, train_opts, *dir, report_every);
    if (evaluate->parsed()) cmd_evaluate(common, eval_opts, *dir);
    if (waveform->parsed()) cmd_waveform(common, wave_opts, *dir);
    dir->manifest(kOk, "");
    return kOk;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (dir) dir->manifest(e.code(), e.what());
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (dir) dir->manifest(kInternal, e.what());
    return kInternal;
  }
}
