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

#include "bgdbs/bgdbs.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bgdbs/errors.hpp"
#include "bgdbs/harness.hpp"
#include "bgdbs/random.hpp"

struct bgdbs_model {
  bgdbs::ModelParams params;
};

struct bgdbs_calibration {
  bgdbs::Calibration cal;
};

struct bgdbs_env {
  bgdbs::Environment env;
  std::optional<bgdbs::StepResult> last;
};

struct bgdbs_agent {
  bgdbs::Agent agent;
  std::string norm_id;
};

struct bgdbs_training {
  bgdbs::BestOf result;
};

struct bgdbs_report {
  bgdbs::RunReport report;
};

namespace {

thread_local std::string g_last_error;

bgdbs_status status_of(bgdbs::ErrorKind kind) {
  using bgdbs::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return BGDBS_E_INVALID_ARGUMENT;
    case ErrorKind::kConfig: return BGDBS_E_CONFIG;
    case ErrorKind::kIo: return BGDBS_E_IO;
    case ErrorKind::kNumericalDivergence: return BGDBS_E_DIVERGENCE;
    case ErrorKind::kPulseOverlap: return BGDBS_E_PULSE_OVERLAP;
    case ErrorKind::kWindowTooShort: return BGDBS_E_WINDOW_TOO_SHORT;
    case ErrorKind::kBandOutOfRange: return BGDBS_E_BAND_OUT_OF_RANGE;
    case ErrorKind::kDegenerateSignal: return BGDBS_E_DEGENERATE_SIGNAL;
    case ErrorKind::kDegenerateRange: return BGDBS_E_DEGENERATE_RANGE;
    case ErrorKind::kEpisodeFinished: return BGDBS_E_EPISODE_FINISHED;
    case ErrorKind::kNanGradient: return BGDBS_E_NAN_GRADIENT;
    case ErrorKind::kVersionMismatch: return BGDBS_E_VERSION_MISMATCH;
    case ErrorKind::kCorruptCheckpoint: return BGDBS_E_CORRUPT_CHECKPOINT;
  }
  return BGDBS_E_INTERNAL;
}

bgdbs_status fail(bgdbs_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
bgdbs_status guarded(Fn&& fn) noexcept {
  try {
    return fn();
  } catch (const bgdbs::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BGDBS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BGDBS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(BGDBS_E_INTERNAL, "unknown exception");
  }
}

bgdbs_status null_arg(const char* name) {
  return fail(BGDBS_E_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

bgdbs_status copy_out(const void* data, std::size_t n, void* buf, std::size_t cap,
                      std::size_t* needed, bool text) {
  if (needed != nullptr) *needed = n;
  const std::size_t total = n + (text ? 1 : 0);
  if (buf == nullptr || cap < total) {
    return fail(BGDBS_E_BUFFER_TOO_SMALL, "output buffer needs " + std::to_string(total) + " bytes");
  }
  if (n > 0) std::memcpy(buf, data, n);
  if (text) static_cast<char*>(buf)[n] = '\0';
  return BGDBS_OK;
}

bgdbs_status copy_text(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  return copy_out(s.data(), s.size(), buf, cap, needed, true);
}

bgdbs::EnvConfig env_config(const bgdbs_model* model, const bgdbs_calibration* cal,
                            const bgdbs_env_options* o) {
  bgdbs::EnvConfig c;
  c.model = model->params;
  if (cal != nullptr) {
    c.norm_spec = cal->cal.norm_spec;
    c.r1_norm = cal->cal.r1_norm;
  } else {
    c.norm_spec.min.fill(0.0);
    c.norm_spec.max.fill(1.0);
  }
  if (o != nullptr) {
    c.timestep_ms = o->timestep_ms;
    c.episode_len = o->episode_len;
    c.theta = o->theta;
    c.epsilon = o->epsilon;
    c.settle_ms = o->settle_ms;
    c.seed = o->seed;
  }
  return c;
}

bgdbs::AgentParams agent_params(const bgdbs_agent_options* o) {
  bgdbs::AgentParams p;
  if (o == nullptr) return p;
  p.gamma = o->gamma;
  p.tau = o->tau;
  p.policy_delay = o->policy_delay;
  p.target_noise_sigma = o->target_noise_sigma;
  p.target_noise_clip = o->target_noise_clip;
  p.exploration_sigma = o->exploration_sigma;
  p.batch_size = o->batch_size;
  p.buffer_capacity = o->buffer_capacity;
  p.actor_lr = o->actor_lr;
  p.critic_lr = o->critic_lr;
  p.warmup_steps = o->warmup_steps;
  p.hidden = {o->hidden[0], o->hidden[1]};
  return p;
}

bgdbs_stat stat_of(const bgdbs::Stat& s) { return bgdbs_stat{s.mean, s.sd, s.count}; }

std::vector<bgdbs::RunReport> gather(const bgdbs_report* const* reports, std::size_t n) {
  std::vector<bgdbs::RunReport> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i] == nullptr) bgdbs::raise(bgdbs::ErrorKind::kInvalidArgument, "NULL report");
    out.push_back(reports[i]->report);
  }
  return out;
}

}  // namespace

extern "C" {

const char* bgdbs_version(void) { return "0.1.0"; }

const char* bgdbs_last_error(void) { return g_last_error.c_str(); }

const char* bgdbs_status_name(bgdbs_status status) {
  switch (status) {
    case BGDBS_OK: return "ok";
    case BGDBS_E_INVALID_ARGUMENT: return "invalid argument";
    case BGDBS_E_CONFIG: return "config error";
    case BGDBS_E_IO: return "I/O error";
    case BGDBS_E_DIVERGENCE: return "numerical divergence";
    case BGDBS_E_PULSE_OVERLAP: return "pulse overlap";
    case BGDBS_E_WINDOW_TOO_SHORT: return "window too short";
    case BGDBS_E_BAND_OUT_OF_RANGE: return "band out of range";
    case BGDBS_E_DEGENERATE_SIGNAL: return "degenerate signal";
    case BGDBS_E_DEGENERATE_RANGE: return "degenerate range";
    case BGDBS_E_EPISODE_FINISHED: return "episode finished";
    case BGDBS_E_NAN_GRADIENT: return "NaN gradient";
    case BGDBS_E_VERSION_MISMATCH: return "version mismatch";
    case BGDBS_E_CORRUPT_CHECKPOINT: return "corrupt checkpoint";
    case BGDBS_E_BUFFER_TOO_SMALL: return "buffer too small";
    case BGDBS_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bgdbs_feature_name(int index) {
  if (index < 0 || index >= BGDBS_FEATURES) return nullptr;
  return bgdbs::kFeatureNames[static_cast<std::size_t>(index)].data();
}

bgdbs_status bgdbs_model_parse(const char* yaml, size_t len, bgdbs_model** out) {
  if (yaml == nullptr) return null_arg("yaml");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto m = std::make_unique<bgdbs_model>();
    m->params = bgdbs::parse_model_params(std::string_view(yaml, len));
    *out = m.release();
    return BGDBS_OK;
  });
}

void bgdbs_model_free(bgdbs_model* model) { delete model; }

double bgdbs_ideal_rms(double frequency_hz, double amplitude) {
  return bgdbs::ideal_rms_power(frequency_hz, amplitude);
}

bgdbs_status bgdbs_stim_rms(double frequency_hz, double amplitude, double duration_ms,
                            double dt_ms, double* out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto cmd = bgdbs::normalize(frequency_hz, amplitude);
    *out = bgdbs::rms_power(bgdbs::synthesize(cmd, duration_ms, dt_ms));
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_stim_synthesize(double frequency_hz, double amplitude, double duration_ms,
                                   double dt_ms, double* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    const auto cmd = bgdbs::normalize(frequency_hz, amplitude);
    const auto wave = bgdbs::synthesize(cmd, duration_ms, dt_ms);
    if (needed != nullptr) *needed = wave.samples.size();
    if (buf == nullptr || cap < wave.samples.size()) {
      return fail(BGDBS_E_BUFFER_TOO_SMALL,
                  "waveform needs " + std::to_string(wave.samples.size()) + " samples");
    }
    std::copy(wave.samples.begin(), wave.samples.end(), buf);
    return BGDBS_OK;
  });
}

void bgdbs_env_options_default(bgdbs_env_options* out) {
  if (out == nullptr) return;
  const bgdbs::EnvConfig d;
  *out = bgdbs_env_options{d.timestep_ms, d.episode_len, d.theta, d.epsilon, d.settle_ms, d.seed};
}

bgdbs_status bgdbs_calibrate(const bgdbs_model* model, const bgdbs_env_options* options,
                             int episodes, uint64_t seed, bgdbs_calibration** out) {
  if (model == nullptr) return null_arg("model");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto c = std::make_unique<bgdbs_calibration>();
    c->cal = bgdbs::calibrate(env_config(model, nullptr, options), episodes, seed);
    *out = c.release();
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_calibration_parse(const char* json, size_t len, bgdbs_calibration** out) {
  if (json == nullptr) return null_arg("json");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto c = std::make_unique<bgdbs_calibration>();
    c->cal = bgdbs::calibration_from_json(std::string_view(json, len));
    *out = c.release();
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_calibration_json(const bgdbs_calibration* cal, char* buf, size_t cap,
                                    size_t* needed) {
  if (cal == nullptr) return null_arg("cal");
  return guarded([&] { return copy_text(bgdbs::to_json(cal->cal), buf, cap, needed); });
}

bgdbs_status bgdbs_calibration_id(const bgdbs_calibration* cal, char* buf, size_t cap,
                                  size_t* needed) {
  if (cal == nullptr) return null_arg("cal");
  return guarded([&] { return copy_text(bgdbs::spec_id(cal->cal.norm_spec), buf, cap, needed); });
}

bgdbs_status bgdbs_calibration_r1(const bgdbs_calibration* cal, double* r1_min, double* r1_max) {
  if (cal == nullptr) return null_arg("cal");
  if (r1_min != nullptr) *r1_min = cal->cal.r1_norm.min;
  if (r1_max != nullptr) *r1_max = cal->cal.r1_norm.max;
  return BGDBS_OK;
}

void bgdbs_calibration_free(bgdbs_calibration* cal) { delete cal; }

bgdbs_status bgdbs_env_create(const bgdbs_model* model, const bgdbs_calibration* cal,
                              const bgdbs_env_options* options, bgdbs_condition condition,
                              bgdbs_env** out) {
  if (model == nullptr) return null_arg("model");
  if (cal == nullptr) return null_arg("cal");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto cfg = env_config(model, cal, options);
    cfg.condition = condition == BGDBS_HEALTHY ? bgdbs::Condition::kHealthy
                                               : bgdbs::Condition::kParkinsonian;
    *out = new bgdbs_env{bgdbs::Environment(std::move(cfg)), std::nullopt};
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_env_reset(bgdbs_env* env, uint64_t seed, double observation[BGDBS_FEATURES]) {
  if (env == nullptr) return null_arg("env");
  return guarded([&] {
    const auto obs = env->env.reset(seed);
    env->last.reset();
    if (observation != nullptr) std::copy(obs.begin(), obs.end(), observation);
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_env_step(bgdbs_env* env, double a0, double a1, bgdbs_step_result* out) {
  if (env == nullptr) return null_arg("env");
  return guarded([&] {
    const auto r = env->env.step(a0, a1);
    env->last = r;
    if (out != nullptr) {
      std::copy(r.observation.begin(), r.observation.end(), out->observation);
      out->reward = r.reward;
      out->done = r.done ? 1 : 0;
      out->timestep = r.timestep;
      out->r1_raw = r.info.r1_raw;
      out->r1 = r.info.r1;
      out->r2 = r.info.r2;
      std::copy(r.info.features.begin(), r.info.features.end(), out->features);
      out->frequency_hz = r.info.command.frequency_hz;
      out->amplitude = r.info.command.amplitude;
      out->rms = r.info.rms;
      out->clamped = r.info.command.clamped ? 1 : 0;
      out->diverged = r.info.diverged ? 1 : 0;
    }
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_env_last_step_json(const bgdbs_env* env, char* buf, size_t cap,
                                      size_t* needed) {
  if (env == nullptr) return null_arg("env");
  if (!env->last) return fail(BGDBS_E_INVALID_ARGUMENT, "no step taken since reset");
  return guarded([&] { return copy_text(bgdbs::to_json_line(*env->last), buf, cap, needed); });
}

void bgdbs_env_free(bgdbs_env* env) { delete env; }

void bgdbs_agent_options_default(bgdbs_agent_options* out) {
  if (out == nullptr) return;
  const bgdbs::AgentParams d;
  *out = bgdbs_agent_options{d.gamma,
                             d.tau,
                             d.policy_delay,
                             d.target_noise_sigma,
                             d.target_noise_clip,
                             d.exploration_sigma,
                             d.batch_size,
                             d.buffer_capacity,
                             d.actor_lr,
                             d.critic_lr,
                             d.warmup_steps,
                             {d.hidden[0], d.hidden[1]}};
}

bgdbs_status bgdbs_agent_act(const bgdbs_agent* agent, const double observation[BGDBS_FEATURES],
                             double action[BGDBS_ACTIONS]) {
  if (agent == nullptr) return null_arg("agent");
  if (observation == nullptr) return null_arg("observation");
  if (action == nullptr) return null_arg("action");
  return guarded([&] {
    bgdbs::Observation obs{};
    std::copy(observation, observation + BGDBS_FEATURES, obs.begin());
    const auto a = agent->agent.policy(obs);
    action[0] = a[0];
    action[1] = a[1];
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_agent_save(const bgdbs_agent* agent, const bgdbs_calibration* cal,
                              uint64_t config_hash, uint8_t* buf, size_t cap, size_t* needed) {
  if (agent == nullptr) return null_arg("agent");
  if (cal == nullptr) return null_arg("cal");
  return guarded([&] {
    const auto bytes =
        agent->agent.save(bgdbs::CheckpointMeta{bgdbs::spec_id(cal->cal.norm_spec), config_hash});
    return copy_out(bytes.data(), bytes.size(), buf, cap, needed, false);
  });
}

bgdbs_status bgdbs_agent_load(const uint8_t* bytes, size_t len, bgdbs_agent** out) {
  if (bytes == nullptr) return null_arg("bytes");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    bgdbs::CheckpointMeta meta;
    auto agent = bgdbs::Agent::load(std::span<const std::uint8_t>(bytes, len), &meta);
    *out = new bgdbs_agent{std::move(agent), meta.norm_spec_id};
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_agent_norm_id(const bgdbs_agent* agent, char* buf, size_t cap, size_t* needed) {
  if (agent == nullptr) return null_arg("agent");
  return guarded([&] { return copy_text(agent->norm_id, buf, cap, needed); });
}

void bgdbs_agent_free(bgdbs_agent* agent) { delete agent; }

void bgdbs_train_options_default(bgdbs_train_options* out) {
  if (out == nullptr) return;
  const bgdbs::TrainOptions d;
  *out = bgdbs_train_options{d.max_steps, d.ma_window, d.patience, d.tolerance,
                             d.validation_episodes};
}

bgdbs_status bgdbs_train(const bgdbs_model* model, const bgdbs_calibration* cal,
                         const bgdbs_env_options* env_options,
                         const bgdbs_agent_options* agent_options,
                         const bgdbs_train_options* train_options, const uint64_t* seeds,
                         size_t n_seeds, bgdbs_progress_fn progress, void* user,
                         bgdbs_training** out) {
  if (model == nullptr) return null_arg("model");
  if (cal == nullptr) return null_arg("cal");
  if (seeds == nullptr || n_seeds == 0) return null_arg("seeds");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    bgdbs::TrainOptions opts;
    if (train_options != nullptr) {
      opts.max_steps = train_options->max_steps;
      opts.ma_window = train_options->ma_window;
      opts.patience = train_options->patience;
      opts.tolerance = train_options->tolerance;
      opts.validation_episodes = train_options->validation_episodes;
    }
    std::function<void(std::size_t, const bgdbs::EpisodeRecord&)> hook;
    if (progress != nullptr) {
      hook = [progress, user](std::size_t run, const bgdbs::EpisodeRecord& r) {
        const bgdbs_episode_record rec{r.episode, r.steps, r.episode_return, r.moving_average};
        progress(user, run, &rec);
      };
    }
    auto t = std::make_unique<bgdbs_training>();
    t->result = bgdbs::train_best_of(env_config(model, cal, env_options),
                                     agent_params(agent_options), opts,
                                     std::span<const std::uint64_t>(seeds, n_seeds), hook);
    *out = t.release();
    return BGDBS_OK;
  });
}

size_t bgdbs_training_runs(const bgdbs_training* t) { return t ? t->result.runs.size() : 0; }

size_t bgdbs_training_best(const bgdbs_training* t) { return t ? t->result.best : 0; }

bgdbs_status bgdbs_training_run_info(const bgdbs_training* t, size_t run,
                                     double* validation_return, int* steps, int* early_stopped) {
  if (t == nullptr) return null_arg("training");
  if (run >= t->result.runs.size()) return fail(BGDBS_E_INVALID_ARGUMENT, "run index out of range");
  const auto& r = t->result.runs[run];
  if (validation_return != nullptr) *validation_return = r.validation_return;
  if (steps != nullptr) *steps = r.steps;
  if (early_stopped != nullptr) *early_stopped = r.early_stopped ? 1 : 0;
  return BGDBS_OK;
}

bgdbs_status bgdbs_training_curve_csv(const bgdbs_training* t, size_t run, char* buf, size_t cap,
                                      size_t* needed) {
  if (t == nullptr) return null_arg("training");
  if (run >= t->result.runs.size()) return fail(BGDBS_E_INVALID_ARGUMENT, "run index out of range");
  return guarded([&] {
    std::ostringstream os;
    bgdbs::write_curve_csv(os, t->result.runs[run].curve);
    return copy_text(os.str(), buf, cap, needed);
  });
}

bgdbs_status bgdbs_training_agent(const bgdbs_training* t, size_t run, bgdbs_agent** out) {
  if (t == nullptr) return null_arg("training");
  if (out == nullptr) return null_arg("out");
  if (run >= t->result.runs.size()) return fail(BGDBS_E_INVALID_ARGUMENT, "run index out of range");
  return guarded([&] {
    *out = new bgdbs_agent{t->result.runs[run].agent, std::string()};
    return BGDBS_OK;
  });
}

void bgdbs_training_free(bgdbs_training* t) { delete t; }

bgdbs_status bgdbs_run_baseline(const bgdbs_model* model, const bgdbs_calibration* cal,
                                const bgdbs_env_options* options, bgdbs_baseline which,
                                int episodes, uint64_t seed, double frequency_hz,
                                double amplitude, bgdbs_report** out) {
  if (model == nullptr) return null_arg("model");
  if (cal == nullptr) return null_arg("cal");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    bgdbs::Baseline b = bgdbs::Baseline::kOdbs;
    if (which == BGDBS_BASELINE_HEALTHY) b = bgdbs::Baseline::kHealthy;
    if (which == BGDBS_BASELINE_PD) b = bgdbs::Baseline::kPd;
    auto r = std::make_unique<bgdbs_report>();
    r->report = bgdbs::run_baseline(b, env_config(model, cal, options), episodes, seed,
                                    bgdbs::OdbsSetting{frequency_hz, amplitude});
    *out = r.release();
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_evaluate(const bgdbs_agent* agent, const bgdbs_model* model,
                            const bgdbs_calibration* cal, const bgdbs_env_options* options,
                            int episodes, uint64_t seed, bgdbs_report** out) {
  if (agent == nullptr) return null_arg("agent");
  if (model == nullptr) return null_arg("model");
  if (cal == nullptr) return null_arg("cal");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const std::string expected = bgdbs::spec_id(cal->cal.norm_spec);
    if (!agent->norm_id.empty() && agent->norm_id != expected) {
      return fail(BGDBS_E_VERSION_MISMATCH, "checkpoint was trained against normalization " +
                                                agent->norm_id + ", not " + expected);
    }
    auto r = std::make_unique<bgdbs_report>();
    r->report = bgdbs::evaluate(agent->agent, env_config(model, cal, options), episodes, seed);
    *out = r.release();
    return BGDBS_OK;
  });
}

bgdbs_status bgdbs_report_summary_get(const bgdbs_report* report, bgdbs_report_summary* out) {
  if (report == nullptr) return null_arg("report");
  if (out == nullptr) return null_arg("out");
  const auto& r = report->report;
  out->sgi_power = stat_of(r.sgi_power);
  out->vgi_beta = stat_of(r.vgi_beta);
  out->rms = stat_of(r.rms);
  out->frequency = stat_of(r.frequency);
  out->amplitude = stat_of(r.amplitude);
  out->episode_return = stat_of(bgdbs::summarize(r.returns));
  return BGDBS_OK;
}

bgdbs_status bgdbs_report_set_config_hash(bgdbs_report* report, const char* hash) {
  if (report == nullptr) return null_arg("report");
  if (hash == nullptr) return null_arg("hash");
  report->report.config_hash = hash;
  return BGDBS_OK;
}

bgdbs_status bgdbs_reports_csv(const bgdbs_report* const* reports, size_t n, char* buf,
                               size_t cap, size_t* needed) {
  if (reports == nullptr && n > 0) return null_arg("reports");
  return guarded([&] {
    std::ostringstream os;
    bgdbs::write_reports_csv(os, gather(reports, n));
    return copy_text(os.str(), buf, cap, needed);
  });
}

bgdbs_status bgdbs_reports_table(const bgdbs_report* const* reports, size_t n, char* buf,
                                 size_t cap, size_t* needed) {
  if (reports == nullptr && n > 0) return null_arg("reports");
  return guarded([&] { return copy_text(bgdbs::summary_table(gather(reports, n)), buf, cap, needed); });
}

void bgdbs_report_free(bgdbs_report* report) { delete report; }

uint64_t bgdbs_derive_seed(uint64_t master, uint64_t stream) {
  return bgdbs::derive_seed(master, stream);
}

void bgdbs_content_hash(const void* bytes, size_t len, char out[9]) {
  if (out == nullptr) return;
  const std::string h = bgdbs::content_hash(
      std::string_view(static_cast<const char*>(bytes), bytes == nullptr ? 0 : len));
  std::memcpy(out, h.c_str(), 9);
}

}  // extern "C"
