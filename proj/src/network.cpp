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

#include "bgdbs/network.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bgdbs/errors.hpp"

namespace bgdbs {

namespace {

constexpr std::size_t kN = kCellsPerNucleus;

constexpr std::string_view kThalamicGates[] = {"h", "r"};
constexpr std::string_view kBasalGates[] = {"h", "n", "r"};

inline double boltz(double v, const Sigmoid& s) {
  return 1.0 / (1.0 + std::exp(-(v - s.theta) / s.sigma));
}

inline double tau(double v, const TauCurve& c) {
  if (c.tau1 == 0.0) return c.tau0;
  return c.tau0 + c.tau1 / (1.0 + std::exp(-(v - c.theta) / c.sigma));
}

inline double b_inf(double r, const BasalCellParams& p) {
  return 1.0 / (1.0 + std::exp((r - p.b_theta) / p.b_sigma)) -
         1.0 / (1.0 + std::exp(-p.b_theta / p.b_sigma));
}

inline double pow4(double x) {
  const double x2 = x * x;
  return x2 * x2;
}

// Sum of presynaptic gating per postsynaptic cell.
void gather(const Projection& proj, const Population& pre, std::array<double, kN>& out) {
  for (std::size_t i = 0; i < kN; ++i) {
    double acc = 0.0;
    for (int j : proj.sources[i]) acc += pre[static_cast<std::size_t>(j)].s_out;
    out[i] = acc;
  }
}

NeuronState basal_rhs(const NeuronState& x, const BasalCellParams& p,
                      const SynapseKinetics& syn, double i_syn, double i_ext, double cm) {
  const double v = x.v;
  const double m = boltz(v, p.m_inf);
  const double a = boltz(v, p.a_inf);
  const double s = boltz(v, p.s_inf);

  const double i_l = p.g_l * (v - p.e_l);
  const double i_k = p.g_k * pow4(x.n) * (v - p.e_k);
  const double i_na = p.g_na * m * m * m * x.h * (v - p.e_na);
  const double t_inact = p.t_current_uses_b ? [&] {
    const double b = b_inf(x.r, p);
    return b * b;
  }()
                                            : x.r;
  const double i_t = p.g_t * a * a * a * t_inact * (v - p.e_ca);
  const double i_ca = p.g_ca * s * s * (v - p.e_ca);
  const double i_ahp = p.g_ahp * (v - p.e_k) * x.ca / (x.ca + p.k1);

  NeuronState d;
  d.v = (-i_l - i_k - i_na - i_t - i_ca - i_ahp - i_syn + i_ext) / cm;
  d.h = p.phi_h * (boltz(v, p.h_inf) - x.h) / tau(v, p.tau_h);
  d.n = p.phi_n * (boltz(v, p.n_inf) - x.n) / tau(v, p.tau_n);
  d.r = p.phi_r * (boltz(v, p.r_inf) - x.r) / tau(v, p.tau_r);
  d.ca = p.eps_ca * (-i_ca - i_t - p.k_ca * x.ca);
  d.s_out = syn.alpha * boltz(v - syn.theta_g, syn.h_inf) * (1.0 - x.s_out) - syn.beta * x.s_out;
  return d;
}

NeuronState thalamic_rhs(const NeuronState& x, const ThalamicParams& p, double i_syn,
                         double i_ext, double cm) {
  const double v = x.v;
  const double m = boltz(v, p.m_inf);
  const double pt = boltz(v, p.p_inf);

  const double i_l = p.g_l * (v - p.e_l);
  const double i_na = p.g_na * m * m * m * x.h * (v - p.e_na);
  const double i_k = p.g_k * pow4(0.75 * (1.0 - x.h)) * (v - p.e_k);
  const double i_t = p.g_t * pt * pt * x.r * (v - p.e_t);

  const double a_h = 0.128 * std::exp(-(v + 46.0) / 18.0);
  const double b_h = 4.0 / (1.0 + std::exp(-(v + 23.0) / 5.0));
  const double tau_h = 1.0 / (a_h + b_h);
  const double tau_r = 0.15 * (28.0 + std::exp(-(v + 25.0) / 10.5));

  NeuronState d;
  d.v = (-i_l - i_na - i_k - i_t - i_syn + i_ext) / cm;
  d.h = (boltz(v, p.h_inf) - x.h) / tau_h;
  d.r = (boltz(v, p.r_inf) - x.r) / tau_r;
  return d;
}

struct Inputs {
  double i_smc = 0.0;
  double i_dbs = 0.0;  // already scaled by coupling
};

void rhs(const NetworkState& y, const ModelParams& p, const Inputs& in, NetworkState& dy) {
  const ConditionParams& cond = p.active();
  std::array<double, kN> gpe_to_stn{}, stn_to_gpe{}, gpe_to_gpe{}, stn_to_gpi{}, gpe_to_gpi{},
      gpi_to_th{};
  gather(p.gpe_to_stn, y.gpe, gpe_to_stn);
  gather(p.stn_to_gpe, y.stn, stn_to_gpe);
  gather(p.gpe_to_gpe, y.gpe, gpe_to_gpe);
  gather(p.stn_to_gpi, y.stn, stn_to_gpi);
  gather(p.gpe_to_gpi, y.gpe, gpe_to_gpi);
  gather(p.gpi_to_th, y.gpi, gpi_to_th);

  const double g_gege = p.gpe_to_gpe.g * cond.gpe_gpe_scale;
  for (std::size_t i = 0; i < kN; ++i) {
    const NeuronState& th = y.th[i];
    dy.th[i] = thalamic_rhs(th, p.th, p.gpi_to_th.g * gpi_to_th[i] * (th.v - p.gpi_to_th.e_rev),
                            in.i_smc, p.cm);

    const NeuronState& sn = y.stn[i];
    const double i_stn = p.gpe_to_stn.g * gpe_to_stn[i] * (sn.v - p.gpe_to_stn.e_rev);
    dy.stn[i] = basal_rhs(sn, p.stn, p.syn_stn, i_stn, cond.i_app_stn + in.i_dbs, p.cm);

    const NeuronState& ge = y.gpe[i];
    const double i_gpe = p.stn_to_gpe.g * stn_to_gpe[i] * (ge.v - p.stn_to_gpe.e_rev) +
                         g_gege * gpe_to_gpe[i] * (ge.v - p.gpe_to_gpe.e_rev);
    dy.gpe[i] = basal_rhs(ge, p.gpe, p.syn_gpe, i_gpe, cond.i_app_gpe, p.cm);

    const NeuronState& gi = y.gpi[i];
    const double i_gpi = p.stn_to_gpi.g * stn_to_gpi[i] * (gi.v - p.stn_to_gpi.e_rev) +
                         p.gpe_to_gpi.g * gpe_to_gpi[i] * (gi.v - p.gpe_to_gpi.e_rev);
    dy.gpi[i] = basal_rhs(gi, p.gpi, p.syn_gpi, i_gpi, cond.i_app_gpi, p.cm);
  }
}

inline void axpy(NeuronState& out, const NeuronState& y, double a, const NeuronState& k) {
  out.v = y.v + a * k.v;
  out.h = y.h + a * k.h;
  out.n = y.n + a * k.n;
  out.r = y.r + a * k.r;
  out.ca = y.ca + a * k.ca;
  out.s_out = y.s_out + a * k.s_out;
}

template <typename F>
void for_each_cell(NetworkState& a, const NetworkState& b, const NetworkState& c, F&& f) {
  for (std::size_t i = 0; i < kN; ++i) {
    f(a.th[i], b.th[i], c.th[i]);
    f(a.stn[i], b.stn[i], c.stn[i]);
    f(a.gpe[i], b.gpe[i], c.gpe[i]);
    f(a.gpi[i], b.gpi[i], c.gpi[i]);
  }
}

struct Rk4Scratch {
  NetworkState k1, k2, k3, k4, tmp;
};

void rk4_step(NetworkState& y, const ModelParams& p, const Inputs& in, Rk4Scratch& s) {
  const double dt = p.dt;
  rhs(y, p, in, s.k1);
  for_each_cell(s.tmp, y, s.k1, [&](auto& o, const auto& a, const auto& k) { axpy(o, a, 0.5 * dt, k); });
  rhs(s.tmp, p, in, s.k2);
  for_each_cell(s.tmp, y, s.k2, [&](auto& o, const auto& a, const auto& k) { axpy(o, a, 0.5 * dt, k); });
  rhs(s.tmp, p, in, s.k3);
  for_each_cell(s.tmp, y, s.k3, [&](auto& o, const auto& a, const auto& k) { axpy(o, a, dt, k); });
  rhs(s.tmp, p, in, s.k4);

  const double w = dt / 6.0;
  auto combine = [&](NeuronState& x, const NeuronState& a, const NeuronState& b,
                     const NeuronState& c, const NeuronState& d) {
    x.v += w * (a.v + 2.0 * b.v + 2.0 * c.v + d.v);
    x.h += w * (a.h + 2.0 * b.h + 2.0 * c.h + d.h);
    x.n += w * (a.n + 2.0 * b.n + 2.0 * c.n + d.n);
    x.r += w * (a.r + 2.0 * b.r + 2.0 * c.r + d.r);
    x.ca += w * (a.ca + 2.0 * b.ca + 2.0 * c.ca + d.ca);
    x.s_out += w * (a.s_out + 2.0 * b.s_out + 2.0 * c.s_out + d.s_out);
  };
  for (std::size_t i = 0; i < kN; ++i) {
    combine(y.th[i], s.k1.th[i], s.k2.th[i], s.k3.th[i], s.k4.th[i]);
    combine(y.stn[i], s.k1.stn[i], s.k2.stn[i], s.k3.stn[i], s.k4.stn[i]);
    combine(y.gpe[i], s.k1.gpe[i], s.k2.gpe[i], s.k3.gpe[i], s.k4.gpe[i]);
    combine(y.gpi[i], s.k1.gpi[i], s.k2.gpi[i], s.k3.gpi[i], s.k4.gpi[i]);
  }
}

[[noreturn]] void diverged(const char* nucleus, std::size_t cell, const char* what, double value,
                           double t) {
  std::ostringstream msg;
  msg << nucleus << " cell " << cell << ' ' << what << " = " << value << " at t = " << t
      << " ms (dt too large or bad parameters)";
  raise(ErrorKind::kNumericalDivergence, msg.str());
}

void check_population(const Population& pop, const char* name, const ModelParams& p, double t) {
  constexpr double kSlack = 1e-12;
  for (std::size_t i = 0; i < kN; ++i) {
    const NeuronState& x = pop[i];
    if (!std::isfinite(x.v) || x.v < p.v_min || x.v > p.v_max) diverged(name, i, "v", x.v, t);
    auto gate_ok = [](double g) { return g >= -kSlack && g <= 1.0 + kSlack; };
    if (!gate_ok(x.h)) diverged(name, i, "h", x.h, t);
    if (!gate_ok(x.n)) diverged(name, i, "n", x.n, t);
    if (!gate_ok(x.r)) diverged(name, i, "r", x.r, t);
    if (!gate_ok(x.s_out)) diverged(name, i, "s", x.s_out, t);
    if (!std::isfinite(x.ca)) diverged(name, i, "ca", x.ca, t);
  }
}

void check_state(const NetworkState& y, const ModelParams& p) {
  check_population(y.th, "TH", p, y.t);
  check_population(y.stn, "STN", p, y.t);
  check_population(y.gpe, "GPe", p, y.t);
  check_population(y.gpi, "GPi", p, y.t);
}

std::int64_t whole_multiple(double value, double unit, const char* what) {
  const double ratio = value / unit;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-6) {
    std::ostringstream msg;
    msg << what << " " << value << " is not a positive multiple of " << unit;
    raise(ErrorKind::kInvalidArgument, msg.str());
  }
  return static_cast<std::int64_t>(rounded);
}

NeuronState basal_rest(const BasalCellParams& p, double v) {
  NeuronState x;
  x.v = v;
  x.h = boltz(v, p.h_inf);
  x.n = boltz(v, p.n_inf);
  x.r = boltz(v, p.r_inf);
  x.ca = p.ca_init;
  x.s_out = 0.0;
  return x;
}

}  // namespace

std::span<const std::string_view> gating_names(Nucleus nucleus) noexcept {
  if (nucleus == Nucleus::kTh) return kThalamicGates;
  return kBasalGates;
}

NetworkState init_network(const ModelParams& params, std::uint64_t seed) {
  validate(params);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, params.init_v_sd);

  NetworkState s;
  for (std::size_t i = 0; i < kN; ++i) {
    const double v = params.th.v_rest + jitter(rng);
    NeuronState& th = s.th[i];
    th.v = v;
    th.h = boltz(v, params.th.h_inf);
    th.r = boltz(v, params.th.r_inf);
  }
  for (std::size_t i = 0; i < kN; ++i) s.stn[i] = basal_rest(params.stn, params.stn.v_rest + jitter(rng));
  for (std::size_t i = 0; i < kN; ++i) s.gpe[i] = basal_rest(params.gpe, params.gpe.v_rest + jitter(rng));
  for (std::size_t i = 0; i < kN; ++i) s.gpi[i] = basal_rest(params.gpi, params.gpi.v_rest + jitter(rng));
  s.t = 0.0;
  return s;
}

std::pair<NetworkState, TraceWindow> step_network(const NetworkState& state,
                                                  const ModelParams& params,
                                                  const DbsSource& i_dbs, double duration_ms) {
  const std::int64_t per_sample = whole_multiple(params.dt_sample, params.dt, "dt_sample");
  const std::int64_t samples = whole_multiple(duration_ms, params.dt_sample, "duration");

  TraceWindow tw;
  tw.dt_sample = params.dt_sample;
  tw.t_start = state.t;
  tw.s_gi_mean.reserve(static_cast<std::size_t>(samples));
  tw.i_dbs.reserve(static_cast<std::size_t>(samples));
  tw.s_gi.assign(kN, {});
  tw.v_gi.assign(kN, {});
  tw.v_stn.assign(kN, {});
  for (std::size_t i = 0; i < kN; ++i) {
    tw.s_gi[i].reserve(static_cast<std::size_t>(samples));
    tw.v_gi[i].reserve(static_cast<std::size_t>(samples));
    tw.v_stn[i].reserve(static_cast<std::size_t>(samples));
  }

  NetworkState y = state;
  Rk4Scratch scratch;
  const double t0 = state.t;
  std::int64_t k = 0;
  for (std::int64_t sample = 0; sample < samples; ++sample) {
    double charge = 0.0;
    for (std::int64_t sub = 0; sub < per_sample; ++sub, ++k) {
      const double t = t0 + static_cast<double>(k) * params.dt;
      const double electrode = i_dbs ? i_dbs(k) : 0.0;
      charge += electrode;
      Inputs in;
      in.i_smc = std::fmod(t, params.smc.period_ms) < params.smc.width_ms ? params.smc.amplitude : 0.0;
      in.i_dbs = params.dbs_coupling * electrode;
      rk4_step(y, params, in, scratch);
      y.t = t0 + static_cast<double>(k + 1) * params.dt;
      check_state(y, params);
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < kN; ++i) {
      tw.s_gi[i].push_back(y.gpi[i].s_out);
      tw.v_gi[i].push_back(y.gpi[i].v);
      tw.v_stn[i].push_back(y.stn[i].v);
      mean += y.gpi[i].s_out;
    }
    tw.s_gi_mean.push_back(mean / static_cast<double>(kN));
    tw.i_dbs.push_back(charge / static_cast<double>(per_sample));
  }
  return {y, std::move(tw)};
}

std::pair<NetworkState, TraceWindow> step_network(const NetworkState& state,
                                                  const ModelParams& params, double duration_ms) {
  return step_network(state, params, DbsSource{}, duration_ms);
}

std::vector<double> detect_spikes(std::span<const double> trace, double dt_sample,
                                  double threshold, double refractory_ms, double t0) {
  if (trace.empty()) raise(ErrorKind::kInvalidArgument, "detect_spikes needs a non-empty trace");
  std::vector<double> spikes;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double a = trace[i - 1];
    const double b = trace[i];
    if (a < threshold && b >= threshold) {
      const double frac = (threshold - a) / (b - a);
      const double t = t0 + (static_cast<double>(i - 1) + frac) * dt_sample;
      if (spikes.empty() || t - spikes.back() >= refractory_ms) spikes.push_back(t);
    }
  }
  return spikes;
}

}  // namespace bgdbs
