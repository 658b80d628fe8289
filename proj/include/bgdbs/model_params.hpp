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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bgdbs {

inline constexpr std::size_t kCellsPerNucleus = 10;

enum class Condition { kHealthy, kParkinsonian };

std::string_view to_string(Condition c) noexcept;
Condition parse_condition(std::string_view text);

/// Boltzmann steady-state curve 1 / (1 + exp(-(v - theta) / sigma)).
struct Sigmoid {
  double theta = 0.0;
  double sigma = 1.0;
};

/// Voltage-dependent time constant tau0 + tau1 / (1 + exp(-(v - theta) / sigma)).
/// tau1 == 0 gives a constant.
struct TauCurve {
  double tau0 = 1.0;
  double tau1 = 0.0;
  double theta = 0.0;
  double sigma = 1.0;
};

struct ThalamicParams {
  double g_l = 0, e_l = 0, g_na = 0, e_na = 0, g_k = 0, e_k = 0, g_t = 0, e_t = 0;
  Sigmoid m_inf, h_inf, r_inf, p_inf;
  double v_rest = -62.0;
};

/// STN and pallidal cells share one current set; they differ in gate
/// curves and in how the T-type inactivation enters (see t_current_uses_b).
struct BasalCellParams {
  double g_l = 0, e_l = 0, g_na = 0, e_na = 0, g_k = 0, e_k = 0;
  double g_t = 0, g_ca = 0, e_ca = 0, g_ahp = 0;
  double k1 = 0;      // AHP half-activation calcium
  double k_ca = 0;    // calcium pump rate
  double eps_ca = 0;  // calcium scaling
  double phi_n = 1, phi_h = 1, phi_r = 1;
  Sigmoid m_inf, h_inf, n_inf, r_inf, a_inf, s_inf;
  TauCurve tau_n, tau_h, tau_r;
  /// STN: I_T = g_T a^3 b(r)^2 (v - E_Ca); pallidum: I_T = g_T a^3 r (v - E_Ca).
  bool t_current_uses_b = false;
  double b_theta = 0.4, b_sigma = -0.1;
  double v_rest = -62.0;
  double ca_init = 0.1;
};

/// First-order transmitter kinetics ds/dt = alpha H(v - theta_g) (1 - s) - beta s.
struct SynapseKinetics {
  double alpha = 0, beta = 0, theta_g = 0;
  Sigmoid h_inf;
};

/// One projection. sources[target] lists presynaptic cell indices.
struct Projection {
  double g = 0;
  double e_rev = 0;
  std::vector<std::vector<int>> sources;
};

struct ConditionParams {
  double i_app_stn = 0;
  double i_app_gpe = 0;
  double i_app_gpi = 0;
  double gpe_gpe_scale = 1;
};

struct SmcParams {
  double period_ms = 50.0;
  double width_ms = 5.0;
  double amplitude = 5.0;
};

struct ModelParams {
  std::string version;
  Condition condition = Condition::kParkinsonian;

  double cm = 1.0;
  double dt = 0.025;         // integrator step (ms)
  double dt_sample = 0.1;    // trace sampling interval (ms)
  double init_v_sd = 5.0;    // init perturbation around v_rest (mV)
  double v_min = -200.0;     // divergence guard
  double v_max = 100.0;
  /// Fraction of the electrode current density delivered to STN membranes.
  double dbs_coupling = 1.0;

  SmcParams smc;
  ThalamicParams th;
  BasalCellParams stn, gpe, gpi;
  SynapseKinetics syn_stn, syn_gpe, syn_gpi;

  Projection gpe_to_stn, stn_to_gpe, gpe_to_gpe, stn_to_gpi, gpe_to_gpi, gpi_to_th;

  ConditionParams healthy, parkinsonian;

  const ConditionParams& active() const noexcept {
    return condition == Condition::kHealthy ? healthy : parkinsonian;
  }

  ModelParams with_condition(Condition c) const {
    ModelParams p = *this;
    p.condition = c;
    return p;
  }
};

/// Throws Error(kConfig) naming the first violated constraint.
void validate(const ModelParams& params);

/// Parses the YAML parameter schema documented in params/bgt_model.yaml.
ModelParams parse_model_params(std::string_view yaml_text);
ModelParams load_model_params(const std::string& path);

}  // namespace bgdbs
