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

#include "bgdbs/model_params.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "bgdbs/errors.hpp"

namespace bgdbs {

std::string_view to_string(Condition c) noexcept {
  return c == Condition::kHealthy ? "healthy" : "parkinsonian";
}

Condition parse_condition(std::string_view text) {
  if (text == "healthy") return Condition::kHealthy;
  if (text == "parkinsonian" || text == "pd") return Condition::kParkinsonian;
  raise(ErrorKind::kConfig, "unknown condition '" + std::string(text) + "'");
}

namespace {

YAML::Node child(const YAML::Node& node, const std::string& key, const std::string& path) {
  YAML::Node c = node[key];
  if (!c) raise(ErrorKind::kConfig, "missing key '" + path + key + "'");
  return c;
}

double number(const YAML::Node& node, const std::string& key, const std::string& path) {
  YAML::Node c = child(node, key, path);
  try {
    return c.as<double>();
  } catch (const YAML::Exception&) {
    raise(ErrorKind::kConfig, "key '" + path + key + "' is not a number");
  }
}

double number_or(const YAML::Node& node, const std::string& key, double fallback) {
  YAML::Node c = node[key];
  if (!c) return fallback;
  try {
    return c.as<double>();
  } catch (const YAML::Exception&) {
    raise(ErrorKind::kConfig, "key '" + key + "' is not a number");
  }
}

Sigmoid sigmoid(const YAML::Node& node, const std::string& key, const std::string& path) {
  YAML::Node c = child(node, key, path);
  const std::string sub = path + key + ".";
  return {number(c, "theta", sub), number(c, "sigma", sub)};
}

TauCurve tau_curve(const YAML::Node& node, const std::string& key, const std::string& path) {
  YAML::Node c = child(node, key, path);
  const std::string sub = path + key + ".";
  return {number(c, "tau0", sub), number(c, "tau1", sub), number(c, "theta", sub),
          number(c, "sigma", sub)};
}

ThalamicParams thalamic(const YAML::Node& n) {
  const std::string p = "thalamus.";
  ThalamicParams t;
  t.v_rest = number(n, "v_rest", p);
  t.g_l = number(n, "g_l", p);
  t.e_l = number(n, "e_l", p);
  t.g_na = number(n, "g_na", p);
  t.e_na = number(n, "e_na", p);
  t.g_k = number(n, "g_k", p);
  t.e_k = number(n, "e_k", p);
  t.g_t = number(n, "g_t", p);
  t.e_t = number(n, "e_t", p);
  t.m_inf = sigmoid(n, "m_inf", p);
  t.h_inf = sigmoid(n, "h_inf", p);
  t.r_inf = sigmoid(n, "r_inf", p);
  t.p_inf = sigmoid(n, "p_inf", p);
  return t;
}

BasalCellParams basal(const YAML::Node& n, const std::string& name) {
  const std::string p = name + ".";
  BasalCellParams b;
  b.v_rest = number(n, "v_rest", p);
  b.ca_init = number(n, "ca_init", p);
  b.g_l = number(n, "g_l", p);
  b.e_l = number(n, "e_l", p);
  b.g_na = number(n, "g_na", p);
  b.e_na = number(n, "e_na", p);
  b.g_k = number(n, "g_k", p);
  b.e_k = number(n, "e_k", p);
  b.g_t = number(n, "g_t", p);
  b.g_ca = number(n, "g_ca", p);
  b.e_ca = number(n, "e_ca", p);
  b.g_ahp = number(n, "g_ahp", p);
  b.k1 = number(n, "k1", p);
  b.k_ca = number(n, "k_ca", p);
  b.eps_ca = number(n, "eps_ca", p);
  b.phi_n = number(n, "phi_n", p);
  b.phi_h = number(n, "phi_h", p);
  b.phi_r = number(n, "phi_r", p);
  const auto t_current = child(n, "t_current", p).as<std::string>();
  if (t_current == "b") {
    b.t_current_uses_b = true;
    b.b_theta = number(n, "b_theta", p);
    b.b_sigma = number(n, "b_sigma", p);
  } else if (t_current != "r") {
    raise(ErrorKind::kConfig, "key '" + p + "t_current' must be 'b' or 'r'");
  }
  b.m_inf = sigmoid(n, "m_inf", p);
  b.h_inf = sigmoid(n, "h_inf", p);
  b.n_inf = sigmoid(n, "n_inf", p);
  b.r_inf = sigmoid(n, "r_inf", p);
  b.a_inf = sigmoid(n, "a_inf", p);
  b.s_inf = sigmoid(n, "s_inf", p);
  b.tau_n = tau_curve(n, "tau_n", p);
  b.tau_h = tau_curve(n, "tau_h", p);
  b.tau_r = tau_curve(n, "tau_r", p);
  return b;
}

SynapseKinetics kinetics(const YAML::Node& n, const std::string& name) {
  const std::string p = "synapse_kinetics." + name + ".";
  return {number(n, "alpha", p), number(n, "beta", p), number(n, "theta_g", p),
          sigmoid(n, "h_inf", p)};
}

Projection projection(const YAML::Node& projections, const std::string& name) {
  const std::string p = "projections." + name + ".";
  YAML::Node n = child(projections, name, "projections.");
  Projection out;
  out.g = number(n, "g", p);
  out.e_rev = number(n, "e_rev", p);
  YAML::Node src = child(n, "sources", p);
  if (!src.IsSequence()) raise(ErrorKind::kConfig, "key '" + p + "sources' must be a list");
  try {
    out.sources = src.as<std::vector<std::vector<int>>>();
  } catch (const YAML::Exception&) {
    raise(ErrorKind::kConfig, "key '" + p + "sources' must be a list of index lists");
  }
  return out;
}

ConditionParams condition_params(const YAML::Node& n, const std::string& name) {
  const std::string p = "conditions." + name + ".";
  return {number(n, "i_app_stn", p), number(n, "i_app_gpe", p), number(n, "i_app_gpi", p),
          number(n, "gpe_gpe_scale", p)};
}

void check_projection(const Projection& proj, const char* name) {
  if (proj.sources.size() != kCellsPerNucleus) {
    raise(ErrorKind::kConfig, std::string("projection ") + name + " must list sources for " +
                                  std::to_string(kCellsPerNucleus) + " cells");
  }
  for (const auto& row : proj.sources) {
    for (int idx : row) {
      if (idx < 0 || idx >= static_cast<int>(kCellsPerNucleus)) {
        raise(ErrorKind::kConfig, std::string("projection ") + name +
                                      " references invalid cell index " + std::to_string(idx));
      }
    }
  }
  if (proj.g < 0 || !std::isfinite(proj.g)) {
    raise(ErrorKind::kConfig, std::string("projection ") + name + " has invalid conductance");
  }
}

}  // namespace

void validate(const ModelParams& p) {
  if (!(p.dt > 0) || !std::isfinite(p.dt)) raise(ErrorKind::kConfig, "dt must be > 0");
  if (!(p.dt_sample >= p.dt)) raise(ErrorKind::kConfig, "dt_sample must be >= dt");
  const double ratio = p.dt_sample / p.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    raise(ErrorKind::kConfig, "dt_sample must be an integer multiple of dt");
  }
  if (!(p.cm > 0)) raise(ErrorKind::kConfig, "cm must be > 0");
  if (!(p.smc.period_ms > 0) || p.smc.period_ms > 100.0) {
    raise(ErrorKind::kConfig, "smc period must lie in (0, 100] ms");
  }
  if (!(p.smc.width_ms > 0) || p.smc.width_ms >= p.smc.period_ms) {
    raise(ErrorKind::kConfig, "smc width must lie in (0, period)");
  }
  if (!(p.v_min < p.v_max)) raise(ErrorKind::kConfig, "v_min must be < v_max");
  if (p.dbs_coupling < 0 || !std::isfinite(p.dbs_coupling)) {
    raise(ErrorKind::kConfig, "dbs coupling must be finite and >= 0");
  }
  check_projection(p.gpe_to_stn, "gpe_to_stn");
  check_projection(p.stn_to_gpe, "stn_to_gpe");
  check_projection(p.gpe_to_gpe, "gpe_to_gpe");
  check_projection(p.stn_to_gpi, "stn_to_gpi");
  check_projection(p.gpe_to_gpi, "gpe_to_gpi");
  check_projection(p.gpi_to_th, "gpi_to_th");
}

ModelParams parse_model_params(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    raise(ErrorKind::kConfig, std::string("malformed parameter file: ") + e.what());
  }
  if (!root.IsMap()) raise(ErrorKind::kConfig, "parameter file must be a mapping");

  ModelParams p;
  p.version = child(root, "version", "").as<std::string>();

  YAML::Node integ = child(root, "integration", "");
  p.dt = number(integ, "dt", "integration.");
  p.dt_sample = number(integ, "dt_sample", "integration.");
  p.init_v_sd = number_or(integ, "init_v_sd", p.init_v_sd);
  p.v_min = number_or(integ, "v_min", p.v_min);
  p.v_max = number_or(integ, "v_max", p.v_max);
  p.cm = number(child(root, "membrane", ""), "cm", "membrane.");

  YAML::Node smc = child(root, "smc", "");
  p.smc = {number(smc, "period_ms", "smc."), number(smc, "width_ms", "smc."),
           number(smc, "amplitude", "smc.")};
  p.dbs_coupling = number(child(root, "dbs", ""), "coupling", "dbs.");

  p.th = thalamic(child(root, "thalamus", ""));
  p.stn = basal(child(root, "stn", ""), "stn");
  p.gpe = basal(child(root, "gpe", ""), "gpe");
  p.gpi = basal(child(root, "gpi", ""), "gpi");

  YAML::Node kin = child(root, "synapse_kinetics", "");
  p.syn_stn = kinetics(child(kin, "stn", "synapse_kinetics."), "stn");
  p.syn_gpe = kinetics(child(kin, "gpe", "synapse_kinetics."), "gpe");
  p.syn_gpi = kinetics(child(kin, "gpi", "synapse_kinetics."), "gpi");

  YAML::Node proj = child(root, "projections", "");
  p.gpe_to_stn = projection(proj, "gpe_to_stn");
  p.stn_to_gpe = projection(proj, "stn_to_gpe");
  p.gpe_to_gpe = projection(proj, "gpe_to_gpe");
  p.stn_to_gpi = projection(proj, "stn_to_gpi");
  p.gpe_to_gpi = projection(proj, "gpe_to_gpi");
  p.gpi_to_th = projection(proj, "gpi_to_th");

  YAML::Node cond = child(root, "conditions", "");
  p.healthy = condition_params(child(cond, "healthy", "conditions."), "healthy");
  p.parkinsonian = condition_params(child(cond, "parkinsonian", "conditions."), "parkinsonian");

  validate(p);
  return p;
}

ModelParams load_model_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open parameter file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model_params(text.str());
}

}  // namespace bgdbs
