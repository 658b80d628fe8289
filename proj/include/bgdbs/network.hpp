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
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bgdbs/model_params.hpp"

namespace bgdbs {

enum class Nucleus { kTh, kStn, kGpe, kGpi };

/// One cell. Thalamic cells carry only h and r; n stays 0 for them.
/// s_out is the outgoing synaptic gating (unused for thalamic cells).
struct NeuronState {
  double v = 0.0;
  double h = 0.0;
  double n = 0.0;
  double r = 0.0;
  double ca = 0.0;
  double s_out = 0.0;

  friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

/// Names of the gating variables a nucleus type actually uses.
std::span<const std::string_view> gating_names(Nucleus nucleus) noexcept;

using Population = std::array<NeuronState, kCellsPerNucleus>;

struct NetworkState {
  Population th{};
  Population stn{};
  Population gpe{};
  Population gpi{};
  double t = 0.0;  // ms

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Recorded signals of one integration window, sampled every dt_sample.
/// Per-cell series are indexed [cell][sample].
struct TraceWindow {
  double dt_sample = 0.1;
  double t_start = 0.0;
  std::vector<double> s_gi_mean;
  std::vector<std::vector<double>> s_gi;
  std::vector<std::vector<double>> v_gi;
  std::vector<std::vector<double>> v_stn;
  /// Mean electrode current over each sample interval.
  std::vector<double> i_dbs;

  std::size_t size() const noexcept { return s_gi_mean.size(); }
  double duration() const noexcept { return static_cast<double>(size()) * dt_sample; }

  friend bool operator==(const TraceWindow&, const TraceWindow&) = default;
};

/// Electrode current (uA/cm^2) for integrator step k of the window; held
/// constant across the RK4 stages of that step.
using DbsSource = std::function<double(std::int64_t step)>;

NetworkState init_network(const ModelParams& params, std::uint64_t seed);

/// Advances every cell by `duration_ms`, which must be a positive multiple of
/// dt_sample. Throws kNumericalDivergence when a membrane potential leaves
/// [v_min, v_max] or a gating variable leaves [0, 1].
std::pair<NetworkState, TraceWindow> step_network(const NetworkState& state,
                                                  const ModelParams& params,
                                                  const DbsSource& i_dbs, double duration_ms);

/// Same as above with no stimulation.
std::pair<NetworkState, TraceWindow> step_network(const NetworkState& state,
                                                  const ModelParams& params, double duration_ms);

/// Upward threshold crossings (linearly interpolated, ms from t0). A
/// crossing within `refractory_ms` of the previous accepted spike is dropped.
std::vector<double> detect_spikes(std::span<const double> trace, double dt_sample,
                                  double threshold = -20.0, double refractory_ms = 2.0,
                                  double t0 = 0.0);

}  // namespace bgdbs
