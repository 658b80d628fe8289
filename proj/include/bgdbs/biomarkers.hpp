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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgdbs/network.hpp"

namespace bgdbs {

inline constexpr std::size_t kFeatureCount = 6;

/// Feature order is part of the checkpoint contract; append, never reorder.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "std_sgi", "hjorth_a", "hjorth_m", "hjorth_c", "psd_vgi_beta", "sampen_stn"};

using FeatureVector = std::array<double, kFeatureCount>;
using Observation = std::array<double, kFeatureCount>;

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

inline constexpr Band kSgiBand{1.0, 20.0};
inline constexpr Band kBetaBand{13.0, 30.0};

/// Banded spectral magnitude, averaged over signals:
///
///   (1/n) sum_i  integral_{f_low}^{f_high} |X_i(f)| df
///
/// X_i is the Fourier transform of the mean-removed signal i, approximated
/// by dt * DTFT on a frequency grid of `resolution_hz` spacing (equivalent
/// to a zero-padded DFT) and integrated with the trapezoid rule. Frequencies
/// are in Hz, dt_sample in ms, the result in signal-units.
///
/// Errors: kBandOutOfRange unless 0 < f_low < f_high < Nyquist;
/// kWindowTooShort when the window spans fewer than two periods of f_high;
/// kInvalidArgument for empty or ragged input.
double banded_psd(std::span<const std::vector<double>> signals, double dt_sample, Band band,
                  double resolution_hz = 1.0);

/// Single-signal convenience overload.
double banded_psd(std::span<const double> signal, double dt_sample, Band band,
                  double resolution_hz = 1.0);

/// Hjorth activity, mobility and complexity. Derivatives are first
/// differences divided by dt_sample, so mobility is in rad/ms. Mobility is
/// empty when the activity is zero, complexity when the first-derivative
/// activity is zero.
struct Hjorth {
  double activity = 0.0;
  std::optional<double> mobility;
  std::optional<double> complexity;
};

Hjorth hjorth(std::span<const double> x, double dt_sample);

/// Sample entropy ln C(m, r) - ln C(m + 1, r), r = r_factor * sigma_x
/// (population standard deviation).
///
/// C(a, r) counts ordered pairs i != j of length-a templates with Chebyshev
/// distance < r, over the same N - m template starts for both lengths, so
/// a perfectly periodic signal scores exactly 0. A zero count for
/// C(m + 1, r), and likewise for C(m, r), is floored at one match. A
/// constant signal returns 0.
double sample_entropy(std::span<const double> x, int m = 2, double r_factor = 0.2);

struct FeatureOptions {
  int sampen_m = 2;
  double sampen_r_factor = 0.2;
  /// Samples averaged per point before sample entropy (10 x 0.1 ms = 1 ms).
  int sampen_decimation = 10;
  double resolution_hz = 1.0;
};

/// The six-entry state vector of one control window: std and Hjorth
/// parameters of the mean S_Gi signal, beta-band power of the per-cell V_Gi
/// signals, and sample entropy of the decimated mean V_STN signal.
/// Degenerate components are reported as 0.
FeatureVector extract_features(const TraceWindow& trace, const FeatureOptions& options = {});

/// Per-feature min-max bounds for observation scaling.
struct NormalizationSpec {
  std::array<double, kFeatureCount> min{};
  std::array<double, kFeatureCount> max{};
  std::string provenance;
};

/// Per-feature extrema over the samples, widened by `margin` of the range on
/// each side. Needs at least 20 samples; kDegenerateRange if any feature is
/// constant across them.
NormalizationSpec calibrate_normalization(std::span<const FeatureVector> samples,
                                          std::string provenance, double margin = 0.05);

/// Short stable identifier of the bounds and feature order, e.g.
/// "ns-1a2b3c4d". Checkpoints record it so evaluation can refuse a mismatched
/// spec.
std::string spec_id(const NormalizationSpec& spec);

/// (x - min) / (max - min), clamped to [0, 1].
Observation normalize(const FeatureVector& v, const NormalizationSpec& spec);

/// Population mean and standard deviation.
double mean_of(std::span<const double> x);
double stddev_of(std::span<const double> x);

}  // namespace bgdbs
