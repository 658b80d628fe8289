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

#include "bgdbs/biomarkers.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "bgdbs/errors.hpp"

namespace bgdbs {

double mean_of(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double stddev_of(std::span<const double> x) {
  if (x.empty()) return 0.0;
  // exact zero for constant input; the two-pass sum leaves rounding residue
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return 0.0;
  const double mu = mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

namespace {

std::vector<double> frequency_grid(Band band, double resolution_hz) {
  std::vector<double> grid;
  const double span = band.high_hz - band.low_hz;
  const auto steps = static_cast<std::size_t>(std::floor(span / resolution_hz + 1e-9));
  for (std::size_t j = 0; j <= steps; ++j) {
    grid.push_back(band.low_hz + static_cast<double>(j) * resolution_hz);
  }
  if (band.high_hz - grid.back() > 1e-9 * resolution_hz) grid.push_back(band.high_hz);
  return grid;
}

// |dt * sum_n (x_n - mean) exp(-i 2 pi f n dt)| for each grid frequency.
double band_magnitude(std::span<const double> x, double dt_s, const std::vector<double>& grid) {
  const double mu = mean_of(x);
  std::vector<double> mags(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double omega = 2.0 * std::numbers::pi * grid[g] * dt_s;
    const std::complex<double> rot = std::polar(1.0, -omega);
    std::complex<double> phasor(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
      acc += (x[n] - mu) * phasor;
      phasor *= rot;
      // Renormalize occasionally so rounding cannot grow the phasor.
      if ((n & 1023U) == 1023U) phasor /= std::abs(phasor);
    }
    mags[g] = dt_s * std::abs(acc);
  }
  double integral = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    integral += 0.5 * (mags[g] + mags[g - 1]) * (grid[g] - grid[g - 1]);
  }
  return integral;
}

}  // namespace

double banded_psd(std::span<const std::vector<double>> signals, double dt_sample, Band band,
                  double resolution_hz) {
  if (signals.empty() || signals.front().empty()) {
    raise(ErrorKind::kInvalidArgument, "banded_psd needs at least one non-empty signal");
  }
  const std::size_t n = signals.front().size();
  for (const auto& s : signals) {
    if (s.size() != n) raise(ErrorKind::kInvalidArgument, "banded_psd signals differ in length");
  }
  if (!(dt_sample > 0.0) || !(resolution_hz > 0.0)) {
    raise(ErrorKind::kInvalidArgument, "dt_sample and resolution must be > 0");
  }
  const double nyquist = 1000.0 / (2.0 * dt_sample);
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz && band.high_hz < nyquist)) {
    std::ostringstream msg;
    msg << "band [" << band.low_hz << ", " << band.high_hz << "] Hz outside (0, " << nyquist
        << ")";
    raise(ErrorKind::kBandOutOfRange, msg.str());
  }
  const double duration_ms = static_cast<double>(n) * dt_sample;
  if (duration_ms + 1e-9 < 2.0 * 1000.0 / band.high_hz) {
    std::ostringstream msg;
    msg << duration_ms << " ms window is shorter than two periods of " << band.high_hz << " Hz";
    raise(ErrorKind::kWindowTooShort, msg.str());
  }

  const auto grid = frequency_grid(band, resolution_hz);
  const double dt_s = dt_sample * 1e-3;
  double total = 0.0;
  for (const auto& s : signals) total += band_magnitude(s, dt_s, grid);
  return total / static_cast<double>(signals.size());
}

double banded_psd(std::span<const double> signal, double dt_sample, Band band,
                  double resolution_hz) {
  const std::vector<double> one(signal.begin(), signal.end());
  return banded_psd(std::span<const std::vector<double>>(&one, 1), dt_sample, band,
                    resolution_hz);
}

Hjorth hjorth(std::span<const double> x, double dt_sample) {
  if (x.size() < 3) raise(ErrorKind::kInvalidArgument, "hjorth needs at least 3 samples");
  if (!(dt_sample > 0.0)) raise(ErrorKind::kInvalidArgument, "dt_sample must be > 0");

  std::vector<double> d1(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d1[i] = (x[i + 1] - x[i]) / dt_sample;
  std::vector<double> d2(d1.size() - 1);
  for (std::size_t i = 0; i + 1 < d1.size(); ++i) d2[i] = (d1[i + 1] - d1[i]) / dt_sample;

  auto variance = [](std::span<const double> s) {
    const double sd = stddev_of(s);
    return sd * sd;
  };
  Hjorth out;
  out.activity = variance(x);
  const double a1 = variance(d1);
  const double a2 = variance(d2);
  if (out.activity > 0.0) out.mobility = std::sqrt(a1 / out.activity);
  if (out.mobility && a1 > 0.0 && *out.mobility > 0.0) {
    const double mobility_d1 = std::sqrt(a2 / a1);
    out.complexity = mobility_d1 / *out.mobility;
  }
  return out;
}

double sample_entropy(std::span<const double> x, int m, double r_factor) {
  if (m < 1) raise(ErrorKind::kInvalidArgument, "embedding dimension must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (n < m + 2) raise(ErrorKind::kInvalidArgument, "sample entropy needs N >= m + 2");
  const double sigma = stddev_of(x);
  if (sigma == 0.0) return 0.0;
  const double r = r_factor * sigma;

  const std::ptrdiff_t templates = n - m;
  std::uint64_t count_m = 0;
  std::uint64_t count_m1 = 0;
  for (std::ptrdiff_t i = 0; i < templates; ++i) {
    for (std::ptrdiff_t j = i + 1; j < templates; ++j) {
      bool match = true;
      for (std::ptrdiff_t k = 0; k < m; ++k) {
        if (!(std::abs(x[i + k] - x[j + k]) < r)) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      ++count_m;
      if (std::abs(x[i + m] - x[j + m]) < r) ++count_m1;
    }
  }
  // Ordered pairs: each unordered match counts twice.
  const double cm = static_cast<double>(std::max<std::uint64_t>(2 * count_m, 1));
  const double cm1 = static_cast<double>(std::max<std::uint64_t>(2 * count_m1, 1));
  return std::log(cm) - std::log(cm1);
}

FeatureVector extract_features(const TraceWindow& trace, const FeatureOptions& options) {
  FeatureVector f{};
  const std::span<const double> sgi(trace.s_gi_mean);
  f[0] = stddev_of(sgi);

  const Hjorth h = hjorth(sgi, trace.dt_sample);
  f[1] = h.activity;
  f[2] = h.mobility.value_or(0.0);
  f[3] = h.complexity.value_or(0.0);

  f[4] = banded_psd(std::span<const std::vector<double>>(trace.v_gi), trace.dt_sample, kBetaBand,
                    options.resolution_hz);

  const std::size_t cells = trace.v_stn.size();
  const std::size_t len = trace.size();
  const auto factor = static_cast<std::size_t>(std::max(1, options.sampen_decimation));
  std::vector<double> stn;
  stn.reserve(len / factor);
  for (std::size_t start = 0; start + factor <= len; start += factor) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      for (std::size_t k = 0; k < factor; ++k) acc += trace.v_stn[c][start + k];
    }
    stn.push_back(acc / static_cast<double>(cells * factor));
  }
  f[5] = sample_entropy(stn, options.sampen_m, options.sampen_r_factor);
  return f;
}

NormalizationSpec calibrate_normalization(std::span<const FeatureVector> samples,
                                          std::string provenance, double margin) {
  if (samples.size() < 20) {
    raise(ErrorKind::kInvalidArgument, "normalization calibration needs at least 20 samples");
  }
  NormalizationSpec spec;
  spec.provenance = std::move(provenance);
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    double lo = samples.front()[k];
    double hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s[k]);
      hi = std::max(hi, s[k]);
    }
    if (!(hi > lo)) {
      raise(ErrorKind::kDegenerateRange,
            "feature '" + std::string(kFeatureNames[k]) + "' is constant across calibration");
    }
    const double pad = margin * (hi - lo);
    spec.min[k] = lo - pad;
    spec.max[k] = hi + pad;
  }
  return spec;
}

std::string spec_id(const NormalizationSpec& spec) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (auto name : kFeatureNames) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(name.data()), static_cast<uInt>(name.size()));
  }
  auto mix = [&crc](const std::array<double, kFeatureCount>& a) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(a.data()),
                static_cast<uInt>(a.size() * sizeof(double)));
  };
  mix(spec.min);
  mix(spec.max);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "ns-%08lx", static_cast<unsigned long>(crc));
  return buf;
}

Observation normalize(const FeatureVector& v, const NormalizationSpec& spec) {
  Observation o{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double scaled = (v[k] - spec.min[k]) / (spec.max[k] - spec.min[k]);
    o[k] = std::isnan(scaled) ? 0.0 : std::clamp(scaled, 0.0, 1.0);
  }
  return o;
}

}  // namespace bgdbs
