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

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "bgdbs/env.hpp"
#include "bgdbs/errors.hpp"
#include "bgdbs/model_params.hpp"

namespace bgdbs::test {

inline std::string params_text() {
  std::ifstream in(BGDBS_TEST_PARAMS);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const ModelParams& shipped_model() {
  static const ModelParams p = parse_model_params(params_text());
  return p;
}

// Env config with identity-like normalization; calibration-free.
inline EnvConfig unit_config(Condition c = Condition::kParkinsonian) {
  EnvConfig cfg;
  cfg.model = shipped_model();
  cfg.condition = c;
  cfg.norm_spec.min.fill(0.0);
  cfg.norm_spec.max.fill(1.0);
  cfg.r1_norm = {0.03, 0.15};
  return cfg;
}

// Runs fn and checks it throws bgdbs::Error of the given kind.
template <typename Fn>
void check_error(ErrorKind kind, Fn&& fn) {
  try {
    fn();
    FAIL("expected error " << to_string(kind));
  } catch (const Error& e) {
    CHECK_MESSAGE(e.kind() == kind, e.what());
  }
}

}  // namespace bgdbs::test
