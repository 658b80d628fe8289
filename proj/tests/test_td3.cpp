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
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "bgdbs/td3.hpp"
#include "support.hpp"

using namespace bgdbs;
using bgdbs::test::check_error;

namespace {

std::vector<Transition> random_batch(std::size_t n, std::mt19937_64& rng, double done_rate = 0.2) {
  std::uniform_real_distribution<double> u(0.0, 1.0), a(-1.0, 1.0);
  std::vector<Transition> batch(n);
  for (auto& t : batch) {
    for (double& v : t.obs) v = u(rng);
    for (double& v : t.next_obs) v = u(rng);
    for (double& v : t.action) v = a(rng);
    t.reward = -u(rng);
    t.done = u(rng) < done_rate;
  }
  return batch;
}

bool close_rel(double analytic, double numeric, double tol) {
  const double diff = std::abs(analytic - numeric);
  return diff <= tol * std::max(std::abs(analytic), std::abs(numeric)) || diff < 1e-9;
}

AgentParams tiny_params() {
  AgentParams p;
  p.hidden = {5, 4};
  p.batch_size = 8;
  p.buffer_capacity = 100;
  p.warmup_steps = 0;
  p.seed = 3;
  return p;
}

// Layer 1 is a 4x8 matrix reading only obs[0] (column 0) and action[0]
// (column 6), so the critic behaves like a 2-4-1 network of (s0, a0).
std::vector<double> sparse_critic(const double w1[4][2], const double b1[4], const double w2[4],
                                  double b2) {
  std::vector<double> p;
  for (int o = 0; o < 4; ++o) {
    for (int i = 0; i < 8; ++i) p.push_back(i == 0 ? w1[o][0] : i == 6 ? w1[o][1] : 0.0);
  }
  p.insert(p.end(), b1, b1 + 4);
  p.insert(p.end(), w2, w2 + 4);
  p.push_back(b2);
  return p;
}

}  // namespace

TEST_CASE("hand-computed forward pass of a 2-4-1 network") {
  // W1 rows, then b1, then W2, then b2
  const DenseNet net = DenseNet::from_params(
      {2, 4, 1}, DenseNet::Output::kIdentity,
      {1, -1, 0.5, 0.5, -2, 1, 0, 1, 0, -1, 0.5, 0.25, 1, 2, -1, 0.5, 0.1});
  // x = (1, 2): hidden relu(-1, 0.5, 0.5, 2.25) -> 0 + 1 - 0.5 + 1.125 + 0.1
  CHECK(net.forward(std::vector<double>{1.0, 2.0})[0] == doctest::Approx(1.725));
  // x = (-1, 0.5): hidden (0, 0, 3, 0.75) -> -3 + 0.375 + 0.1
  CHECK(net.forward(std::vector<double>{-1.0, 0.5})[0] == doctest::Approx(-2.525));
  check_error(ErrorKind::kInvalidArgument, [&] { net.forward(std::vector<double>{1.0}); });
  check_error(ErrorKind::kInvalidArgument, [] {
    DenseNet::from_params({2, 4, 1}, DenseNet::Output::kIdentity, std::vector<double>(3, 0.0));
  });
}

TEST_CASE("critic target on a hand-built batch") {
  AgentParams p = tiny_params();
  p.hidden = {4};
  p.target_noise_sigma = 0.0;
  Agent agent(p);

  // target actor: zero weights, output biases atanh(0.5), atanh(-0.2)
  std::vector<double> actor(6 * 4 + 4 + 4 * 2 + 2, 0.0);
  actor[actor.size() - 2] = std::atanh(0.5);
  actor[actor.size() - 1] = std::atanh(-0.2);
  agent.actor_target() = DenseNet::from_params({6, 4, 2}, DenseNet::Output::kTanh, actor);

  const double w1[4][2] = {{1, -1}, {0.5, 0.5}, {-2, 1}, {0, 1}};
  const double b1[4] = {0, -1, 0.5, 0.25};
  const double w2a[4] = {1, 2, -1, 0.5};
  const double w2b[4] = {0.5, 0, 0, 1};
  agent.critic1_target() =
      DenseNet::from_params({8, 4, 1}, DenseNet::Output::kIdentity, sparse_critic(w1, b1, w2a, 0.1));
  agent.critic2_target() =
      DenseNet::from_params({8, 4, 1}, DenseNet::Output::kIdentity, sparse_critic(w1, b1, w2b, 0.0));

  std::vector<Transition> batch(3);
  batch[0].next_obs[0] = 1.5;
  batch[0].reward = 0.2;
  batch[1].next_obs[0] = -1.0;
  batch[1].reward = -0.3;
  batch[2].next_obs[0] = 1.5;
  batch[2].reward = -0.7;
  batch[2].done = true;

  // (s0, a0) = (1.5, 0.5): hidden (1, 0, 0, 0.75); Q1 = 1.475, Q2 = 1.25
  // (s0, a0) = (-1, 0.5):  hidden (0, 0, 3, 0.75); Q1 = -2.525, Q2 = 0.75
  const auto y = agent.critic_target(batch);
  REQUIRE(y.size() == 3);
  CHECK(y[0] == doctest::Approx(0.2 + 0.99 * 1.25));
  CHECK(y[1] == doctest::Approx(-0.3 + 0.99 * -2.525));
  CHECK(y[2] == -0.7);
}

TEST_CASE("terminal transitions do not bootstrap") {
  std::mt19937_64 rng(5);
  Agent agent(tiny_params());
  auto batch = random_batch(32, rng, 1.0);
  const auto y = agent.critic_target(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(y[i] == batch[i].reward);
}

TEST_CASE("twin minimum never exceeds either single-critic target") {
  std::mt19937_64 rng(6);
  const auto batch = random_batch(64, rng, 0.1);
  Agent base(tiny_params());

  Agent twin = base;
  Agent only1 = base;
  only1.critic2_target() = base.critic1_target();
  Agent only2 = base;
  only2.critic1_target() = base.critic2_target();
  // copies share the RNG state, so all three draw the same smoothing noise
  const auto y = twin.critic_target(batch);
  const auto y1 = only1.critic_target(batch);
  const auto y2 = only2.critic_target(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(y[i] <= y1[i]);
    CHECK(y[i] <= y2[i]);
    CHECK((y[i] == y1[i] || y[i] == y2[i]));
  }
}

TEST_CASE("degenerate twin without smoothing noise") {
  std::mt19937_64 rng(7);
  const auto batch = random_batch(16, rng, 0.3);
  AgentParams p = tiny_params();
  p.target_noise_sigma = 0.0;
  Agent agent(p);
  agent.critic2_target() = agent.critic1_target();
  const auto y = agent.critic_target(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto a = agent.actor_target().forward(batch[i].next_obs);
    const auto x = critic_input(batch[i].next_obs, {a[0], a[1]});
    const double q = agent.critic1_target().forward(x)[0];
    const double want = batch[i].reward + (batch[i].done ? 0.0 : 0.99 * q);
    CHECK(y[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(8);
  const auto batch = random_batch(6, rng);
  std::vector<double> targets(batch.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& t : targets) t = u(rng);
  const double h = 1e-6;

  SUBCASE("critic loss") {
    DenseNet critic({8, 5, 4, 1}, DenseNet::Output::kIdentity, rng);
    std::vector<double> grad(critic.params().size(), 0.0);
    critic_loss_grad(critic, batch, targets, grad);
    std::vector<double> scratch(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double keep = critic.params()[i];
      critic.params()[i] = keep + h;
      const double up = critic_loss_grad(critic, batch, targets, scratch);
      critic.params()[i] = keep - h;
      const double down = critic_loss_grad(critic, batch, targets, scratch);
      critic.params()[i] = keep;
      CHECK_MESSAGE(close_rel(grad[i], (up - down) / (2 * h), 1e-4), "param " << i);
    }
  }
  SUBCASE("actor objective") {
    DenseNet actor({6, 5, 4, 2}, DenseNet::Output::kTanh, rng);
    const DenseNet critic({8, 5, 4, 1}, DenseNet::Output::kIdentity, rng);
    std::vector<double> grad(actor.params().size(), 0.0);
    actor_loss_grad(actor, critic, batch, grad);
    std::vector<double> scratch(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double keep = actor.params()[i];
      actor.params()[i] = keep + h;
      const double up = actor_loss_grad(actor, critic, batch, scratch);
      actor.params()[i] = keep - h;
      const double down = actor_loss_grad(actor, critic, batch, scratch);
      actor.params()[i] = keep;
      CHECK_MESSAGE(close_rel(grad[i], (up - down) / (2 * h), 1e-4), "param " << i);
    }
  }
  SUBCASE("input gradient") {
    const DenseNet net({3, 4, 2}, DenseNet::Output::kTanh, rng);
    const std::vector<double> x = {0.3, -0.2, 0.9};
    const std::vector<double> w = {0.7, -1.3};
    DenseNet::Tape tape;
    net.forward(x, tape);
    std::vector<double> grad(net.params().size(), 0.0);
    const auto dx = net.backward(tape, w, grad);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto f = [&](double d) {
        auto xi = x;
        xi[i] += d;
        const auto y = net.forward(xi);
        return w[0] * y[0] + w[1] * y[1];
      };
      CHECK(close_rel(dx[i], (f(h) - f(-h)) / (2 * h), 1e-4));
    }
  }
}

TEST_CASE("actor only moves on delayed steps") {
  std::mt19937_64 rng(9);
  const auto batch = random_batch(8, rng);
  Agent agent(tiny_params());
  const DenseNet actor0 = agent.actor();
  const DenseNet target0 = agent.critic1_target();
  const auto d1 = agent.update_on(batch);
  CHECK_FALSE(d1.actor_loss.has_value());
  CHECK(agent.actor() == actor0);
  CHECK(agent.critic1_target() == target0);
  const auto d2 = agent.update_on(batch);
  CHECK(d2.actor_loss.has_value());
  CHECK_FALSE(agent.actor() == actor0);
  CHECK_FALSE(agent.critic1_target() == target0);
  CHECK(agent.updates() == 2);
}

TEST_CASE("polyak averaging") {
  std::mt19937_64 rng(10);
  const auto batch = random_batch(8, rng);
  SUBCASE("tau = 1 copies the online networks") {
    AgentParams p = tiny_params();
    p.tau = 1.0;
    p.policy_delay = 1;
    Agent agent(p);
    agent.update_on(batch);
    CHECK(agent.actor_target() == agent.actor());
    CHECK(agent.critic1_target() == agent.critic1());
    CHECK(agent.critic2_target() == agent.critic2());
  }
  SUBCASE("tau in (0, 1) contracts toward the online networks") {
    AgentParams p = tiny_params();
    p.tau = 0.3;
    p.policy_delay = 1;
    Agent agent(p);
    const DenseNet old_t = agent.critic2_target();
    agent.update_on(batch);
    const auto t = agent.critic2_target().params();
    const auto o = agent.critic2().params();
    const auto before = old_t.params();
    int moved = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (o[i] == before[i]) continue;
      CHECK(t[i] > std::min(before[i], o[i]));
      CHECK(t[i] < std::max(before[i], o[i]));
      ++moved;
    }
    CHECK(moved > 0);
  }
}

TEST_CASE("NaN gradients abort the update") {
  std::mt19937_64 rng(11);
  auto batch = random_batch(8, rng);
  Agent agent(tiny_params());
  agent.critic1().params()[0] = std::nan("");
  check_error(ErrorKind::kNanGradient, [&] { agent.update_on(batch); });
}

TEST_CASE("acting") {
  AgentParams p = tiny_params();
  p.warmup_steps = 3;
  Agent agent(p);
  Observation obs;
  obs.fill(0.4);
  CHECK(agent.act(obs, false) == agent.act(obs, false));
  CHECK(agent.act(obs, false) == agent.policy(obs));
  for (int i = 0; i < 200; ++i) {
    const Action a = agent.act(obs, true);
    CHECK((a[0] >= -1.0 && a[0] <= 1.0 && a[1] >= -1.0 && a[1] <= 1.0));
  }
  CHECK(agent.explore_calls() == 200);

  AgentParams quiet = tiny_params();
  quiet.exploration_sigma = 0.0;
  Agent still(quiet);
  CHECK(still.act(obs, true) == still.act(obs, false));
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.reward = i;
    buf.push(t);
  }
  CHECK(buf.size() == 3);
  std::vector<double> kept;
  for (std::size_t i = 0; i < buf.size(); ++i) kept.push_back(buf[i].reward);
  std::sort(kept.begin(), kept.end());
  CHECK(kept == std::vector<double>{2, 3, 4});
  std::mt19937_64 rng(1);
  check_error(ErrorKind::kInvalidArgument, [&] { buf.sample(4, rng); });
}

TEST_CASE("replay sampling is uniform") {
  const std::size_t items = 1000, batch = 100, rounds = 1000;  // 1e5 draws
  ReplayBuffer buf(items);
  for (std::size_t i = 0; i < items; ++i) {
    Transition t;
    t.reward = static_cast<double>(i);
    buf.push(t);
  }
  std::vector<double> counts(items, 0.0);
  std::mt19937_64 rng(2024);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto s = buf.sample(batch, rng);
    std::vector<std::size_t> ids;
    for (const auto& t : s) ids.push_back(static_cast<std::size_t>(t.reward));
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());  // no repeats in a batch
    for (auto id : ids) counts[id] += 1.0;
  }
  const double p = static_cast<double>(batch) / static_cast<double>(items);
  const double expected = static_cast<double>(rounds) * p;
  const double sd = std::sqrt(static_cast<double>(rounds) * p * (1.0 - p));
  int outside3 = 0;
  double chi2 = 0.0;
  for (double c : counts) {
    if (std::abs(c - expected) > 3.0 * sd) ++outside3;
    CHECK(std::abs(c - expected) < 4.5 * sd);
    chi2 += (c - expected) * (c - expected) / (sd * sd);
  }
  // with 1000 items a handful beyond 3 sd is expected (0.27% each)
  MESSAGE("items beyond 3 sd: " << outside3 << ", chi2 " << chi2);
  CHECK(outside3 <= 10);
  CHECK(std::abs(chi2 - 999.0) < 5.0 * std::sqrt(2.0 * 999.0));
}

TEST_CASE("checkpoint round trip and integrity") {
  Agent agent(tiny_params());
  std::mt19937_64 rng(12);
  agent.update_on(random_batch(8, rng));
  agent.update_on(random_batch(8, rng));
  const auto bytes = agent.save({"ns-0badf00d", 0x1234abcdULL});

  CheckpointMeta meta;
  const Agent back = Agent::load(bytes, &meta);
  CHECK(meta.norm_spec_id == "ns-0badf00d");
  CHECK(meta.config_hash == 0x1234abcdULL);
  CHECK(back.params() == agent.params());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Observation obs;
    for (double& v : obs) v = u(rng);
    const Action a = agent.policy(obs), b = back.policy(obs);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(a)) == 0);
  }
  CHECK(back.save({"ns-0badf00d", 0x1234abcdULL}) == bytes);

  SUBCASE("any flipped byte is caught") {
    for (std::size_t pos : {std::size_t{0}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
      auto bad = bytes;
      bad[pos] ^= 0x5a;
      check_error(ErrorKind::kCorruptCheckpoint, [&] { Agent::load(bad); });
    }
    auto cut = bytes;
    cut.resize(cut.size() - 9);
    check_error(ErrorKind::kCorruptCheckpoint, [&] { Agent::load(cut); });
  }
  SUBCASE("missing normalization id") {
    const auto anon = agent.save({"", 1});
    check_error(ErrorKind::kVersionMismatch, [&] { Agent::load(anon); });
  }
  SUBCASE("future format version") {
    auto v2 = bytes;
    v2[8] = 2;  // version follows the 8-byte magic
    const uLong crc = crc32(crc32(0L, Z_NULL, 0), v2.data(), static_cast<uInt>(v2.size() - 4));
    const auto c = static_cast<std::uint32_t>(crc);
    std::memcpy(v2.data() + v2.size() - 4, &c, 4);
    check_error(ErrorKind::kVersionMismatch, [&] { Agent::load(v2); });
  }
}

TEST_CASE("parameter validation") {
  auto bad = [](auto mutate) {
    AgentParams p;
    mutate(p);
    check_error(ErrorKind::kConfig, [&] { validate(p); });
  };
  bad([](AgentParams& p) { p.gamma = 1.5; });
  bad([](AgentParams& p) { p.tau = 0.0; });
  bad([](AgentParams& p) { p.policy_delay = 0; });
  bad([](AgentParams& p) { p.batch_size = 0; });
  bad([](AgentParams& p) { p.hidden = {64, 0}; });
  CHECK_NOTHROW(validate(AgentParams{}));
}

TEST_CASE("learns the optimum of a one-step quadratic bandit") {
  AgentParams p;
  p.hidden = {32, 32};
  p.warmup_steps = 200;
  p.seed = 1;
  p.actor_lr = 1e-3;
  p.critic_lr = 1e-3;
  Agent agent(p);
  ReplayBuffer buf(p.buffer_capacity);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Action best = {0.5, -0.3};
  for (int step = 0; step < 2500; ++step) {
    Transition t;
    for (double& v : t.obs) v = u(rng);
    t.action = agent.act(t.obs, true);
    t.reward = -std::pow(t.action[0] - best[0], 2) - std::pow(t.action[1] - best[1], 2);
    t.next_obs = t.obs;
    t.done = true;
    buf.push(t);
    if (step >= p.warmup_steps) agent.update(buf);
  }
  Observation probe;
  probe.fill(0.5);
  const Action a = agent.policy(probe);
  MESSAGE("policy " << a[0] << ", " << a[1]);
  CHECK(std::abs(a[0] - best[0]) < 0.1);
  CHECK(std::abs(a[1] - best[1]) < 0.1);
}
