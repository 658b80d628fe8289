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

#include "bgdbs/td3.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "bgdbs/errors.hpp"

namespace bgdbs {

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes little endian");

// ---------------------------------------------------------------- DenseNet

DenseNet::DenseNet(std::vector<int> sizes, Output output, std::mt19937_64& rng)
    : sizes_(std::move(sizes)), output_(output) {
  if (sizes_.size() < 2) raise(ErrorKind::kInvalidArgument, "network needs at least two layers");
  for (int s : sizes_) {
    if (s < 1) raise(ErrorKind::kInvalidArgument, "layer sizes must be >= 1");
  }
  build_offsets();
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < out * in + out; ++i) params_[offsets_[l] + i] = u(rng);
  }
}

void DenseNet::build_offsets() {
  offsets_.clear();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * (static_cast<std::size_t>(sizes_[l]) + 1);
  }
  params_.assign(total, 0.0);
}

DenseNet DenseNet::from_params(std::vector<int> sizes, Output output, std::vector<double> params) {
  DenseNet net;
  net.sizes_ = std::move(sizes);
  net.output_ = output;
  if (net.sizes_.size() < 2) raise(ErrorKind::kInvalidArgument, "network needs at least two layers");
  net.build_offsets();
  if (params.size() != net.params_.size()) {
    raise(ErrorKind::kInvalidArgument, "parameter count does not match layer sizes");
  }
  net.params_ = std::move(params);
  return net;
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  Tape tape;
  return forward(x, tape);
}

std::vector<double> DenseNet::forward(std::span<const double> x, Tape& tape) const {
  if (x.size() != input_dim()) raise(ErrorKind::kInvalidArgument, "input size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  tape.a.resize(sizes_.size());
  tape.a[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    const double* b = w + out * in;
    const auto& prev = tape.a[l];
    auto& cur = tape.a[l + 1];
    cur.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * prev[i];
      if (l + 1 < layers) {
        z = std::max(z, 0.0);
      } else if (output_ == Output::kTanh) {
        z = std::tanh(z);
      }
      cur[o] = z;
    }
  }
  return tape.a.back();
}

std::vector<double> DenseNet::backward(const Tape& tape, std::span<const double> d_out,
                                       std::span<double> grad) const {
  if (d_out.size() != output_dim() || grad.size() != params_.size()) {
    raise(ErrorKind::kInvalidArgument, "backward size mismatch");
  }
  const std::size_t layers = sizes_.size() - 1;
  std::vector<double> delta(d_out.begin(), d_out.end());
  if (output_ == Output::kTanh) {
    for (std::size_t o = 0; o < delta.size(); ++o) {
      const double y = tape.a.back()[o];
      delta[o] *= 1.0 - y * y;
    }
  }
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = gw + out * in;
    const auto& prev = tape.a[l];
    std::vector<double> d_prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      gb[o] += delta[o];
      for (std::size_t i = 0; i < in; ++i) {
        gw[o * in + i] += delta[o] * prev[i];
        d_prev[i] += w[o * in + i] * delta[o];
      }
    }
    if (l > 0) {
      // ReLU derivative, taken as 0 at the kink.
      for (std::size_t i = 0; i < in; ++i) {
        if (!(prev[i] > 0.0)) d_prev[i] = 0.0;
      }
    }
    delta = std::move(d_prev);
  }
  return delta;
}

// -------------------------------------------------------------------- Adam

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    raise(ErrorKind::kInvalidArgument, "optimizer size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

// ------------------------------------------------------------ ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) raise(ErrorKind::kInvalidArgument, "replay capacity must be >= 1");
  data_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
  } else {
    data_[next_] = t;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  if (batch > data_.size()) raise(ErrorKind::kInvalidArgument, "batch larger than buffer");
  std::vector<std::size_t> all(data_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(batch);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), batch, rng);
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i : picked) out.push_back(data_[i]);
  return out;
}

// ------------------------------------------------------------------ losses

std::array<double, kFeatureCount + kActionDim> critic_input(const Observation& obs,
                                                            const Action& action) {
  std::array<double, kFeatureCount + kActionDim> x{};
  std::copy(obs.begin(), obs.end(), x.begin());
  std::copy(action.begin(), action.end(), x.begin() + kFeatureCount);
  return x;
}

double critic_loss_grad(const DenseNet& critic, std::span<const Transition> batch,
                        std::span<const double> targets, std::span<double> grad) {
  if (batch.empty() || targets.size() != batch.size()) {
    raise(ErrorKind::kInvalidArgument, "critic loss needs one target per transition");
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  DenseNet::Tape tape;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = critic_input(batch[i].obs, batch[i].action);
    const double q = critic.forward(x, tape)[0];
    const double err = q - targets[i];
    loss += err * err * scale;
    const double d = 2.0 * err * scale;
    critic.backward(tape, std::span<const double>(&d, 1), grad);
  }
  return loss;
}

double actor_loss_grad(const DenseNet& actor, const DenseNet& critic,
                       std::span<const Transition> batch, std::span<double> grad) {
  if (batch.empty()) raise(ErrorKind::kInvalidArgument, "actor loss needs a nonempty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> critic_grad_sink(critic.params().size());
  double loss = 0.0;
  DenseNet::Tape actor_tape, critic_tape;
  for (const auto& t : batch) {
    const auto a = actor.forward(t.obs, actor_tape);
    const auto x = critic_input(t.obs, {a[0], a[1]});
    loss -= critic.forward(x, critic_tape)[0] * scale;
    const double d = -scale;
    const auto dx = critic.backward(critic_tape, std::span<const double>(&d, 1), critic_grad_sink);
    actor.backward(actor_tape, std::span<const double>(dx).subspan(kFeatureCount, kActionDim),
                   grad);
  }
  return loss;
}

// ------------------------------------------------------------------- Agent

void validate(const AgentParams& p) {
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) raise(ErrorKind::kConfig, "gamma must lie in (0, 1]");
  if (!(p.tau > 0.0 && p.tau <= 1.0)) raise(ErrorKind::kConfig, "tau must lie in (0, 1]");
  if (p.policy_delay < 1) raise(ErrorKind::kConfig, "policy_delay must be >= 1");
  if (!(p.target_noise_sigma >= 0.0) || !(p.target_noise_clip >= 0.0) ||
      !(p.exploration_sigma >= 0.0)) {
    raise(ErrorKind::kConfig, "noise scales must be >= 0");
  }
  if (p.batch_size < 1) raise(ErrorKind::kConfig, "batch_size must be >= 1");
  if (p.buffer_capacity < static_cast<std::size_t>(p.batch_size)) {
    raise(ErrorKind::kConfig, "buffer_capacity must be >= batch_size");
  }
  if (!(p.actor_lr > 0.0) || !(p.critic_lr > 0.0)) {
    raise(ErrorKind::kConfig, "learning rates must be > 0");
  }
  if (p.warmup_steps < 0) raise(ErrorKind::kConfig, "warmup_steps must be >= 0");
  for (int h : p.hidden) {
    if (h < 1) raise(ErrorKind::kConfig, "hidden layer sizes must be >= 1");
  }
}

namespace {

std::vector<int> layer_sizes(std::size_t in, const std::vector<int>& hidden, std::size_t out) {
  std::vector<int> sizes{static_cast<int>(in)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<int>(out));
  return sizes;
}

double norm(std::span<const double> g) {
  double acc = 0.0;
  for (double x : g) acc += x * x;
  return std::sqrt(acc);
}

void require_finite(std::span<const double> g, double loss, const char* what) {
  const bool ok = std::isfinite(loss) &&
                  std::all_of(g.begin(), g.end(), [](double x) { return std::isfinite(x); });
  if (!ok) {
    std::ostringstream msg;
    msg << what << " loss " << loss << ", gradient norm " << norm(g);
    raise(ErrorKind::kNanGradient, msg.str());
  }
}

}  // namespace

Agent::Agent(AgentParams params) : params_(std::move(params)), rng_(params_.seed) {
  validate(params_);
  actor_ = DenseNet(layer_sizes(kFeatureCount, params_.hidden, kActionDim),
                    DenseNet::Output::kTanh, rng_);
  const auto critic_sizes = layer_sizes(kFeatureCount + kActionDim, params_.hidden, 1);
  critic1_ = DenseNet(critic_sizes, DenseNet::Output::kIdentity, rng_);
  critic2_ = DenseNet(critic_sizes, DenseNet::Output::kIdentity, rng_);
  actor_t_ = actor_;
  critic1_t_ = critic1_;
  critic2_t_ = critic2_;
  actor_opt_ = Adam(actor_.params().size(), params_.actor_lr);
  critic1_opt_ = Adam(critic1_.params().size(), params_.critic_lr);
  critic2_opt_ = Adam(critic2_.params().size(), params_.critic_lr);
}

Action Agent::act(const Observation& obs, bool explore) {
  if (explore && explore_calls_++ < params_.warmup_steps) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a0 = u(rng_);
    return {a0, u(rng_)};
  }
  Action a = policy(obs);
  if (explore && params_.exploration_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params_.exploration_sigma);
    for (double& v : a) v = std::clamp(v + noise(rng_), -1.0, 1.0);
  }
  return a;
}

Action Agent::policy(const Observation& obs) const {
  const auto y = actor_.forward(obs);
  return {y[0], y[1]};
}

std::vector<double> Agent::critic_target(std::span<const Transition> batch) {
  if (batch.empty()) raise(ErrorKind::kInvalidArgument, "critic_target needs a nonempty batch");
  std::vector<double> y(batch.size());
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    if (t.done) {
      y[i] = t.reward;
      continue;
    }
    const auto pi = actor_t_.forward(t.next_obs);
    Action a{};
    for (std::size_t k = 0; k < kActionDim; ++k) {
      double eps = 0.0;
      if (params_.target_noise_sigma > 0.0) {
        eps = std::clamp(params_.target_noise_sigma * noise(rng_), -params_.target_noise_clip,
                         params_.target_noise_clip);
      }
      a[k] = std::clamp(pi[k] + eps, -1.0, 1.0);
    }
    const auto x = critic_input(t.next_obs, a);
    const double q = std::min(critic1_t_.forward(x)[0], critic2_t_.forward(x)[0]);
    y[i] = t.reward + params_.gamma * q;
  }
  return y;
}

UpdateDiagnostics Agent::update(const ReplayBuffer& buffer) {
  const auto batch = buffer.sample(static_cast<std::size_t>(params_.batch_size), rng_);
  return update_on(batch);
}

UpdateDiagnostics Agent::update_on(std::span<const Transition> batch) {
  UpdateDiagnostics d;
  const auto y = critic_target(batch);

  std::vector<double> g1(critic1_.params().size(), 0.0);
  std::vector<double> g2(critic2_.params().size(), 0.0);
  d.critic1_loss = critic_loss_grad(critic1_, batch, y, g1);
  d.critic2_loss = critic_loss_grad(critic2_, batch, y, g2);
  require_finite(g1, d.critic1_loss, "critic 1");
  require_finite(g2, d.critic2_loss, "critic 2");
  d.critic1_grad_norm = norm(g1);
  d.critic2_grad_norm = norm(g2);
  critic1_opt_.step(critic1_.params(), g1);
  critic2_opt_.step(critic2_.params(), g2);

  ++updates_;
  if (updates_ % params_.policy_delay == 0) {
    std::vector<double> ga(actor_.params().size(), 0.0);
    const double loss = actor_loss_grad(actor_, critic1_, batch, ga);
    require_finite(ga, loss, "actor");
    d.actor_loss = loss;
    d.actor_grad_norm = norm(ga);
    actor_opt_.step(actor_.params(), ga);
    polyak();
  }
  return d;
}

void Agent::polyak() {
  const double tau = params_.tau;
  auto blend = [tau](DenseNet& target, const DenseNet& online) {
    auto t = target.params();
    const auto o = online.params();
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = tau == 1.0 ? o[i] : tau * o[i] + (1.0 - tau) * t[i];
    }
  };
  blend(actor_t_, actor_);
  blend(critic1_t_, critic1_);
  blend(critic2_t_, critic2_);
}

// -------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'B', 'G', 'D', 'B', 'S', 'T', 'D', '3'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void get_bytes(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const noexcept { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) raise(ErrorKind::kCorruptCheckpoint, "checkpoint truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; checkpoints are far below 4 GiB.
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

void put_net(Writer& w, const DenseNet& net) {
  w.put(static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) w.put(static_cast<std::uint32_t>(s));
  w.put(static_cast<std::uint8_t>(net.output()));
  w.put(static_cast<std::uint64_t>(net.params().size()));
  w.put_bytes(net.params().data(), net.params().size() * sizeof(double));
}

DenseNet get_net(Reader& r) {
  const auto layers = r.get<std::uint32_t>();
  if (layers < 2 || layers > 64) raise(ErrorKind::kCorruptCheckpoint, "bad layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const auto s = r.get<std::uint32_t>();
    if (s == 0 || s > (1U << 20)) raise(ErrorKind::kCorruptCheckpoint, "bad layer size");
    sizes.push_back(static_cast<int>(s));
  }
  const auto output = r.get<std::uint8_t>();
  if (output > 1) raise(ErrorKind::kCorruptCheckpoint, "bad output activation");
  const auto n = r.get<std::uint64_t>();
  std::size_t expect = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    expect += static_cast<std::size_t>(sizes[l + 1]) * (static_cast<std::size_t>(sizes[l]) + 1);
  }
  if (n != expect) raise(ErrorKind::kCorruptCheckpoint, "parameter count does not match shapes");
  std::vector<double> params(n);
  r.get_bytes(params.data(), n * sizeof(double));
  return DenseNet::from_params(std::move(sizes), static_cast<DenseNet::Output>(output),
                               std::move(params));
}

}  // namespace

std::vector<std::uint8_t> Agent::save(const CheckpointMeta& meta) const {
  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put(kFormatVersion);
  w.put_string(meta.norm_spec_id);
  w.put(meta.config_hash);
  w.put(static_cast<std::uint32_t>(kFeatureCount));
  for (auto name : kFeatureNames) w.put_string(std::string(name));

  const AgentParams& p = params_;
  w.put(p.gamma);
  w.put(p.tau);
  w.put(static_cast<std::int32_t>(p.policy_delay));
  w.put(p.target_noise_sigma);
  w.put(p.target_noise_clip);
  w.put(p.exploration_sigma);
  w.put(static_cast<std::int32_t>(p.batch_size));
  w.put(static_cast<std::uint64_t>(p.buffer_capacity));
  w.put(p.actor_lr);
  w.put(p.critic_lr);
  w.put(static_cast<std::int32_t>(p.warmup_steps));
  w.put(static_cast<std::uint32_t>(p.hidden.size()));
  for (int h : p.hidden) w.put(static_cast<std::int32_t>(h));
  w.put(p.seed);

  for (const DenseNet* net : {&actor_, &critic1_, &critic2_, &actor_t_, &critic1_t_, &critic2_t_}) {
    put_net(w, *net);
  }
  const std::uint32_t crc = checksum(w.bytes());
  w.put(crc);
  return std::move(w.bytes());
}

Agent Agent::load(std::span<const std::uint8_t> bytes, CheckpointMeta* meta_out) {
  if (bytes.size() < sizeof(kMagic) + 2 * sizeof(std::uint32_t)) {
    raise(ErrorKind::kCorruptCheckpoint, "checkpoint too short");
  }
  const auto body = bytes.first(bytes.size() - sizeof(std::uint32_t));
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + body.size(), sizeof(stored));
  if (checksum(body) != stored) raise(ErrorKind::kCorruptCheckpoint, "checksum mismatch");

  Reader r(body);
  char magic[sizeof(kMagic)];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    raise(ErrorKind::kCorruptCheckpoint, "not a bgdbs agent checkpoint");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    raise(ErrorKind::kVersionMismatch,
          "checkpoint format " + std::to_string(version) + ", expected " +
              std::to_string(kFormatVersion));
  }
  CheckpointMeta meta;
  meta.norm_spec_id = r.get_string();
  if (meta.norm_spec_id.empty()) {
    raise(ErrorKind::kVersionMismatch, "checkpoint carries no normalization spec id");
  }
  meta.config_hash = r.get<std::uint64_t>();
  const auto features = r.get<std::uint32_t>();
  if (features != kFeatureCount) raise(ErrorKind::kVersionMismatch, "feature count differs");
  for (auto name : kFeatureNames) {
    if (r.get_string() != name) raise(ErrorKind::kVersionMismatch, "feature order differs");
  }

  AgentParams p;
  p.gamma = r.get<double>();
  p.tau = r.get<double>();
  p.policy_delay = r.get<std::int32_t>();
  p.target_noise_sigma = r.get<double>();
  p.target_noise_clip = r.get<double>();
  p.exploration_sigma = r.get<double>();
  p.batch_size = r.get<std::int32_t>();
  p.buffer_capacity = r.get<std::uint64_t>();
  p.actor_lr = r.get<double>();
  p.critic_lr = r.get<double>();
  p.warmup_steps = r.get<std::int32_t>();
  const auto hidden = r.get<std::uint32_t>();
  if (hidden > 64) raise(ErrorKind::kCorruptCheckpoint, "bad hidden layer count");
  p.hidden.clear();
  for (std::uint32_t i = 0; i < hidden; ++i) p.hidden.push_back(r.get<std::int32_t>());
  p.seed = r.get<std::uint64_t>();

  Agent agent(p);
  for (DenseNet* net : {&agent.actor_, &agent.critic1_, &agent.critic2_, &agent.actor_t_,
                        &agent.critic1_t_, &agent.critic2_t_}) {
    DenseNet loaded = get_net(r);
    if (loaded.sizes() != net->sizes() || loaded.output() != net->output()) {
      raise(ErrorKind::kCorruptCheckpoint, "network shape does not match agent parameters");
    }
    *net = std::move(loaded);
  }
  if (!r.at_end()) raise(ErrorKind::kCorruptCheckpoint, "trailing bytes after payload");
  if (meta_out != nullptr) *meta_out = meta;
  return agent;
}

}  // namespace bgdbs
