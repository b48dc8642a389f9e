// Copyright 2026 The socrec Authors
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

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "socrec/errors.hpp"
#include "socrec/training.hpp"

namespace socrec::training
{

namespace
{

constexpr std::array<char, 8> kMagic = {'S', 'O', 'C', 'R', 'E', 'C', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

class Writer
{
public:
  explicit Writer(std::ostream & out) : out_(out) {}

  template <typename T>
  void pod(T v)
  {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char *>(&v), sizeof v);
  }
  void u64(std::size_t v) { pod<std::uint64_t>(v); }
  void str(const std::string & s)
  {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void tensor(const model::Tensor & t)
  {
    u64(t.rows());
    u64(t.cols());
    for (const auto v : t.values()) pod(v);
  }

private:
  std::ostream & out_;
};

class Reader
{
public:
  explicit Reader(std::istream & in) : in_(in) {}

  template <typename T>
  T pod()
  {
    T v{};
    in_.read(reinterpret_cast<char *>(&v), sizeof v);
    if (!in_) throw ParseError(0, "checkpoint is truncated");
    return v;
  }
  std::size_t u64() { return static_cast<std::size_t>(pod<std::uint64_t>()); }
  std::size_t count(std::size_t limit = std::size_t{1} << 32)
  {
    const std::size_t n = u64();
    if (n > limit) throw ParseError(0, "checkpoint holds an implausible element count");
    return n;
  }
  std::string str()
  {
    std::string s(count(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw ParseError(0, "checkpoint is truncated");
    return s;
  }
  model::Tensor tensor()
  {
    const std::size_t rows = count(), cols = count();
    model::Tensor t(rows, cols);
    for (auto & v : t.values()) v = pod<model::Scalar>();
    return t;
  }

private:
  std::istream & in_;
};

void write_model(Writer & w, const model::Model & m)
{
  w.pod<std::int32_t>(m.epoch());
  w.u64(m.parameters().size());
  for (const auto & p : m.parameters()) {
    w.str(p.name);
    w.tensor(p.value);
  }
}

model::Model read_model(Reader & r, const model::HyperParams & hyper)
{
  model::Model m(hyper, 0);
  m.set_epoch(r.pod<std::int32_t>());
  const std::size_t n = r.count();
  if (n != m.parameters().size()) {
    throw ConfigError(
      "checkpoint has " + std::to_string(n) + " tensors but the architecture needs " +
      std::to_string(m.parameters().size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = r.str();
    model::Tensor value = r.tensor();
    auto * p = m.parameters().find(name);
    if (p == nullptr) throw ConfigError("checkpoint tensor '" + name + "' does not exist in this architecture");
    if (!p->value.same_shape(value)) {
      throw ConfigError(
        "checkpoint tensor '" + name + "' is " + nn::shape_string(value) + ", expected " +
        nn::shape_string(p->value));
    }
    p->value = std::move(value);
  }
  return m;
}

void write_scene(Writer & w, const data::Scene & s)
{
  w.pod<std::uint8_t>(static_cast<std::uint8_t>(s.source));
  w.pod<std::int64_t>(s.start_frame);
  w.u64(s.agents());
  for (const auto id : s.ped_ids) w.pod<std::int64_t>(id);
  for (const auto & p : s.positions) {
    w.pod(p.x);
    w.pod(p.y);
  }
}

data::Scene read_scene(Reader & r)
{
  data::Scene s;
  const auto source = r.pod<std::uint8_t>();
  if (source > static_cast<std::uint8_t>(data::SourceTag::baseline_aug)) throw ParseError(0, "checkpoint: bad source tag");
  s.source = static_cast<data::SourceTag>(source);
  s.start_frame = r.pod<std::int64_t>();
  const std::size_t n = r.count(1u << 20);
  for (std::size_t i = 0; i < n; ++i) s.ped_ids.push_back(r.pod<std::int64_t>());
  s.positions.resize(n * data::Scene::kTotalSteps);
  for (auto & p : s.positions) {
    p.x = r.pod<double>();
    p.y = r.pod<double>();
  }
  return s;
}

}  // namespace

void save_checkpoint(std::ostream & out, const TrainState & state, const TrainConfig & config)
{
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.pod(kVersion);
  w.str(train_config_text(config));
  w.pod<std::int32_t>(state.epoch);
  write_model(w, state.model);
  w.pod<std::uint8_t>(state.frozen_reconstructor ? 1 : 0);
  if (state.frozen_reconstructor) write_model(w, *state.frozen_reconstructor);

  w.pod<std::int64_t>(state.adam.step);
  w.u64(state.adam.m.size());
  for (std::size_t i = 0; i < state.adam.m.size(); ++i) {
    w.tensor(state.adam.m[i]);
    w.tensor(state.adam.v[i]);
  }

  w.u64(state.ledger.entries().size());
  for (const auto & [sample, history] : state.ledger.entries()) {
    w.u64(sample);
    w.u64(history.size());
    for (const auto & e : history) {
      w.pod<std::int32_t>(e.epoch);
      w.pod(e.loss);
    }
  }

  w.pod<std::int32_t>(state.pool.generation_epoch);
  w.u64(state.pool.rejected);
  w.u64(state.pool.scenes.size());
  for (std::size_t i = 0; i < state.pool.scenes.size(); ++i) {
    w.u64(state.pool.source_ids[i]);
    write_scene(w, state.pool.scenes[i]);
  }

  const TrainReport & rep = state.report;
  w.u64(rep.epochs.size());
  for (const auto & e : rep.epochs) {
    w.pod<std::int32_t>(e.epoch);
    for (double v : {e.losses.l_f, e.losses.l_r, e.losses.l_soc_f, e.losses.l_soc_r, e.losses.total}) w.pod(v);
    w.pod(e.learning_rate);
    w.pod(e.seconds);
    w.u64(e.scenes);
  }
  w.u64(rep.refresh_epochs.size());
  for (int e : rep.refresh_epochs) w.pod<std::int32_t>(e);
  w.u64(rep.pool_sizes.size());
  for (std::size_t s : rep.pool_sizes) w.u64(s);
  w.u64(rep.rejected_pseudo);
  w.str(rep.checkpoint_path);
  if (!out) throw std::runtime_error("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path & path, const TrainState & state, const TrainConfig & config)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_checkpoint(out, state, config);
}

Checkpoint load_checkpoint(std::istream & in)
{
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError(0, "not a socrec checkpoint");
  Reader r(in);
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) throw ParseError(0, "unsupported checkpoint version " + std::to_string(version));
  std::istringstream config_text(r.str());
  TrainConfig config = parse_train_config(config_text);
  config.hyper.validate();

  const int epoch = r.pod<std::int32_t>();
  TrainState state{read_model(r, config.hyper), {}, {}, {}, epoch, std::nullopt, {}};
  if (r.pod<std::uint8_t>() != 0) state.frozen_reconstructor = read_model(r, config.hyper);

  state.adam.step = r.pod<std::int64_t>();
  const std::size_t moments = r.count();
  for (std::size_t i = 0; i < moments; ++i) {
    state.adam.m.push_back(r.tensor());
    state.adam.v.push_back(r.tensor());
  }

  std::map<std::size_t, std::vector<curriculum::DifficultyLedger::Entry>> ledger;
  const std::size_t tracked = r.count();
  for (std::size_t i = 0; i < tracked; ++i) {
    auto & h = ledger[r.u64()];
    const std::size_t n = r.count();
    for (std::size_t j = 0; j < n; ++j) {
      curriculum::DifficultyLedger::Entry e;
      e.epoch = r.pod<std::int32_t>();
      e.loss = r.pod<double>();
      h.push_back(e);
    }
  }
  state.ledger = curriculum::DifficultyLedger::from_entries(ledger);

  state.pool.generation_epoch = r.pod<std::int32_t>();
  state.pool.rejected = r.u64();
  const std::size_t pooled = r.count();
  for (std::size_t i = 0; i < pooled; ++i) {
    state.pool.source_ids.push_back(r.u64());
    state.pool.scenes.push_back(read_scene(r));
  }

  TrainReport & rep = state.report;
  const std::size_t epochs = r.count();
  for (std::size_t i = 0; i < epochs; ++i) {
    EpochRecord e;
    e.epoch = r.pod<std::int32_t>();
    e.losses.l_f = r.pod<double>();
    e.losses.l_r = r.pod<double>();
    e.losses.l_soc_f = r.pod<double>();
    e.losses.l_soc_r = r.pod<double>();
    e.losses.total = r.pod<double>();
    e.learning_rate = r.pod<double>();
    e.seconds = r.pod<double>();
    e.scenes = r.u64();
    rep.epochs.push_back(e);
  }
  const std::size_t refreshes = r.count();
  for (std::size_t i = 0; i < refreshes; ++i) rep.refresh_epochs.push_back(r.pod<std::int32_t>());
  const std::size_t sizes = r.count();
  for (std::size_t i = 0; i < sizes; ++i) rep.pool_sizes.push_back(r.u64());
  rep.rejected_pseudo = r.u64();
  rep.checkpoint_path = r.str();
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError(0, "trailing bytes after checkpoint");
  return {std::move(config), std::move(state)};
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace socrec::training
