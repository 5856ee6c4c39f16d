// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/cli/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rsim/core/error.hpp"
#include "rsim/core/strategy.hpp"

namespace rsim::cli {

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, sizeof(T));
}

void put_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptCheckpoint, what);
}

template <typename T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) corrupt("truncated checkpoint");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& in, std::uint64_t n, std::uint64_t limit) {
  if (n > limit) corrupt("implausible length field");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    corrupt("truncated checkpoint");
  }
  return s;
}

nlohmann::json spec_json(const model::PolicySpec& s) {
  return {{"vocab_size", s.vocab_size},       {"embed_dim", s.embed_dim},
          {"context_window", s.context_window}, {"hidden_dims", s.hidden_dims},
          {"output_arity", s.output_arity},   {"pad_token", s.pad_token}};
}

model::PolicySpec spec_from(const nlohmann::json& j) {
  model::PolicySpec s;
  s.vocab_size = j.at("vocab_size").get<int>();
  s.embed_dim = j.at("embed_dim").get<int>();
  s.context_window = j.at("context_window").get<int>();
  s.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  s.output_arity = j.at("output_arity").get<int>();
  s.pad_token = j.at("pad_token").get<TokenId>();
  return s;
}

}  // namespace

CheckpointMeta make_meta(const std::string& role, const model::PolicyParams& params,
                         const Vocab& vocab, std::int64_t updates, int stage,
                         nlohmann::json config) {
  CheckpointMeta m;
  m.role = role;
  m.spec = params.spec();
  m.vocab = vocab.tokens();
  m.strategy_hash = StrategyTable::builtin().hash();
  m.updates = updates;
  m.stage = stage;
  m.config = std::move(config);
  return m;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& m = ckpt.meta;
  nlohmann::json meta = {{"role", m.role},
                         {"spec", spec_json(m.spec)},
                         {"vocab", m.vocab},
                         {"strategy_hash", m.strategy_hash},
                         {"updates", m.updates},
                         {"stage", m.stage},
                         {"config", m.config}};
  const std::string text = meta.dump();
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto& tensors = ckpt.params.tensors();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    for (double v : t.values) put_f64(out, v);
  }
}

std::string checkpoint_bytes(const Checkpoint& ckpt) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, ckpt);
  return out.str();
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_checkpoint(out, ckpt);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

Checkpoint read_checkpoint(std::istream& in, const Vocab* expected) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) ||
      std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    corrupt("bad magic");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    corrupt("unsupported checkpoint version " + std::to_string(version));
  }
  const auto meta_len = get<std::uint64_t>(in);
  const std::string text = get_bytes(in, meta_len, 1u << 26);

  CheckpointMeta m;
  try {
    const auto meta = nlohmann::json::parse(text);
    m.role = meta.at("role").get<std::string>();
    m.spec = spec_from(meta.at("spec"));
    m.vocab = meta.at("vocab").get<std::vector<std::string>>();
    m.strategy_hash = meta.at("strategy_hash").get<std::uint64_t>();
    m.updates = meta.at("updates").get<std::int64_t>();
    m.stage = meta.at("stage").get<int>();
    m.config = meta.at("config");
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("bad metadata: ") + e.what());
  }
  if (m.role != "planner" && m.role != "reasoner") corrupt("unknown role " + m.role);
  try {
    m.spec.validate();
  } catch (const Error& e) {
    corrupt(std::string("bad policy spec: ") + e.what());
  }

  if (m.strategy_hash != StrategyTable::builtin().hash()) {
    throw Error(ErrorCode::kVocabMismatch, "strategy table hash differs from the bundled table");
  }
  if (expected != nullptr && m.vocab != expected->tokens()) {
    throw Error(ErrorCode::kVocabMismatch, "checkpoint vocabulary differs");
  }
  if (static_cast<std::size_t>(m.spec.vocab_size) != m.vocab.size()) {
    corrupt("spec vocab_size does not match stored vocabulary");
  }

  const auto count = get<std::uint32_t>(in);
  std::vector<model::Tensor> tensors;
  for (std::uint32_t i = 0; i < count && i < 1024; ++i) {
    model::Tensor t;
    t.name = get_bytes(in, get<std::uint32_t>(in), 256);
    const auto rank = get<std::uint32_t>(in);
    if (rank > 4) corrupt("implausible tensor rank");
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto d = get<std::uint64_t>(in);
      if (d > (1u << 24)) corrupt("implausible tensor dimension");
      t.shape.push_back(static_cast<std::size_t>(d));
      n *= d;
    }
    if (n > (1u << 26)) corrupt("implausible tensor size");
    t.values.resize(static_cast<std::size_t>(n));
    for (auto& v : t.values) {
      v = std::bit_cast<double>(get<std::uint64_t>(in));
      if (!std::isfinite(v)) corrupt("non-finite parameter in " + t.name);
    }
    tensors.push_back(std::move(t));
  }
  if (tensors.size() != count) corrupt("implausible tensor count");
  if (in.peek() != std::char_traits<char>::eof()) corrupt("trailing bytes");

  try {
    auto params = model::PolicyParams::from_tensors(m.spec, std::move(tensors));
    return {std::move(m), std::move(params)};
  } catch (const Error& e) {
    corrupt(std::string("tensor layout: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::string& path, const Vocab* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return read_checkpoint(in, expected);
}

Checkpoint load_role(const std::string& path, const std::string& role, const Vocab& vocab) {
  auto ckpt = load_checkpoint(path, &vocab);
  if (ckpt.meta.role != role) {
    throw Error(ErrorCode::kConfigError,
                path + " holds a " + ckpt.meta.role + ", expected a " + role);
  }
  return ckpt;
}

}  // namespace rsim::cli
