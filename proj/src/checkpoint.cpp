// Copyright 2026 The trajlab Authors
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

#include "trajlab/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "trajlab/config_io.hpp"
#include "trajlab/dataset.hpp"
#include "trajlab/error.hpp"

namespace trajlab
{
namespace
{

void append_u32(std::string & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void append_u64(std::string & out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void append_doubles(std::string & out, const std::vector<double> & values)
{
  for (double d : values) {
    append_u64(out, std::bit_cast<std::uint64_t>(d));
  }
}

class Reader
{
public:
  explicit Reader(const std::string & bytes) : bytes_(&bytes) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
  std::uint64_t u64() { return raw(8); }

  std::string chunk(std::size_t len)
  {
    need(len);
    std::string s = bytes_->substr(pos_, len);
    pos_ += len;
    return s;
  }

  void doubles(std::vector<double> & out, std::size_t count)
  {
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = std::bit_cast<double>(u64());
    }
  }

  bool done() const { return pos_ == bytes_->size(); }

private:
  std::uint64_t raw(int nbytes)
  {
    need(static_cast<std::size_t>(nbytes));
    std::uint64_t v = 0;
    for (int i = 0; i < nbytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>((*bytes_)[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(nbytes);
    return v;
  }

  void need(std::size_t len) const
  {
    if (pos_ + len > bytes_->size()) {
      throw IoError("checkpoint truncated");
    }
  }

  const std::string * bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_to_bytes(const Checkpoint & ckpt)
{
  if (ckpt.optim.m.size() != ckpt.model.param_count() ||
      ckpt.optim.v.size() != ckpt.model.param_count()) {
    throw ArgumentError("checkpoint optimizer state is misaligned with the parameters");
  }
  Json header;
  header["arch"] = arch_to_json(ckpt.model.cfg);
  Json tensors = Json::array();
  for (const auto & [name, t] : ckpt.model.params) {
    tensors.push_back(Json{{"name", name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  header["tensors"] = std::move(tensors);
  header["step"] = ckpt.optim.step;
  header["epoch"] = ckpt.epoch;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(ckpt.config_hash));
  header["config_hash"] = hash_hex;
  header["best_validation"] = ckpt.best_validation;
  header["validation_loss"] = ckpt.validation_loss;
  const std::string header_bytes = header.dump();

  std::string out;
  out.append(kCheckpointMagic, 4);
  append_u32(out, kCheckpointVersion);
  append_u64(out, header_bytes.size());
  out += header_bytes;
  for (const auto & [name, t] : ckpt.model.params) {
    append_doubles(out, t.v);
  }
  append_doubles(out, ckpt.optim.m);
  append_doubles(out, ckpt.optim.v);
  return out;
}

Checkpoint checkpoint_from_bytes(const std::string & bytes)
{
  Reader r(bytes);
  if (r.chunk(4) != std::string(kCheckpointMagic, 4)) {
    throw IoError("checkpoint has a bad magic value");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t header_len = r.u64();
  Json header;
  try {
    header = Json::parse(r.chunk(header_len));
  } catch (const nlohmann::json::exception & e) {
    throw IoError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.model = Model::init(arch_from_json(header.at("arch")), 0);
    const Json & tensors = header.at("tensors");
    if (tensors.size() != ckpt.model.params.size()) {
      throw IoError("checkpoint tensor list does not match the architecture");
    }
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const Json & t = tensors[i];
      auto & [name, tensor] = ckpt.model.params[i];
      if (t.at("name").get<std::string>() != name || t.at("rows").get<int>() != tensor.rows ||
          t.at("cols").get<int>() != tensor.cols) {
        throw IoError("checkpoint tensor layout mismatch at " + name);
      }
    }
    ckpt.optim.step = header.at("step").get<std::int64_t>();
    ckpt.epoch = header.at("epoch").get<std::int64_t>();
    ckpt.config_hash = std::stoull(header.at("config_hash").get<std::string>(), nullptr, 16);
    ckpt.best_validation = header.at("best_validation").get<bool>();
    ckpt.validation_loss = header.at("validation_loss").get<double>();
  } catch (const nlohmann::json::exception & e) {
    throw IoError(std::string("checkpoint header is missing fields: ") + e.what());
  }

  for (auto & [name, tensor] : ckpt.model.params) {
    r.doubles(tensor.v, tensor.size());
  }
  r.doubles(ckpt.optim.m, ckpt.model.param_count());
  r.doubles(ckpt.optim.v, ckpt.model.param_count());
  if (!r.done()) {
    throw IoError("checkpoint has trailing bytes");
  }
  return ckpt;
}

void save_checkpoint(const std::string & path, const Checkpoint & ckpt)
{
  write_file(path, checkpoint_to_bytes(ckpt));
}

Checkpoint load_checkpoint(const std::string & path)
{
  return checkpoint_from_bytes(read_file(path));
}

}  // namespace trajlab
