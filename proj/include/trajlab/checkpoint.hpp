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

#ifndef TRAJLAB__CHECKPOINT_HPP_
#define TRAJLAB__CHECKPOINT_HPP_

/// \file
/// Versioned binary checkpoint container.
///
/// Layout: the 4-byte magic "TLCK", a little-endian uint32 version, a
/// little-endian uint64 byte length followed by a UTF-8 JSON header
/// (architecture config, tensor names and shapes in order, optimizer
/// metadata), then the raw little-endian float64 payload: all parameter
/// tensors in header order, the optimizer first and second moments, each
/// as one flat vector aligned with the parameters.  Save -> load -> save
/// reproduces the file byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/net.hpp"

namespace trajlab
{

inline constexpr char kCheckpointMagic[4] = {'T', 'L', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct OptimState
{
  std::vector<double> m;  ///< first moments, aligned with Model::flatten()
  std::vector<double> v;  ///< second moments
  std::int64_t step = 0;  ///< optimizer steps taken
};

struct Checkpoint
{
  Model model;
  OptimState optim;
  std::int64_t epoch = 0;          ///< completed epochs
  std::uint64_t config_hash = 0;   ///< hash of the training + architecture config
  bool best_validation = false;    ///< true when selected by lowest validation loss
  double validation_loss = 0.0;
};

std::string checkpoint_to_bytes(const Checkpoint & ckpt);
Checkpoint checkpoint_from_bytes(const std::string & bytes);  // throws IoError

void save_checkpoint(const std::string & path, const Checkpoint & ckpt);
Checkpoint load_checkpoint(const std::string & path);

}  // namespace trajlab

#endif  // TRAJLAB__CHECKPOINT_HPP_
