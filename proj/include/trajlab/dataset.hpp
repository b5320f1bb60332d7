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
//
// Line-delimited dataset container, format tag "trajlab-sample-v1".
// First line is a header object, then one JSON object per sample.

#ifndef TRAJLAB__DATASET_HPP_
#define TRAJLAB__DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/scene.hpp"

namespace trajlab
{

inline constexpr const char * kDatasetFormatTag = "trajlab-sample-v1";

struct Dataset
{
  int horizon_steps{12};
  double frequency_hz{2.0};
  std::vector<Sample> samples;
};

/// Serializes a dataset. Output is byte-deterministic for a given dataset.
std::string dataset_to_string(const Dataset & ds);
void write_dataset(const std::string & path, const Dataset & ds);

Dataset dataset_from_string(const std::string & text);
Dataset read_dataset(const std::string & path);

/// FNV-1a hash of a file's bytes as a 16-digit hex string.
std::string file_hash_hex(const std::string & path);

/// Reads a whole file. Throws IoError if it cannot be opened.
std::string read_file(const std::string & path);
void write_file(const std::string & path, const std::string & content);

}  // namespace trajlab

#endif  // TRAJLAB__DATASET_HPP_
