// Copyright 2026 The heatscore Authors
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

#ifndef HEATSCORE_HARNESS_MANIFEST_HPP_
#define HEATSCORE_HARNESS_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace heatscore::harness {

// Hex SHA-1 of "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_hash(const std::string& content);

// Written next to every output set. No timestamps, so reruns are identical.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string config_text;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

std::string manifest_json(const RunManifest& manifest);
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_MANIFEST_HPP_
