// Copyright 2026 The FedGraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDGRAPH_WIRE_HPP_
#define FEDGRAPH_WIRE_HPP_

// Binary message format shared by clients and the server.
//
//   offset  size  field
//   0       4     magic "SPFG"
//   4       2     schema version (little-endian u16)
//   6       1     message type (1 upload, 2 feedback, 3 global result)
//   7       4     payload length in bytes (u32)
//   11      len   payload
//   11+len  4     CRC-32 (zlib polynomial) over bytes [0, 11+len)
//
// Integers are little-endian, reals are IEEE-754 binary64. Payload layouts
// are documented next to each encoder in wire.cpp.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fedgraph/aggregation.hpp"
#include "fedgraph/prototypes.hpp"
#include "fedgraph/types.hpp"

namespace fedgraph {

inline constexpr std::uint16_t kWireVersion = 1;
inline constexpr std::size_t kWireHeaderSize = 11;

enum class MessageType : std::uint8_t { kUpload = 1, kFeedback = 2, kGlobalResult = 3 };

struct UploadMessage {
  std::uint16_t schema_version = kWireVersion;
  std::uint32_t client_id = 0;
  std::uint32_t round = 0;
  StructuralGraph graph;
  PrototypeSet prototypes;
  // Cluster index of every local sample; the server needs it to expand
  // prototype affinities to sample pairs.
  std::vector<int> local_labels;

  friend bool operator==(const UploadMessage&, const UploadMessage&) = default;
};

struct GlobalFeedback {
  std::uint16_t schema_version = kWireVersion;
  std::uint32_t client_id = 0;
  std::uint32_t round = 0;
  std::vector<int> assignments;  // this client's samples, local order
  int num_clusters = 0;
  PrototypeSet global_prototypes;

  friend bool operator==(const GlobalFeedback&, const GlobalFeedback&) = default;
};

using Message = std::variant<UploadMessage, GlobalFeedback>;

std::vector<std::uint8_t> encode_message(const UploadMessage& msg);
std::vector<std::uint8_t> encode_message(const GlobalFeedback& msg);
// Round results are encoded for archival and determinism checks.
std::vector<std::uint8_t> encode_global_result(const GlobalResult& result,
                                               std::uint32_t round);

// Throws DecodeError carrying the byte offset of the first bad field.
Message decode_message(std::span<const std::uint8_t> bytes);
UploadMessage decode_upload(std::span<const std::uint8_t> bytes);
GlobalFeedback decode_feedback(std::span<const std::uint8_t> bytes);

struct MessageSizeReport {
  std::size_t graph_nonzeros = 0;
  std::size_t prototype_values = 0;
  std::size_t nonzeros = 0;  // graph_nonzeros + prototype_values
  std::size_t label_count = 0;
  std::size_t bytes = 0;
  std::size_t bound = 0;  // N * k_n + C * (d + d^2)
  bool within_bound = false;
};

// `neighbors` is the k_n the client used.
MessageSizeReport message_size_report(const UploadMessage& msg, int neighbors);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace fedgraph

#endif  // FEDGRAPH_WIRE_HPP_
