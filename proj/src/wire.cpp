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

#include "fedgraph/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include <zlib.h>

#include "fedgraph/error.hpp"

namespace fedgraph {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'P', 'F', 'G'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void count(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
      throw InvalidInputError("field too large for the wire format");
    }
    u32(static_cast<std::uint32_t>(n));
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  void le(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t base) : bytes_(bytes), base_(base) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(le(8)); }
  // A count whose elements take at least `min_element` bytes each.
  std::size_t count(std::size_t min_element, const char* what) {
    const std::size_t at = offset();
    const std::size_t n = u32();
    if (min_element > 0 && n > remaining() / min_element) {
      fail(std::string("count for ") + what + " exceeds the remaining payload", at);
    }
    return n;
  }
  std::size_t offset() const { return base_ + pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw DecodeError(what, at);
  }
  [[noreturn]] void fail(const std::string& what) const { fail(what, offset()); }

 private:
  std::uint64_t le(int width) {
    if (remaining() < static_cast<std::size_t>(width)) fail("payload truncated");
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(b)]) << (8 * b);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Graph: n u32, row_capacity u32, then per row: count u32 and
// (column u32, weight f64) pairs in ascending column order.
void put_graph(Writer& w, const StructuralGraph& g) {
  w.count(static_cast<std::size_t>(g.n));
  w.count(static_cast<std::size_t>(g.row_capacity));
  for (const auto& row : g.rows) {
    w.count(row.size());
    for (const auto& e : row) {
      w.u32(e.col);
      w.f64(e.weight);
    }
  }
}

StructuralGraph get_graph(Reader& r) {
  const std::size_t n = r.count(4, "graph rows");
  const std::size_t cap = r.u32();
  StructuralGraph g(static_cast<Index>(n), static_cast<Index>(cap));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = r.count(12, "graph row entries");
    if (count > cap) r.fail("graph row " + std::to_string(i) + " exceeds its row capacity");
    auto& row = g.rows[i];
    row.reserve(count);
    for (std::size_t h = 0; h < count; ++h) {
      const std::size_t at = r.offset();
      const std::uint32_t col = r.u32();
      const double weight = r.f64();
      if (col >= n) r.fail("graph column out of range", at);
      if (!row.empty() && col <= row.back().col) r.fail("graph columns not ascending", at);
      row.push_back({col, weight});
    }
  }
  return g;
}

// Prototype set: client_id u32, form u8, noised u8, epsilon_spent f64,
// count u32, dim u32, then per prototype: weight f64, mean (dim f64),
// covariance (dim*dim f64 row-major when full, dim f64 diagonal otherwise).
void put_prototypes(Writer& w, const PrototypeSet& p) {
  w.u32(p.client_id);
  w.u8(static_cast<std::uint8_t>(p.form));
  w.u8(p.noised ? 1 : 0);
  w.f64(p.epsilon_spent);
  w.count(p.prototypes.size());
  const Index d = p.dim();
  w.count(static_cast<std::size_t>(d));
  for (const auto& proto : p.prototypes) {
    if (proto.mean.size() != d || proto.covariance.rows() != d || proto.covariance.cols() != d) {
      throw InvalidInputError("prototype set mixes dimensions");
    }
    w.f64(proto.weight);
    for (Index i = 0; i < d; ++i) w.f64(proto.mean(i));
    if (p.form == CovarianceForm::kFull) {
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) w.f64(proto.covariance(i, j));
      }
    } else {
      for (Index i = 0; i < d; ++i) w.f64(proto.covariance(i, i));
    }
  }
}

PrototypeSet get_prototypes(Reader& r) {
  PrototypeSet p;
  p.client_id = r.u32();
  const std::size_t form_at = r.offset();
  const std::uint8_t form = r.u8();
  if (form > 1) r.fail("unknown covariance form", form_at);
  p.form = static_cast<CovarianceForm>(form);
  const std::size_t flag_at = r.offset();
  const std::uint8_t noised = r.u8();
  if (noised > 1) r.fail("noised flag is not boolean", flag_at);
  p.noised = noised == 1;
  p.epsilon_spent = r.f64();
  const std::size_t count = r.count(8, "prototypes");
  const std::size_t dim = r.count(0, "prototype dimension");
  const std::size_t cov_values = p.form == CovarianceForm::kFull ? dim * dim : dim;
  const std::size_t per = 8 * (1 + dim + cov_values);
  if (dim > (1u << 16) || (count > 0 && per > r.remaining() / count)) {
    r.fail("prototype block exceeds the remaining payload");
  }
  const Index d = static_cast<Index>(dim);
  for (std::size_t k = 0; k < count; ++k) {
    Prototype proto;
    proto.weight = r.f64();
    proto.mean.resize(d);
    for (Index i = 0; i < d; ++i) proto.mean(i) = r.f64();
    proto.covariance = Matrix::Zero(d, d);
    if (p.form == CovarianceForm::kFull) {
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) proto.covariance(i, j) = r.f64();
      }
    } else {
      for (Index i = 0; i < d; ++i) proto.covariance(i, i) = r.f64();
    }
    p.prototypes.push_back(std::move(proto));
  }
  return p;
}

void put_labels(Writer& w, const std::vector<int>& labels) {
  w.count(labels.size());
  for (int v : labels) w.i32(v);
}

std::vector<int> get_labels(Reader& r, const char* what) {
  const std::size_t n = r.count(4, what);
  std::vector<int> out(n);
  for (auto& v : out) v = r.i32();
  return out;
}

std::vector<std::uint8_t> frame(MessageType type, std::vector<std::uint8_t> payload) {
  Writer w;
  for (auto b : kMagic) w.u8(b);
  w.u16(kWireVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.count(payload.size());
  auto& out = w.bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = crc32_of(out);
  w.u32(crc);
  return std::move(out);
}

struct Framed {
  MessageType type;
  std::uint16_t version;
  std::span<const std::uint8_t> payload;
};

Framed unframe(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kWireHeaderSize + 4) {
    throw DecodeError("message shorter than header and checksum", bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DecodeError("bad magic", 0);
  Reader head(bytes.subspan(4, kWireHeaderSize - 4), 4);
  const std::uint16_t version = head.u16();
  if (version != kWireVersion) {
    throw DecodeError("unknown schema version " + std::to_string(version), 4);
  }
  const std::uint8_t type = head.u8();
  if (type < 1 || type > 3) throw DecodeError("unknown message type " + std::to_string(type), 6);
  const std::uint32_t length = head.u32();
  if (bytes.size() - kWireHeaderSize - 4 != length) {
    throw DecodeError("payload length " + std::to_string(length) + " does not match message size",
                      7);
  }
  const std::size_t trailer = kWireHeaderSize + length;
  Reader tail(bytes.subspan(trailer, 4), trailer);
  const std::uint32_t crc = tail.u32();
  if (crc != crc32_of(bytes.first(trailer))) throw DecodeError("checksum mismatch", trailer);
  return {static_cast<MessageType>(type), version, bytes.subspan(kWireHeaderSize, length)};
}

void expect_consumed(const Reader& r) {
  if (r.remaining() != 0) r.fail("trailing bytes after payload");
}

UploadMessage read_upload(const Framed& f) {
  Reader r(f.payload, kWireHeaderSize);
  UploadMessage m;
  m.schema_version = f.version;
  m.client_id = r.u32();
  m.round = r.u32();
  m.graph = get_graph(r);
  m.prototypes = get_prototypes(r);
  m.local_labels = get_labels(r, "local labels");
  expect_consumed(r);
  return m;
}

GlobalFeedback read_feedback(const Framed& f) {
  Reader r(f.payload, kWireHeaderSize);
  GlobalFeedback m;
  m.schema_version = f.version;
  m.client_id = r.u32();
  m.round = r.u32();
  m.assignments = get_labels(r, "assignments");
  m.num_clusters = r.i32();
  m.global_prototypes = get_prototypes(r);
  expect_consumed(r);
  return m;
}

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths.
  std::size_t done = 0;
  while (done < bytes.size()) {
    const std::size_t chunk =
        std::min<std::size_t>(bytes.size() - done, std::numeric_limits<uInt>::max());
    crc = crc32(crc, bytes.data() + done, static_cast<uInt>(chunk));
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// Upload payload: client_id u32, round u32, graph, prototype set,
// local labels (count u32, i32 each).
std::vector<std::uint8_t> encode_message(const UploadMessage& msg) {
  if (msg.schema_version != kWireVersion) {
    throw InvalidInputError("cannot encode schema version " + std::to_string(msg.schema_version));
  }
  Writer w;
  w.u32(msg.client_id);
  w.u32(msg.round);
  put_graph(w, msg.graph);
  put_prototypes(w, msg.prototypes);
  put_labels(w, msg.local_labels);
  return frame(MessageType::kUpload, std::move(w.bytes()));
}

// Feedback payload: client_id u32, round u32, assignments, cluster count
// i32, global prototype set.
std::vector<std::uint8_t> encode_message(const GlobalFeedback& msg) {
  if (msg.schema_version != kWireVersion) {
    throw InvalidInputError("cannot encode schema version " + std::to_string(msg.schema_version));
  }
  Writer w;
  w.u32(msg.client_id);
  w.u32(msg.round);
  put_labels(w, msg.assignments);
  w.i32(msg.num_clusters);
  put_prototypes(w, msg.global_prototypes);
  return frame(MessageType::kFeedback, std::move(w.bytes()));
}

// Global result payload: round u32, assignments, cluster count i32,
// provenance (count u32, client u32 and local index u32 each), similarity
// graph, embedding (rows u32, cols u32, row-major f64), global prototypes,
// reported eigenvalues (count u32, f64 each), zero count i32, lambda f64,
// iterations i32, components i32, converged u8.
std::vector<std::uint8_t> encode_global_result(const GlobalResult& result,
                                               std::uint32_t round) {
  Writer w;
  w.u32(round);
  put_labels(w, result.assignments.labels);
  w.i32(result.assignments.num_clusters);
  w.count(result.assignments.provenance.size());
  for (const auto& p : result.assignments.provenance) {
    w.u32(p.client_id);
    w.u32(p.local_index);
  }
  put_graph(w, result.similarity);
  const Matrix& f = result.embedding.matrix;
  w.count(static_cast<std::size_t>(f.rows()));
  w.count(static_cast<std::size_t>(f.cols()));
  for (Index i = 0; i < f.rows(); ++i) {
    for (Index j = 0; j < f.cols(); ++j) w.f64(f(i, j));
  }
  put_prototypes(w, result.global_prototypes);
  const auto& diag = result.diagnostics;
  w.count(diag.eigenvalues.size());
  for (double v : diag.eigenvalues) w.f64(v);
  w.i32(diag.zero_count);
  w.f64(diag.lambda);
  w.i32(diag.iterations);
  w.i32(diag.components);
  w.u8(diag.converged ? 1 : 0);
  return frame(MessageType::kGlobalResult, std::move(w.bytes()));
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  const Framed f = unframe(bytes);
  switch (f.type) {
    case MessageType::kUpload:
      return read_upload(f);
    case MessageType::kFeedback:
      return read_feedback(f);
    case MessageType::kGlobalResult:
      break;
  }
  throw DecodeError("global results are not decoded as protocol messages", 6);
}

UploadMessage decode_upload(std::span<const std::uint8_t> bytes) {
  const Framed f = unframe(bytes);
  if (f.type != MessageType::kUpload) throw DecodeError("expected an upload message", 6);
  return read_upload(f);
}

GlobalFeedback decode_feedback(std::span<const std::uint8_t> bytes) {
  const Framed f = unframe(bytes);
  if (f.type != MessageType::kFeedback) throw DecodeError("expected a feedback message", 6);
  return read_feedback(f);
}

MessageSizeReport message_size_report(const UploadMessage& msg, int neighbors) {
  MessageSizeReport r;
  r.graph_nonzeros = msg.graph.nonzeros();
  const std::size_t d = static_cast<std::size_t>(msg.prototypes.dim());
  const std::size_t c = msg.prototypes.prototypes.size();
  const std::size_t cov = msg.prototypes.form == CovarianceForm::kFull ? d * d : d;
  r.prototype_values = c * (d + cov);
  r.nonzeros = r.graph_nonzeros + r.prototype_values;
  r.label_count = msg.local_labels.size();
  r.bytes = encode_message(msg).size();
  r.bound = static_cast<std::size_t>(msg.graph.n) * static_cast<std::size_t>(neighbors) +
            c * (d + d * d);
  r.within_bound = r.nonzeros <= r.bound;
  return r;
}

}  // namespace fedgraph
