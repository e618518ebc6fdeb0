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

#ifndef FEDGRAPH_ERROR_HPP_
#define FEDGRAPH_ERROR_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fedgraph {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied data or parameters was violated.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (non-convergence, singular matrix, divergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

// EM could not keep all mixture components alive.
class DegenerateFitError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A federated round could not proceed (missing or inconsistent uploads).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A failure inside one client's round, tagged with that client.
class ClientError : public Error {
 public:
  ClientError(std::uint32_t client_id, const std::string& what)
      : Error("client " + std::to_string(client_id) + ": " + what), client_id_(client_id) {}
  std::uint32_t client_id() const { return client_id_; }

 private:
  std::uint32_t client_id_;
};

}  // namespace fedgraph

#endif  // FEDGRAPH_ERROR_HPP_
