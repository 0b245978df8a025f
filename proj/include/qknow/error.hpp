// Copyright 2026 The qknow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qknow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Misuse of the quantum simulation API (bad dimensions, unknown qubits, ...).
class QuantumError : public Error {
 public:
    using Error::Error;
};

/// A protocol that cannot be executed: unassigned condition variables,
/// operations on qubits the acting agent does not own, mismatched rendezvous.
class ModelError : public Error {
 public:
    ModelError(std::string agent, std::size_t event_index, const std::string &message);

    const std::string &agent() const { return agent_; }
    std::size_t event_index() const { return event_index_; }

 private:
    std::string agent_;
    std::size_t event_index_;
};

/// Location of a token or construct inside a source text. Lines and columns are 1-based.
struct SourceSpan {
    std::string file;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 0;

    std::string str() const;
    bool operator==(const SourceSpan &) const = default;
};

class ParseError : public Error {
 public:
    ParseError(SourceSpan span, const std::string &message, std::vector<std::string> expected = {});

    const SourceSpan &span() const { return span_; }
    const std::string &message() const { return message_; }
    const std::vector<std::string> &expected() const { return expected_; }

 private:
    SourceSpan span_;
    std::string message_;
    std::vector<std::string> expected_;
};

/// A well-formed request that addresses something that does not exist:
/// unknown agent, selector matching no node, input value outside its domain.
class LookupError : public Error {
 public:
    using Error::Error;
};

}  // namespace qknow
