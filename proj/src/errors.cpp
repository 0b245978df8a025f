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

#include "qknow/error.hpp"

#include <fmt/format.h>

namespace qknow {

ModelError::ModelError(std::string agent, std::size_t event_index, const std::string &message)
    : Error(fmt::format("agent {} event #{}: {}", agent, event_index + 1, message)),
      agent_(std::move(agent)),
      event_index_(event_index) {}

std::string SourceSpan::str() const {
    return fmt::format("{}:{}:{}", file.empty() ? "<input>" : file, line, column);
}

namespace {

std::string render_parse_error(const SourceSpan &span, const std::string &message,
                               const std::vector<std::string> &expected) {
    std::string text = fmt::format("{}: {}", span.str(), message);
    if (!expected.empty()) {
        text += " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) text += i + 1 == expected.size() ? " or " : ", ";
            text += expected[i];
        }
        text += ")";
    }
    return text;
}

}  // namespace

ParseError::ParseError(SourceSpan span, const std::string &message, std::vector<std::string> expected)
    : Error(render_parse_error(span, message, expected)),
      span_(std::move(span)),
      message_(message),
      expected_(std::move(expected)) {}

}  // namespace qknow
