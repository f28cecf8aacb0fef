// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The bfa-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfa {

enum class ErrorKind {
    InvalidConfig,
    UnknownConfiguration,
    IndexOutOfRange,
    DomainError,
    ShapeMismatch,
    NotIsometric,
    NotABfaFrame,
    TruncatedFrame,
    Malformed,
    UnsupportedSegmentation,
    InconsistentShape,
    BadMagic,
    WrongLinkType,
    TruncatedRecord,
    IoFailure,
    TableSyntax,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::UnknownConfiguration: return "UnknownConfiguration";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotIsometric: return "NotIsometric";
    case ErrorKind::NotABfaFrame: return "NotABfaFrame";
    case ErrorKind::TruncatedFrame: return "TruncatedFrame";
    case ErrorKind::Malformed: return "Malformed";
    case ErrorKind::UnsupportedSegmentation: return "UnsupportedSegmentation";
    case ErrorKind::InconsistentShape: return "InconsistentShape";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::WrongLinkType: return "WrongLinkType";
    case ErrorKind::TruncatedRecord: return "TruncatedRecord";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::TableSyntax: return "TableSyntax";
    }
    return "Unknown";
}

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; } // what() without the kind prefix

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace bfa
