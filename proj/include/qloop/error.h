// Copyright 2026 The qloop Authors
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

#ifndef QLOOP_ERROR_H
#define QLOOP_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace qloop {

enum class ErrorKind {
    SingularFrame,
    InvalidGeometry,
    LengthMismatch,
    DivergentTerm,
    IndexOutOfRange,
    StateSpaceTooLarge,
    Reducible,
    NotReversible,
    ZeroGap,
    NonPowerOfTwo,
    ResolutionTooCoarse,
    UnknownOp,
    UnknownVariant,
    Validation,
    Io,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind), detail_(message) {
    }

    ErrorKind kind() const noexcept {
        return kind_;
    }

    /// Message without the kind prefix.
    const std::string &detail() const noexcept {
        return detail_;
    }

  private:
    ErrorKind kind_;
    std::string detail_;
};

inline std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SingularFrame:
            return "SingularFrame";
        case ErrorKind::InvalidGeometry:
            return "InvalidGeometry";
        case ErrorKind::LengthMismatch:
            return "LengthMismatch";
        case ErrorKind::DivergentTerm:
            return "DivergentTerm";
        case ErrorKind::IndexOutOfRange:
            return "IndexOutOfRange";
        case ErrorKind::StateSpaceTooLarge:
            return "StateSpaceTooLarge";
        case ErrorKind::Reducible:
            return "Reducible";
        case ErrorKind::NotReversible:
            return "NotReversible";
        case ErrorKind::ZeroGap:
            return "ZeroGap";
        case ErrorKind::NonPowerOfTwo:
            return "NonPowerOfTwo";
        case ErrorKind::ResolutionTooCoarse:
            return "ResolutionTooCoarse";
        case ErrorKind::UnknownOp:
            return "UnknownOp";
        case ErrorKind::UnknownVariant:
            return "UnknownVariant";
        case ErrorKind::Validation:
            return "ValidationError";
        case ErrorKind::Io:
            return "IOError";
    }
    return "Error";
}

}  // namespace qloop

#endif  // QLOOP_ERROR_H
