// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace floratag {

// Bad input data: malformed files, mismatched shapes, invalid values.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition or supplied unusable
// configuration (maps to CLI exit code 2).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace floratag
