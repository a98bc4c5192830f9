// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace blowchoc {

// Invalid parameters (filter configuration, hash ranges, ...) throw
// std::invalid_argument. The two types below cover external data.

/// Unreadable or malformed key input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A serialized filter that fails validation (magic, version, size, fields).
class CorruptFilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blowchoc
