// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace bfia {

/// Invalid user-supplied parameter (CLI exit code 1).
struct param_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numeric breakdown at runtime (CLI exit code 2).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration (|X|^d vectors, mixture means, ML hypotheses) exceeded its cap.
struct search_space_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Blind estimation could not produce usable statistics.
struct estimation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bfia
