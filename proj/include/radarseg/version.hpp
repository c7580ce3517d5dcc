// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace radarseg {

inline constexpr const char* kToolName = "radarseg";
inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever the model/report file layout changes incompatibly.
inline constexpr int kFormatVersion = 1;

}  // namespace radarseg
