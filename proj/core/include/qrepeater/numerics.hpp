// Copyright 2026 The qrepeater Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

// Powers of complements of small probabilities, evaluated in log space so that
// p << 1 and large exponents keep full relative precision.

namespace qrep::numerics {

/// (1 - x)^k for x in [0, 1], k >= 0.
inline double complement_pow(double x, double k) {
  if (k == 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return std::exp(k * std::log1p(-x));
}

/// 1 - (1 - x)^k for x in [0, 1], k >= 0.
inline double one_minus_complement_pow(double x, double k) {
  if (k == 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return -std::expm1(k * std::log1p(-x));
}

}  // namespace qrep::numerics
