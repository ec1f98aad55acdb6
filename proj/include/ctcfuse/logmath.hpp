// logmath.hpp
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
#include <limits>
#include <span>

namespace ctcfuse {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(10): converts log10 LM scores to natural log at the fusion boundary.
inline constexpr double kLn10 = 2.302585092994045684;

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const float> values) {
  double hi = kNegInf;
  for (float v : values)
    if (v > hi) hi = v;
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (float v : values) sum += std::exp(static_cast<double>(v) - hi);
  return hi + std::log(sum);
}

}  // namespace ctcfuse
