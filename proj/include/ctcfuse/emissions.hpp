// emissions.hpp
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

#include <cstddef>
#include <string>
#include <vector>

#include "ctcfuse/alphabet.hpp"

namespace ctcfuse {

// T x V frame-level natural-log probabilities, the decoder's sole acoustic
// input. Values are <= 0, finite or -inf. Immutable once built.
//
// On-disk format (little-endian):
//   magic "CTCEMIT1" | u32 T | u32 V | u8 normalized | f64 frame_duration
//   | T*V f32 values, row-major (frame-major)
// -inf cells are stored as the most-negative finite f32; that bit pattern
// is reserved and always reads back as -inf.
struct EmissionMatrix {
  size_t frames = 0;
  size_t vocab = 0;
  std::vector<float> values;  // frames * vocab, row-major
  double frame_duration = 0.0;
  // When set, log-sum-exp of every row is 0 within 1e-4.
  bool normalized = false;

  float at(size_t frame, size_t col) const { return values[frame * vocab + col]; }

  // Throws NonFiniteValue / DimensionMismatch on invariant violations.
  void validate() const;

  // True iff every row satisfies the normalization tolerance.
  bool rows_normalized() const;
};

// Validates the file against the alphabet; errors: BadMagic,
// DimensionMismatch, NonFiniteValue, TruncatedFile, NormalizationViolation.
EmissionMatrix load_emissions(const std::string &path, const Alphabet &alphabet);

// Writes the matrix; the normalized flag is cleared on the way out if the
// rows do not actually satisfy it. load(save(m)) is bit-exact for valid m.
void save_emissions(const EmissionMatrix &matrix, const std::string &path);

}  // namespace ctcfuse
