// emissions.cpp
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

#include "ctcfuse/emissions.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>

#include "ctcfuse/error.hpp"
#include "ctcfuse/logmath.hpp"

namespace ctcfuse {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'C', 'E', 'M', 'I', 'T', '1'};
constexpr float kNegInfSentinel = -std::numeric_limits<float>::max();
constexpr double kRowTolerance = 1e-4;

void put_u32(std::string &buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string &buf, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(buf, bits);
}

void put_f64(std::string &buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::string &data, const std::string &path)
      : data_(data), path_(path) {}

  void bytes(void *out, size_t n) {
    if (pos_ + n > data_.size()) {
      throw Error(ErrorCode::TruncatedFile,
                  path_ + ": truncated at byte " + std::to_string(pos_));
    }
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }

  uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
  }

  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64() {
    unsigned char b[8];
    bytes(b, 8);
    uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  const std::string &data_;
  const std::string &path_;
  size_t pos_ = 0;
};

}  // namespace

void EmissionMatrix::validate() const {
  if (values.size() != frames * vocab) {
    throw Error(ErrorCode::DimensionMismatch,
                "value count " + std::to_string(values.size()) +
                    " != T*V = " + std::to_string(frames * vocab));
  }
  for (size_t i = 0; i < values.size(); ++i) {
    float v = values[i];
    bool neg_inf = std::isinf(v) && v < 0;
    if (std::isnan(v) || (std::isinf(v) && !neg_inf) || v > 0.0f) {
      throw Error(ErrorCode::NonFiniteValue,
                  "cell " + std::to_string(i) +
                      " is not a log-probability: " + std::to_string(v));
    }
  }
}

bool EmissionMatrix::rows_normalized() const {
  for (size_t t = 0; t < frames; ++t) {
    double lse = log_sum_exp(
        std::span<const float>(values.data() + t * vocab, vocab));
    if (std::abs(lse) > kRowTolerance) return false;
  }
  return true;
}

EmissionMatrix load_emissions(const std::string &path,
                              const Alphabet &alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open emissions: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  Reader r(data, path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw Error(ErrorCode::BadMagic, path + ": missing CTCEMIT1 header");
  }

  EmissionMatrix m;
  m.frames = r.u32();
  m.vocab = r.u32();
  uint8_t flag;
  r.bytes(&flag, 1);
  m.normalized = flag != 0;
  m.frame_duration = r.f64();

  if (m.vocab != static_cast<size_t>(alphabet.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                path + ": V=" + std::to_string(m.vocab) + " but alphabet has " +
                    std::to_string(alphabet.size()) + " tokens");
  }

  m.values.resize(m.frames * m.vocab);
  for (size_t i = 0; i < m.values.size(); ++i) {
    float v = r.f32();
    if (v == kNegInfSentinel) v = -std::numeric_limits<float>::infinity();
    m.values[i] = v;
  }
  if (!r.at_end()) {
    throw Error(ErrorCode::TruncatedFile,
                path + ": trailing bytes after value block");
  }

  m.validate();
  if (m.normalized && !m.rows_normalized()) {
    throw Error(ErrorCode::NormalizationViolation,
                path + ": normalized flag set but rows do not sum to 1");
  }
  return m;
}

void save_emissions(const EmissionMatrix &matrix, const std::string &path) {
  matrix.validate();
  // A lying normalization flag is not an error on write: the flag is
  // cleared so the file on disk is always self-consistent.
  bool normalized = matrix.normalized && matrix.rows_normalized();

  std::string buf;
  buf.reserve(8 + 4 + 4 + 1 + 8 + matrix.values.size() * 4);
  buf.append(kMagic, 8);
  put_u32(buf, static_cast<uint32_t>(matrix.frames));
  put_u32(buf, static_cast<uint32_t>(matrix.vocab));
  buf.push_back(normalized ? 1 : 0);
  put_f64(buf, matrix.frame_duration);
  for (float v : matrix.values) {
    if (std::isinf(v)) v = kNegInfSentinel;
    put_f32(buf, v);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write emissions: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write: " + path);
}

}  // namespace ctcfuse
