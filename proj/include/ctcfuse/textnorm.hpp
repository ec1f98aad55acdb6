// textnorm.hpp
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

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ctcfuse {

// A transcript after normalization: ordered lowercase words, free of
// punctuation and whitespace. This is the unit of text every other module
// (LM training, decoding output, WER scoring) operates on.
struct NormalizedTranscript {
  std::vector<std::string> words;

  bool operator==(const NormalizedTranscript &) const = default;
};

// A non-speech marker pattern such as "[...]": an opening delimiter, the
// literal "...", and a closing delimiter. The whole delimited span is
// deleted from the transcript.
struct NonSpeechPattern {
  std::string open;
  std::string close;
};

// Parses e.g. "[...]" into {open="[", close="]"}. Throws InvalidPattern
// unless the pattern contains exactly one "..." with nonempty delimiters.
NonSpeechPattern parse_nonspeech_pattern(const std::string &pattern);

struct NormalizationConfig {
  // Codepoints treated as word separators and stripped from output.
  // Hyphens are included, so hyphenated words split.
  std::unordered_set<uint32_t> punctuation;
  std::vector<NonSpeechPattern> nonspeech_patterns;
  bool lowercase = true;
  // Kept for interface parity: the word-list representation collapses
  // whitespace regardless, so this flag has no observable effect.
  bool collapse_whitespace = true;
  // Literal (pattern, replacement) pairs applied in order before any other
  // normalization step; covers data-specific transcript fixes.
  std::vector<std::pair<std::string, std::string>> replacements;

  // Default configuration: ASCII + common Unicode punctuation and quotation
  // marks, square-bracket non-speech markers, lowercasing enabled.
  static NormalizationConfig defaults();
};

NormalizedTranscript normalize(const std::string &text,
                               const NormalizationConfig &config);

// Words joined by single spaces; normalize(render(t), cfg) == t.
std::string render(const NormalizedTranscript &t);

// Two-column TSV (pattern<TAB>replacement), applied in file order.
std::vector<std::pair<std::string, std::string>> load_replacement_table(
    const std::string &path);

// UTF-8 helpers shared with the decoder's lowercase convention.
std::vector<uint32_t> utf8_decode(const std::string &text);
void utf8_encode(uint32_t cp, std::string &out);
uint32_t lowercase_codepoint(uint32_t cp);

}  // namespace ctcfuse
