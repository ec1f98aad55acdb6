// textnorm.cpp
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

#include "ctcfuse/textnorm.hpp"

#include <fstream>

#include "ctcfuse/error.hpp"

namespace ctcfuse {

std::vector<uint32_t> utf8_decode(const std::string &text) {
  std::vector<uint32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    uint32_t cp = 0;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else {
      // Stray continuation byte: keep as replacement character.
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      unsigned char cc = text[i + k];
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_encode(uint32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Covers ASCII, Latin-1 Supplement and Latin Extended-A, which is the full
// uppercase inventory of Czech orthography. Other scripts pass through.
uint32_t lowercase_codepoint(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  if (cp >= 0x0100 && cp <= 0x0137) {
    if (cp == 0x0130) return 'i';  // İ
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;  // Ÿ
  if (cp == 0x0179 || cp == 0x017B || cp == 0x017D) return cp + 1;
  return cp;
}

namespace {

bool is_whitespace(uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0x00A0 || cp == 0x2028 || cp == 0x2029;
}

const uint32_t kDefaultPunctuation[] = {
    '!', '"', '#', '$', '%', '&', '\'', '(', ')', '*', '+', ',', '-', '.',
    '/', ':', ';', '<', '=', '>', '?', '@', '[', '\\', ']', '^', '_', '`',
    '{', '|', '}', '~',
    0x00A1,  // inverted exclamation
    0x00BF,  // inverted question
    0x00AB,  // «
    0x00BB,  // »
    0x00B7,  // middle dot
    0x2010, 0x2011, 0x2012, 0x2013, 0x2014, 0x2015,  // hyphens and dashes
    0x2018, 0x2019, 0x201A, 0x201B,                  // single quotes
    0x201C, 0x201D, 0x201E, 0x201F,                  // double quotes
    0x2026,                                          // ellipsis
    0x2039, 0x203A,                                  // ‹ ›
    0x2022,                                          // bullet
};

}  // namespace

NonSpeechPattern parse_nonspeech_pattern(const std::string &pattern) {
  size_t pos = pattern.find("...");
  if (pos == std::string::npos || pos == 0 ||
      pos + 3 >= pattern.size() ||
      pattern.find("...", pos + 1) != std::string::npos) {
    throw Error(ErrorCode::InvalidPattern,
                "non-speech pattern must be <open>...<close>, got '" +
                    pattern + "'");
  }
  return {pattern.substr(0, pos), pattern.substr(pos + 3)};
}

NormalizationConfig NormalizationConfig::defaults() {
  NormalizationConfig cfg;
  for (uint32_t cp : kDefaultPunctuation) cfg.punctuation.insert(cp);
  cfg.nonspeech_patterns.push_back(parse_nonspeech_pattern("[...]"));
  return cfg;
}

namespace {

void replace_all(std::string &text, const std::string &from,
                 const std::string &to) {
  if (from.empty()) return;
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Deletes every <open>...<close> span, leaving a space so neighbours do not
// fuse. Unclosed markers are left in place; the punctuation pass strips the
// dangling delimiter characters.
void delete_nonspeech(std::string &text, const NonSpeechPattern &p) {
  size_t pos = 0;
  std::string out;
  out.reserve(text.size());
  while (pos < text.size()) {
    size_t open = text.find(p.open, pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    size_t close = text.find(p.close, open + p.open.size());
    if (close == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    out.append(text, pos, open - pos);
    out.push_back(' ');
    pos = close + p.close.size();
  }
  text = std::move(out);
}

}  // namespace

NormalizedTranscript normalize(const std::string &text,
                               const NormalizationConfig &config) {
  std::string work = text;
  for (const auto &[from, to] : config.replacements) replace_all(work, from, to);
  for (const auto &p : config.nonspeech_patterns) delete_nonspeech(work, p);

  std::vector<uint32_t> cps = utf8_decode(work);

  NormalizedTranscript result;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      result.words.push_back(word);
      word.clear();
    }
  };
  for (uint32_t cp : cps) {
    // Punctuation splits words, so hyphenated forms become two words.
    if (is_whitespace(cp) || config.punctuation.count(cp)) {
      flush();
      continue;
    }
    utf8_encode(config.lowercase ? lowercase_codepoint(cp) : cp, word);
  }
  flush();
  return result;
}

std::string render(const NormalizedTranscript &t) {
  std::string out;
  for (size_t i = 0; i < t.words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += t.words[i];
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_replacement_table(
    const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoFailure,
                "cannot open replacement table: " + path);
  }
  std::vector<std::pair<std::string, std::string>> table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidPattern,
                  path + ":" + std::to_string(lineno) +
                      ": expected pattern<TAB>replacement");
    }
    table.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NormalizationViolation: return "NormalizationViolation";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidAlphabet: return "InvalidAlphabet";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidUtterance: return "InvalidUtterance";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::DegenerateCounts: return "DegenerateCounts";
    case ErrorCode::MalformedArpa: return "MalformedArpa";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::EmptyBeam: return "EmptyBeam";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
  }
  return "UnknownError";
}

}  // namespace ctcfuse
