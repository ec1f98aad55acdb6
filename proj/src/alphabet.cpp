// alphabet.cpp
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

#include "ctcfuse/alphabet.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ctcfuse/error.hpp"

namespace ctcfuse {

Alphabet::Alphabet(std::vector<std::string> tokens, int blank_index,
                   int delimiter_index)
    : tokens_(std::move(tokens)),
      blank_index_(blank_index),
      delimiter_index_(delimiter_index) {
  int n = static_cast<int>(tokens_.size());
  if (blank_index_ < 0 || blank_index_ >= n || delimiter_index_ < 0 ||
      delimiter_index_ >= n) {
    throw Error(ErrorCode::InvalidAlphabet,
                "blank_index/delimiter_index out of range");
  }
  if (blank_index_ == delimiter_index_) {
    throw Error(ErrorCode::InvalidAlphabet,
                "blank_index must differ from delimiter_index");
  }
  std::unordered_set<std::string> seen;
  for (const auto &t : tokens_) {
    if (!seen.insert(t).second) {
      throw Error(ErrorCode::InvalidAlphabet, "duplicate token '" + t + "'");
    }
  }
}

Alphabet Alphabet::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open alphabet: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::InvalidAlphabet,
                path + ": invalid JSON: " + e.what());
  }
  try {
    std::vector<std::string> tokens = j.at("tokens").get<std::vector<std::string>>();
    int blank = j.at("blank_index").get<int>();
    int delim = j.at("delimiter_index").get<int>();
    return Alphabet(std::move(tokens), blank, delim);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::InvalidAlphabet,
                path + ": bad alphabet object: " + e.what());
  }
}

void Alphabet::save(const std::string &path) const {
  nlohmann::json j;
  j["tokens"] = tokens_;
  j["blank_index"] = blank_index_;
  j["delimiter_index"] = delimiter_index_;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write alphabet: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ctcfuse
