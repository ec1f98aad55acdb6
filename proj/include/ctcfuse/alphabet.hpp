// alphabet.hpp
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

#include <string>
#include <vector>

namespace ctcfuse {

// The grapheme inventory of the acoustic model. Token order fixes the
// column order of every emission matrix decoded against this alphabet.
// Immutable after construction; safe to share across threads.
class Alphabet {
 public:
  // Validates: tokens distinct, indices in range, blank != delimiter.
  Alphabet(std::vector<std::string> tokens, int blank_index,
           int delimiter_index);

  // JSON object {"tokens": [...], "blank_index": n, "delimiter_index": m}.
  static Alphabet load(const std::string &path);
  void save(const std::string &path) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_index() const { return blank_index_; }
  int delimiter_index() const { return delimiter_index_; }

  // Blank renders as the empty string, the delimiter as a single space.
  const std::string &token(int index) const { return tokens_[index]; }
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  int blank_index_;
  int delimiter_index_;
};

}  // namespace ctcfuse
