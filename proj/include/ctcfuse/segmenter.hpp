// segmenter.hpp
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

#include <optional>
#include <string>
#include <vector>

namespace ctcfuse {

// A long recording with candidate cut points. Pauses are midpoints of
// detected silences, supplied by an external VAD/aligner; each lies
// strictly inside (0, duration) and the list is strictly increasing.
struct Utterance {
  std::string id;
  double duration = 0.0;
  std::vector<double> pauses;

  void validate() const;  // throws InvalidUtterance
};

struct Segment {
  std::string utterance_id;
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
};

constexpr double kDefaultMaxSegmentSeconds = 30.0;

// Greedy slicing: from each segment start, cut at the farthest pause within
// max_len (or run to the end if it fits). Cuts are a subset of u.pauses and
// the segments tile [0, duration] exactly. Returns nullopt when some
// pause-free span exceeds max_len; such utterances are discarded, not an
// error. Greedy farthest-reach uses the minimum possible number of cuts.
std::optional<std::vector<Segment>> slice(
    const Utterance &u, double max_len = kDefaultMaxSegmentSeconds);

struct CorpusSliceResult {
  std::vector<Segment> segments;
  std::vector<std::string> discarded_ids;
};

// Per-utterance slice results concatenated in input order; throws
// DuplicateId if two utterances share an id.
CorpusSliceResult slice_corpus(const std::vector<Utterance> &utterances,
                               double max_len = kDefaultMaxSegmentSeconds);

// JSON Lines manifest, one {"id", "duration", "pauses": [...]} per line.
std::vector<Utterance> load_utterance_manifest(const std::string &path);

void save_segment_manifest(const std::vector<Segment> &segments,
                           const std::string &path);
std::vector<Segment> load_segment_manifest(const std::string &path);

void save_discard_report(const std::vector<std::string> &ids,
                         const std::string &path);

}  // namespace ctcfuse
