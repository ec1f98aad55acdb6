// segmenter.cpp
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

#include "ctcfuse/segmenter.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ctcfuse/error.hpp"

namespace ctcfuse {

void Utterance::validate() const {
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::InvalidUtterance,
                id + ": duration must be positive");
  }
  double prev = 0.0;
  for (double p : pauses) {
    if (!(p > prev) || !(p < duration)) {
      throw Error(ErrorCode::InvalidUtterance,
                  id + ": pauses must be strictly increasing inside (0, duration)");
    }
    prev = p;
  }
}

std::optional<std::vector<Segment>> slice(const Utterance &u, double max_len) {
  u.validate();
  if (!(max_len > 0.0)) {
    throw Error(ErrorCode::InvalidUtterance, "max_len must be positive");
  }

  std::vector<Segment> segments;
  double start = 0.0;
  size_t next_pause = 0;
  while (u.duration - start > max_len) {
    // Farthest admissible pause after the current start.
    double cut = -1.0;
    for (size_t i = next_pause; i < u.pauses.size(); ++i) {
      double p = u.pauses[i];
      if (p <= start) continue;
      if (p - start > max_len) break;
      cut = p;
      next_pause = i + 1;
    }
    if (cut < 0.0) return std::nullopt;  // pause-free span exceeds max_len
    segments.push_back({u.id, start, cut});
    start = cut;
  }
  segments.push_back({u.id, start, u.duration});
  return segments;
}

CorpusSliceResult slice_corpus(const std::vector<Utterance> &utterances,
                               double max_len) {
  std::unordered_set<std::string> ids;
  for (const auto &u : utterances) {
    if (!ids.insert(u.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate utterance id: " + u.id);
    }
  }
  CorpusSliceResult result;
  for (const auto &u : utterances) {
    auto segs = slice(u, max_len);
    if (!segs) {
      result.discarded_ids.push_back(u.id);
    } else {
      result.segments.insert(result.segments.end(), segs->begin(), segs->end());
    }
  }
  return result;
}

std::vector<Utterance> load_utterance_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open manifest: " + path);
  std::vector<Utterance> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Utterance u;
      u.id = j.at("id").get<std::string>();
      u.duration = j.at("duration").get<double>();
      if (j.contains("pauses")) {
        u.pauses = j.at("pauses").get<std::vector<double>>();
      }
      u.validate();
      out.push_back(std::move(u));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::InvalidUtterance,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(e.code(),
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_segment_manifest(const std::vector<Segment> &segments,
                           const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write manifest: " + path);
  for (const auto &s : segments) {
    nlohmann::json j;
    j["id"] = s.utterance_id;
    j["start"] = s.start;
    j["end"] = s.end;
    out << j.dump() << "\n";
  }
}

std::vector<Segment> load_segment_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open manifest: " + path);
  std::vector<Segment> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      Segment s;
      s.utterance_id = j.at("id").get<std::string>();
      s.start = j.at("start").get<double>();
      s.end = j.at("end").get<double>();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::InvalidUtterance,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_discard_report(const std::vector<std::string> &ids,
                         const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write report: " + path);
  for (const auto &id : ids) {
    nlohmann::json j;
    j["id"] = id;
    out << j.dump() << "\n";
  }
}

}  // namespace ctcfuse
