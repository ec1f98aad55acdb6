// ngram.cpp
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

#include "ctcfuse/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "ctcfuse/error.hpp"

namespace ctcfuse {

Vocab::Vocab() {
  intern(kUnkToken);
  intern(kBosToken);
  intern(kEosToken);
}

uint32_t Vocab::intern(const std::string &token) {
  auto it = token_to_id_.find(token);
  if (it != token_to_id_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(id_to_token_.size());
  id_to_token_.push_back(token);
  token_to_id_.emplace(token, id);
  return id;
}

std::optional<uint32_t> Vocab::find(const std::string &token) const {
  auto it = token_to_id_.find(token);
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

NGramKey NGramKey::of(std::span<const uint32_t> ids) {
  NGramKey k;
  k.len = static_cast<uint8_t>(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) k.words[i] = ids[i];
  return k;
}

NGramKey NGramKey::context() const {
  NGramKey k = *this;
  if (k.len > 0) {
    --k.len;
    k.words[k.len] = 0;
  }
  return k;
}

NGramKey NGramKey::suffix() const {
  NGramKey k;
  if (len > 0) {
    k.len = static_cast<uint8_t>(len - 1);
    for (uint8_t i = 0; i + 1 < len; ++i) k.words[i] = words[i + 1];
  }
  return k;
}

NGramKey NGramKey::extended(uint32_t word) const {
  NGramKey k = *this;
  k.words[k.len] = word;
  ++k.len;
  return k;
}

bool NGramKey::operator<(const NGramKey &o) const {
  uint8_t n = std::min(len, o.len);
  for (uint8_t i = 0; i < n; ++i) {
    if (words[i] != o.words[i]) return words[i] < o.words[i];
  }
  return len < o.len;
}

uint64_t NGramCounts::count(const NGramKey &key) const {
  if (key.len == 0 || key.len > tables.size()) return 0;
  auto it = tables[key.len - 1].find(key);
  return it == tables[key.len - 1].end() ? 0 : it->second;
}

NGramCounter::NGramCounter(int order) {
  if (order < 1 || order > kOrderCap) {
    throw Error(ErrorCode::OrderOutOfRange,
                "order must be in [1, " + std::to_string(kOrderCap) +
                    "], got " + std::to_string(order));
  }
  counts_.order = order;
  counts_.tables.resize(order);
}

void NGramCounter::add(const NormalizedTranscript &sentence) {
  std::vector<uint32_t> ids;
  ids.reserve(sentence.words.size() + 2);
  ids.push_back(Vocab::kBosId);
  for (const auto &w : sentence.words) ids.push_back(counts_.vocab.intern(w));
  ids.push_back(Vocab::kEosId);

  for (int n = 1; n <= counts_.order; ++n) {
    if (ids.size() < static_cast<size_t>(n)) break;
    for (size_t i = 0; i + n <= ids.size(); ++i) {
      NGramKey k = NGramKey::of(std::span<const uint32_t>(ids).subspan(i, n));
      ++counts_.tables[n - 1][k];
    }
  }
}

NGramCounts count_ngrams(const std::vector<NormalizedTranscript> &corpus,
                         int order) {
  NGramCounter counter(order);
  for (const auto &s : corpus) counter.add(s);
  return counter.take();
}

NGramCounts prune(const NGramCounts &counts, const PruneThresholds &t) {
  NGramCounts out;
  out.order = counts.order;
  out.vocab = counts.vocab;
  out.tables.resize(counts.tables.size());
  out.pruned_unigram_mass = counts.pruned_unigram_mass;

  std::unordered_set<uint32_t> dropped_words;
  if (!counts.tables.empty()) {
    for (const auto &[k, c] : counts.tables[0]) {
      // <unk>, <s>, </s> are structural and never pruned.
      bool structural = k.words[0] <= Vocab::kEosId;
      if (!structural && c < t.unigram_min) {
        dropped_words.insert(k.words[0]);
        out.pruned_unigram_mass += c;
      } else {
        out.tables[0].emplace(k, c);
      }
    }
  }

  std::unordered_set<NGramKey, NGramKeyHash> dropped_prev;
  for (int n = 2; n <= counts.order; ++n) {
    std::unordered_set<NGramKey, NGramKeyHash> dropped_here;
    for (const auto &[k, c] : counts.tables[n - 1]) {
      bool drop = c < t.higher_order_min;
      if (!drop && !dropped_words.empty()) {
        for (uint8_t i = 0; i < k.len; ++i) {
          if (dropped_words.count(k.words[i])) {
            drop = true;
            break;
          }
        }
      }
      // Extensions of dropped prefixes go too, keeping the tables
      // prefix-closed for ARPA validity.
      if (!drop && n >= 3 && dropped_prev.count(k.context())) drop = true;
      if (drop) {
        dropped_here.insert(k);
      } else {
        out.tables[n - 1].emplace(k, c);
      }
    }
    dropped_prev = std::move(dropped_here);
  }
  return out;
}

namespace {

struct Discounts {
  double d1 = 0.75, d2 = 0.75, d3 = 0.75;
  double of(uint64_t adjusted) const {
    return adjusted == 1 ? d1 : adjusted == 2 ? d2 : d3;
  }
};

// Modified Kneser-Ney discounts from count-of-count statistics; falls back
// to absolute discounting when the statistics are degenerate (toy corpora).
Discounts discounts_for(const NGramTable<uint64_t> &adjusted) {
  uint64_t n[5] = {0, 0, 0, 0, 0};
  for (const auto &[k, a] : adjusted) {
    if (a >= 1 && a <= 4) ++n[a];
  }
  if (n[1] > 0 && n[2] > 0 && n[3] > 0 && n[4] > 0) {
    double y = static_cast<double>(n[1]) / (n[1] + 2.0 * n[2]);
    Discounts d;
    d.d1 = 1.0 - 2.0 * y * n[2] / n[1];
    d.d2 = 2.0 - 3.0 * y * n[3] / n[2];
    d.d3 = 3.0 - 4.0 * y * n[4] / n[3];
    if (d.d1 > 0.0 && d.d2 > 0.0 && d.d3 > 0.0) return d;
  }
  return Discounts{};
}

struct BuildEntry {
  double prob = 0.0;
  double bow = 1.0;
};

// Backoff probability query against the partially built model, in the
// linear domain. Every queried word has a unigram entry by construction.
double linear_prob(const std::vector<NGramTable<BuildEntry>> &build,
                   const NGramKey &key) {
  auto it = build[key.len - 1].find(key);
  if (it != build[key.len - 1].end()) return it->second.prob;
  double bow = 1.0;
  NGramKey ctx = key.context();
  auto cit = build[ctx.len - 1].find(ctx);
  if (cit != build[ctx.len - 1].end()) bow = cit->second.bow;
  return bow * linear_prob(build, key.suffix());
}

}  // namespace

NGramModel estimate(const NGramCounts &counts, double unk_floor) {
  int eff = 0;
  for (int n = 1; n <= counts.order; ++n) {
    if (static_cast<size_t>(n) <= counts.tables.size() &&
        !counts.tables[n - 1].empty()) {
      eff = n;
    } else {
      break;
    }
  }
  if (eff == 0) {
    throw Error(ErrorCode::DegenerateCounts,
                "no n-grams survive; cannot estimate a model");
  }

  NGramModel model;
  model.order = eff;
  model.vocab = counts.vocab;
  model.tables.resize(eff);
  if (eff < counts.order) {
    model.warnings.push_back(
        "model order reduced to " + std::to_string(eff) + ": no surviving " +
        std::to_string(eff + 1) + "-grams");
  }

  // Adjusted counts: raw at the highest order; continuation counts (number
  // of distinct left-extension types) below, with raw fallback for n-grams
  // that are never preceded (sentence-initial or pruning removed all their
  // left extensions).
  std::vector<NGramTable<uint64_t>> adjusted(eff);
  adjusted[eff - 1] = counts.tables[eff - 1];
  for (int n = eff - 1; n >= 1; --n) {
    NGramTable<uint64_t> continuation;
    for (const auto &[k, c] : counts.tables[n]) ++continuation[k.suffix()];
    for (const auto &[k, c] : counts.tables[n - 1]) {
      auto it = continuation.find(k);
      adjusted[n - 1].emplace(k, it != continuation.end() ? it->second : c);
    }
  }
  // <s> is never predicted; its unigram mass is zero.
  {
    NGramKey bos = NGramKey::of(std::array<uint32_t, 1>{Vocab::kBosId});
    auto it = adjusted[0].find(bos);
    if (it != adjusted[0].end()) it->second = 0;
  }

  std::vector<Discounts> disc(eff);
  for (int n = 1; n <= eff; ++n) disc[n - 1] = discounts_for(adjusted[n - 1]);

  std::vector<NGramTable<BuildEntry>> build(eff);

  // Unigram level: interpolate with the uniform distribution over the
  // vocabulary so the distribution sums to exactly 1.
  {
    const auto &adj = adjusted[0];
    const Discounts &d = disc[0];
    uint64_t total = 0;
    double discounted = 0.0;
    for (const auto &[k, a] : adj) {
      total += a;
      if (a >= 1) discounted += d.of(a);
    }
    double gamma = total > 0 ? discounted / total : 1.0;
    double uniform = 1.0 / static_cast<double>(adj.size());
    for (const auto &[k, a] : adj) {
      double p = gamma * uniform;
      if (a >= 1) p += (static_cast<double>(a) - d.of(a)) / total;
      build[0].emplace(k, BuildEntry{p, 1.0});
    }
  }

  // <unk>: when unseen, layered on top with probability from the raw mass
  // of pruned-away unigrams (empirical frequency), or a small floor when
  // nothing was pruned; the seen distribution is scaled to keep the total
  // at 1.
  NGramKey unk = NGramKey::of(std::array<uint32_t, 1>{Vocab::kUnkId});
  if (!build[0].count(unk)) {
    double p_unk = unk_floor;
    if (counts.pruned_unigram_mass > 0) {
      uint64_t raw_total = counts.pruned_unigram_mass;
      for (const auto &[k, c] : counts.tables[0]) raw_total += c;
      p_unk = static_cast<double>(counts.pruned_unigram_mass) / raw_total;
    }
    for (auto &[k, e] : build[0]) e.prob *= (1.0 - p_unk);
    build[0].emplace(unk, BuildEntry{p_unk, 1.0});
  }

  // Higher orders: interpolated probabilities; the interpolation weight of
  // each context becomes its backoff weight one order down.
  for (int n = 2; n <= eff; ++n) {
    const auto &adj = adjusted[n - 1];
    const Discounts &d = disc[n - 1];

    struct ContextStats {
      uint64_t denom = 0;
      double discounted = 0.0;
    };
    NGramTable<ContextStats> ctx_stats;
    for (const auto &[k, a] : adj) {
      auto &s = ctx_stats[k.context()];
      s.denom += a;
      s.discounted += d.of(a);
    }
    for (auto &[ctx, s] : ctx_stats) {
      double gamma = s.discounted / static_cast<double>(s.denom);
      auto it = build[n - 2].find(ctx);
      // Prefix closure guarantees the context entry exists.
      it->second.bow = gamma;
    }
    for (const auto &[k, a] : adj) {
      const auto &s = ctx_stats[k.context()];
      double gamma = s.discounted / static_cast<double>(s.denom);
      double p = (static_cast<double>(a) - d.of(a)) / s.denom +
                 gamma * linear_prob(build, k.suffix());
      build[n - 1].emplace(k, BuildEntry{p, 1.0});
    }
  }

  for (int n = 1; n <= eff; ++n) {
    model.tables[n - 1].reserve(build[n - 1].size());
    for (const auto &[k, e] : build[n - 1]) {
      model.tables[n - 1].emplace(
          k, NGramEntry{std::log10(e.prob),
                        e.bow == 1.0 ? 0.0 : std::log10(e.bow)});
    }
  }
  return model;
}

const NGramEntry *NGramModel::find(const NGramKey &key) const {
  if (key.len == 0 || key.len > tables.size()) return nullptr;
  auto it = tables[key.len - 1].find(key);
  return it == tables[key.len - 1].end() ? nullptr : &it->second;
}

uint32_t NGramModel::map_token(const std::string &token) const {
  auto id = vocab.find(token);
  if (!id) return Vocab::kUnkId;
  NGramKey k = NGramKey::of(std::array<uint32_t, 1>{*id});
  return find(k) ? *id : Vocab::kUnkId;
}

double NGramModel::score_ids(std::span<const uint32_t> context,
                             uint32_t word) const {
  size_t max_ctx = static_cast<size_t>(order - 1);
  if (context.size() > max_ctx)
    context = context.subspan(context.size() - max_ctx);

  // OOV ids (no unigram entry) collapse to <unk>.
  NGramKey unigram = NGramKey::of(std::array<uint32_t, 1>{word});
  if (!find(unigram)) word = Vocab::kUnkId;
  std::array<uint32_t, kMaxSupportedOrder> ctx;
  size_t ctx_len = context.size();
  for (size_t i = 0; i < ctx_len; ++i) {
    uint32_t c = context[i];
    ctx[i] = find(NGramKey::of(std::array<uint32_t, 1>{c})) ? c : Vocab::kUnkId;
  }

  double backoff_sum = 0.0;
  size_t start = 0;
  while (true) {
    std::span<const uint32_t> cspan(ctx.data() + start, ctx_len - start);
    NGramKey q = NGramKey::of(cspan).extended(word);
    if (const NGramEntry *e = find(q)) return backoff_sum + e->log10_prob;
    // Not found at this length: back off. The unigram base case always
    // resolves because <unk> is guaranteed present.
    if (const NGramEntry *c = find(NGramKey::of(cspan)))
      backoff_sum += c->log10_backoff;
    ++start;
  }
}

double NGramModel::score_word(std::span<const std::string> context,
                              const std::string &word) const {
  std::vector<uint32_t> ctx;
  ctx.reserve(context.size());
  for (const auto &c : context) ctx.push_back(map_token(c));
  return score_ids(ctx, map_token(word));
}

double NGramModel::sentence_logprob(const NormalizedTranscript &t) const {
  std::vector<uint32_t> ctx{Vocab::kBosId};
  double total = 0.0;
  for (const auto &w : t.words) {
    uint32_t id = map_token(w);
    total += score_ids(ctx, id);
    ctx.push_back(id);
  }
  total += score_ids(ctx, Vocab::kEosId);
  return total;
}

double conditional_mass(const NGramModel &model,
                        std::span<const std::string> context) {
  std::vector<uint32_t> ctx;
  ctx.reserve(context.size());
  for (const auto &c : context) ctx.push_back(model.map_token(c));
  double mass = 0.0;
  for (const auto &[k, e] : model.tables[0]) {
    mass += std::pow(10.0, model.score_ids(ctx, k.words[0]));
  }
  return mass;
}

namespace {

std::string format_log10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_arpa(const NGramModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write ARPA: " + path);

  out << "\\data\\\n";
  for (int n = 1; n <= model.order; ++n) {
    out << "ngram " << n << "=" << model.tables[n - 1].size() << "\n";
  }
  for (int n = 1; n <= model.order; ++n) {
    std::vector<NGramKey> keys;
    keys.reserve(model.tables[n - 1].size());
    for (const auto &[k, e] : model.tables[n - 1]) keys.push_back(k);
    std::sort(keys.begin(), keys.end());

    out << "\n\\" << n << "-grams:\n";
    for (const auto &k : keys) {
      const NGramEntry &e = model.tables[n - 1].at(k);
      out << format_log10(e.log10_prob) << "\t";
      for (uint8_t i = 0; i < k.len; ++i) {
        if (i > 0) out << " ";
        out << model.vocab.token(k.words[i]);
      }
      if (n < model.order) out << "\t" << format_log10(e.log10_backoff);
      out << "\n";
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw Error(ErrorCode::IoFailure, "short write: " + path);
}

namespace {

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_log10(const std::string &s, const std::string &where) {
  char *end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::MalformedArpa, where + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

NGramModel read_arpa(const std::string &path, bool allow_high_order) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open ARPA: " + path);

  auto fail = [&](size_t lineno, const std::string &msg) -> Error {
    return Error(ErrorCode::MalformedArpa,
                 path + ":" + std::to_string(lineno) + ": " + msg);
  };

  std::string line;
  size_t lineno = 0;
  bool found_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw fail(lineno, "missing \\data\\ header");

  std::vector<size_t> declared;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) break;
    auto f = split_fields(line);
    if (f.size() != 2 || f[0] != "ngram") throw fail(lineno, "bad ngram count line");
    size_t eq = f[1].find('=');
    if (eq == std::string::npos) throw fail(lineno, "bad ngram count line");
    int n = std::stoi(f[1].substr(0, eq));
    size_t c = std::stoull(f[1].substr(eq + 1));
    if (n != static_cast<int>(declared.size()) + 1)
      throw fail(lineno, "ngram orders must be consecutive from 1");
    declared.push_back(c);
  }
  if (declared.empty()) throw fail(lineno, "no ngram counts declared");

  int order = static_cast<int>(declared.size());
  if (order > kMaxSupportedOrder)
    throw fail(lineno, "order " + std::to_string(order) + " unsupported");
  if (order > kOrderCap && !allow_high_order) {
    throw Error(ErrorCode::OrderTooHigh,
                path + ": order " + std::to_string(order) + " exceeds the " +
                    std::to_string(kOrderCap) +
                    "-gram cap (pass the high-order override to accept)");
  }

  NGramModel model;
  model.order = order;
  model.tables.resize(order);

  bool saw_end = false;
  int section = 0;  // current order being read, 0 = between sections
  size_t remaining = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line == "\\end\\") {
      saw_end = true;
      break;
    }
    if (line.size() >= 2 && line[0] == '\\' && line.back() == ':') {
      if (section != 0 && remaining != 0)
        throw fail(lineno, "section ended early: " + std::to_string(remaining) +
                               " entries missing");
      int n = std::atoi(line.c_str() + 1);
      if (n < 1 || n > order) throw fail(lineno, "unexpected section " + line);
      if (n != section + 1) throw fail(lineno, "sections out of order");
      section = n;
      remaining = declared[n - 1];
      continue;
    }
    if (section == 0) throw fail(lineno, "entry outside any section");
    if (remaining == 0)
      throw fail(lineno, "more entries than declared in section " +
                             std::to_string(section));

    auto f = split_fields(line);
    size_t n = static_cast<size_t>(section);
    bool has_bow = f.size() == n + 2;
    if (f.size() != n + 1 && !has_bow)
      throw fail(lineno, "expected " + std::to_string(n + 1) + " or " +
                             std::to_string(n + 2) + " fields");

    NGramEntry e;
    e.log10_prob = parse_log10(f[0], path + ":" + std::to_string(lineno));
    if (has_bow)
      e.log10_backoff = parse_log10(f.back(), path + ":" + std::to_string(lineno));

    NGramKey k;
    k.len = static_cast<uint8_t>(n);
    for (size_t i = 0; i < n; ++i) {
      const std::string &tok = f[1 + i];
      if (section == 1) {
        k.words[i] = model.vocab.intern(tok);
      } else {
        auto id = model.vocab.find(tok);
        if (!id) throw fail(lineno, "token '" + tok + "' not in unigrams");
        k.words[i] = *id;
      }
    }
    if (!model.tables[n - 1].emplace(k, e).second)
      throw fail(lineno, "duplicate n-gram");
    --remaining;
  }
  if (!saw_end) throw fail(lineno, "missing \\end\\");
  if (section != order || remaining != 0) {
    throw Error(ErrorCode::MalformedArpa,
                path + ": declared counts do not match actual entries");
  }

  // Guarantee the <unk> path; foreign closed-vocabulary files get a floor
  // entry with a warning.
  NGramKey unk = NGramKey::of(std::array<uint32_t, 1>{Vocab::kUnkId});
  if (!model.find(unk)) {
    model.tables[0].emplace(unk, NGramEntry{-7.0, 0.0});
    model.warnings.push_back("no <unk> in file; added floor entry");
  }
  return model;
}

}  // namespace ctcfuse
