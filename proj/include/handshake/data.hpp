// Dataset ingestion (NYT/WebNLG-style JSON), mention alignment, overlap
// taxonomy and test-split statistics.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "handshake/core.hpp"
#include "handshake/decoder.hpp"

namespace handshake::data {

enum class AnnotationStandard {
  kLastWord,   // every gold span collapses to its final token
  kWholeSpan,  // full entity spans
};

inline AnnotationStandard parse_standard(const std::string &s) {
  if (s == "last-word") return AnnotationStandard::kLastWord;
  if (s == "whole-span") return AnnotationStandard::kWholeSpan;
  throw Error(ErrorKind::kInvalidInput, "unknown annotation standard '" + s + "'");
}

inline const char *to_string(AnnotationStandard s) {
  return s == AnnotationStandard::kLastWord ? "last-word" : "whole-span";
}

struct Tokenized {
  std::vector<std::string> tokens;
  std::vector<CharSpan> spans;
};

using Tokenizer = std::function<Tokenized(const std::string &)>;

/// Splits on whitespace and optionally detaches every ASCII punctuation character.
inline Tokenized tokenize(const std::string &text, bool detach_punctuation = true) {
  Tokenized out;
  std::size_t i = 0;
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  const auto is_punct = [&](char c) {
    return detach_punctuation && std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (!is_punct(text[i])) {
      while (j < text.size() && !is_space(text[j]) && !is_punct(text[j])) ++j;
    }
    out.tokens.push_back(text.substr(i, j - i));
    out.spans.push_back({i, j});
    i = j;
  }
  return out;
}

inline Tokenizer default_tokenizer() {
  return [](const std::string &text) { return tokenize(text, true); };
}

inline Tokenizer whitespace_tokenizer() {
  return [](const std::string &text) { return tokenize(text, false); };
}

namespace detail {

inline std::optional<std::size_t> token_starting_at(const std::vector<CharSpan> &spans,
                                                    std::size_t begin) {
  auto it = std::lower_bound(spans.begin(), spans.end(), begin,
                             [](const CharSpan &s, std::size_t b) { return s.begin < b; });
  if (it == spans.end() || it->begin != begin) return std::nullopt;
  return static_cast<std::size_t>(it - spans.begin());
}

inline std::optional<std::size_t> token_ending_at(const std::vector<CharSpan> &spans,
                                                  std::size_t end) {
  auto it = std::lower_bound(spans.begin(), spans.end(), end,
                             [](const CharSpan &s, std::size_t e) { return s.end < e; });
  if (it == spans.end() || it->end != end) return std::nullopt;
  return static_cast<std::size_t>(it - spans.begin());
}

}  // namespace detail

/// Token span covering exactly the characters [offsets.begin, offsets.end).
inline TokenSpan align_offsets(const std::vector<CharSpan> &token_spans, CharSpan offsets) {
  const auto head = detail::token_starting_at(token_spans, offsets.begin);
  const auto tail = detail::token_ending_at(token_spans, offsets.end);
  if (!head || !tail || *head > *tail) {
    throw Error(ErrorKind::kAlignment, "character offsets [" + std::to_string(offsets.begin) + ", " +
                                           std::to_string(offsets.end) +
                                           ") do not fall on token boundaries");
  }
  return {*head, *tail};
}

/// Leftmost occurrence of `mention` in `text` whose ends coincide with token boundaries.
inline TokenSpan align_spans(const std::string &text, const std::vector<CharSpan> &token_spans,
                             const std::string &mention) {
  if (mention.empty()) throw Error(ErrorKind::kAlignment, "empty mention");
  for (std::size_t pos = text.find(mention); pos != std::string::npos;
       pos = text.find(mention, pos + 1)) {
    const auto head = detail::token_starting_at(token_spans, pos);
    const auto tail = detail::token_ending_at(token_spans, pos + mention.size());
    if (head && tail && *head <= *tail) return {*head, *tail};
  }
  throw Error(ErrorKind::kAlignment, "mention '" + mention + "' not found on token boundaries");
}

inline TokenSpan align_spans(const std::string &text, const std::vector<std::string> &tokens,
                             const std::string &mention) {
  Tokenized t = tokenize(text);
  if (t.tokens != tokens) {
    throw Error(ErrorKind::kAlignment, "tokens do not match the default tokenization of text");
  }
  return align_spans(text, t.spans, mention);
}

/// One gold triple as found in a dataset file, before alignment.
struct MentionRef {
  std::string text;
  std::optional<CharSpan> offsets;
};

struct DatasetRecord {
  std::string text;
  std::optional<std::vector<std::string>> tokens;
  struct RawTriple {
    MentionRef subject;
    std::string relation;
    MentionRef object;
  };
  std::vector<RawTriple> triples;
};

namespace detail {

inline MentionRef parse_mention(const nlohmann::json &j, const std::string &text) {
  if (j.is_string()) return {j.get<std::string>(), std::nullopt};
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    const auto b = j[0].get<long long>();
    const auto e = j[1].get<long long>();
    if (b < 0 || e <= b || static_cast<std::size_t>(e) > text.size()) {
      throw Error(ErrorKind::kParse, "invalid character offsets");
    }
    const CharSpan span{static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
    return {text.substr(span.begin, span.end - span.begin), span};
  }
  if (j.is_object()) {
    MentionRef m;
    for (const char *key : {"text", "mention", "name"}) {
      if (j.contains(key)) m.text = j[key].get<std::string>();
    }
    for (const char *key : {"char_span", "offsets", "offset"}) {
      if (j.contains(key)) {
        MentionRef inner = parse_mention(j[key], text);
        m.offsets = inner.offsets;
        if (m.text.empty()) m.text = inner.text;
      }
    }
    if (m.text.empty() && !m.offsets) throw Error(ErrorKind::kParse, "mention object lacks text or offsets");
    return m;
  }
  throw Error(ErrorKind::kParse, "mention must be a string, [begin, end] offsets, or an object");
}

}  // namespace detail

inline DatasetRecord parse_record(const nlohmann::json &j) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "record must be a JSON object");
  DatasetRecord rec;
  if (j.contains("tokens")) rec.tokens = j["tokens"].get<std::vector<std::string>>();
  if (j.contains("text")) {
    rec.text = j["text"].get<std::string>();
  } else if (rec.tokens) {
    std::ostringstream joined;
    for (std::size_t i = 0; i < rec.tokens->size(); ++i) joined << (i ? " " : "") << (*rec.tokens)[i];
    rec.text = joined.str();
  } else {
    throw Error(ErrorKind::kParse, "record lacks 'text'");
  }
  const char *list_key = j.contains("triple_list") ? "triple_list" : "triples";
  if (!j.contains(list_key)) throw Error(ErrorKind::kParse, "record lacks 'triple_list'");
  for (const auto &t : j[list_key]) {
    DatasetRecord::RawTriple raw;
    if (t.is_array() && t.size() == 3) {
      raw = {detail::parse_mention(t[0], rec.text), t[1].get<std::string>(),
             detail::parse_mention(t[2], rec.text)};
    } else if (t.is_object() && t.contains("subject") && t.contains("relation") && t.contains("object")) {
      raw = {detail::parse_mention(t["subject"], rec.text), t["relation"].get<std::string>(),
             detail::parse_mention(t["object"], rec.text)};
    } else {
      throw Error(ErrorKind::kParse, "triple must be [subject, relation, object]");
    }
    rec.triples.push_back(std::move(raw));
  }
  return rec;
}

struct SkipReport {
  std::size_t record = 0;  // 1-based line (JSON lines) or element (JSON array) number
  std::string reason;
};

struct LoadOptions {
  AnnotationStandard standard = AnnotationStandard::kWholeSpan;
  Strictness strictness = Strictness::kLenient;
  const RelationSchema *schema = nullptr;  // null: relations registered in first-seen order
  Tokenizer tokenizer = default_tokenizer();
};

struct LoadedDataset {
  std::vector<SentenceAnnotation> sentences;
  std::vector<std::string> relations;
  std::vector<SkipReport> skipped;
};

namespace detail {

inline Tokenized tokens_for(const DatasetRecord &rec, const Tokenizer &tokenizer) {
  if (!rec.tokens) return tokenizer(rec.text);
  Tokenized out{*rec.tokens, {}};
  std::size_t cursor = 0;
  for (const auto &tok : *rec.tokens) {
    const std::size_t pos = rec.text.find(tok, cursor);
    if (pos == std::string::npos) throw Error(ErrorKind::kAlignment, "token '" + tok + "' not in text");
    out.spans.push_back({pos, pos + tok.size()});
    cursor = pos + tok.size();
  }
  return out;
}

}  // namespace detail

/// Aligns a parsed record to token spans under the given standard.
inline SentenceAnnotation annotate(const DatasetRecord &rec, AnnotationStandard standard,
                                   const Tokenizer &tokenizer,
                                   const std::function<RelationId(const std::string &)> &relation_id) {
  const Tokenized tok = detail::tokens_for(rec, tokenizer);
  if (tok.tokens.empty()) throw Error(ErrorKind::kInvalidInput, "record has no tokens");
  SentenceAnnotation ann;
  ann.text = rec.text;
  ann.tokens = tok.tokens;
  ann.char_spans = tok.spans;
  auto locate = [&](const MentionRef &m) {
    TokenSpan span = m.offsets ? align_offsets(tok.spans, *m.offsets)
                               : align_spans(rec.text, tok.spans, m.text);
    if (standard == AnnotationStandard::kLastWord) span.head = span.tail;
    return span;
  };
  for (const auto &raw : rec.triples) {
    ann.triples.insert({locate(raw.subject), relation_id(raw.relation), locate(raw.object)});
  }
  return ann;
}

/// Reads a JSON-lines file, or a single JSON array of records.
inline LoadedDataset load_dataset(const std::string &path, const LoadOptions &options = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  std::vector<std::pair<std::size_t, nlohmann::json>> records;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    nlohmann::json arr;
    try {
      arr = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(ErrorKind::kParse, path + ": " + e.what());
    }
    std::size_t idx = 0;
    for (auto &r : arr) records.emplace_back(++idx, std::move(r));
  } else {
    std::istringstream lines(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        records.emplace_back(line_no, nlohmann::json::parse(line));
      } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorKind::kParse, path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
      }
    }
  }

  LoadedDataset out;
  std::map<std::string, RelationId> seen;
  if (options.schema) out.relations = options.schema->names();
  auto relation_id = [&](const std::string &name) -> RelationId {
    if (options.schema) return options.schema->id(name);
    auto [it, inserted] = seen.emplace(name, out.relations.size());
    if (inserted) out.relations.push_back(name);
    return it->second;
  };
  for (const auto &[number, json] : records) {
    const std::size_t known_relations = out.relations.size();
    try {
      DatasetRecord rec = parse_record(json);
      out.sentences.push_back(annotate(rec, options.standard, options.tokenizer, relation_id));
    } catch (const Error &e) {
      const bool skippable = e.kind() == ErrorKind::kAlignment || e.kind() == ErrorKind::kSchemaMismatch ||
                             e.kind() == ErrorKind::kInvalidInput;
      if (options.strictness == Strictness::kStrict || !skippable) {
        throw Error(e.kind(), path + ":" + std::to_string(number) + ": " + e.what());
      }
      // Relations first seen in a skipped record are not registered.
      while (!options.schema && out.relations.size() > known_relations) {
        seen.erase(out.relations.back());
        out.relations.pop_back();
      }
      out.skipped.push_back({number, e.what()});
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorKind::kParse, path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

/// Reads a relation schema: a JSON array of names, an object name -> id, or
/// the [id2rel, rel2id] pair used by common preprocessed releases.
inline RelationSchema load_schema(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open schema file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  auto from_name_to_id = [](const nlohmann::json &obj) {
    std::vector<std::pair<long long, std::string>> items;
    for (auto it = obj.begin(); it != obj.end(); ++it) items.emplace_back(it.value().get<long long>(), it.key());
    std::sort(items.begin(), items.end());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].first != static_cast<long long>(i)) {
        throw Error(ErrorKind::kParse, "relation ids must be dense and 0-based");
      }
      names.push_back(items[i].second);
    }
    return names;
  };
  try {
    if (j.is_array() && j.size() == 2 && j[0].is_object() && j[1].is_object()) {
      return RelationSchema(from_name_to_id(j[1]));
    }
    if (j.is_array()) return RelationSchema(j.get<std::vector<std::string>>());
    if (j.is_object()) return RelationSchema(from_name_to_id(j));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  throw Error(ErrorKind::kParse, path + ": unrecognized schema layout");
}

struct DatasetSplits {
  std::vector<SentenceAnnotation> train;
  std::vector<SentenceAnnotation> valid;
  std::vector<SentenceAnnotation> test;
};

/// Split files of a dataset directory. A plain file path is taken as the test split.
struct SplitFiles {
  std::string train, valid, test;
  std::string schema;  // empty: relations are collected from the splits
};

inline SplitFiles locate_splits(const std::string &path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw Error(ErrorKind::kIo, "no such file or directory " + path);
  if (!fs::is_directory(path)) return {"", "", path, ""};
  auto pick = [&](std::initializer_list<const char *> names) -> std::string {
    for (const char *n : names) {
      const fs::path p = fs::path(path) / n;
      if (fs::exists(p)) return p.string();
    }
    return "";
  };
  SplitFiles f{pick({"train.json", "train_triples.json", "train_data.json", "train.jsonl"}),
               pick({"valid.json", "dev.json", "dev_triples.json", "valid_data.json", "valid.jsonl", "dev.jsonl"}),
               pick({"test.json", "test_triples.json", "test_data.json", "test.jsonl"}),
               pick({"rel2id.json", "schema.json", "relations.json"})};
  if (f.test.empty()) throw Error(ErrorKind::kIo, "no test split found in " + path);
  return f;
}

struct LoadedSplits {
  DatasetSplits splits;
  RelationSchema schema;
  std::size_t skipped = 0;
};

/// Loads every present split. `options.schema` wins over `files.schema`.
inline LoadedSplits load_splits(const SplitFiles &files, LoadOptions options = {}) {
  std::optional<RelationSchema> schema;
  if (options.schema) {
    schema = *options.schema;
  } else if (!files.schema.empty()) {
    schema = load_schema(files.schema);
  }
  LoadedSplits out;
  std::vector<std::string> relations;
  options.schema = schema ? &*schema : nullptr;
  auto load = [&](const std::string &path, std::vector<SentenceAnnotation> &target) {
    if (path.empty()) return;
    LoadedDataset ds = load_dataset(path, options);
    target = std::move(ds.sentences);
    out.skipped += ds.skipped.size();
    for (auto &r : ds.relations) {
      if (std::find(relations.begin(), relations.end(), r) == relations.end()) relations.push_back(r);
    }
  };
  load(files.train, out.splits.train);
  load(files.valid, out.splits.valid);
  load(files.test, out.splits.test);
  if (!schema) {
    if (relations.empty()) throw Error(ErrorKind::kInvalidInput, "no relations found in any split");
    schema = RelationSchema(relations);
  }
  out.schema = std::move(*schema);
  return out;
}

struct OverlapPattern {
  bool normal = false;
  bool seo = false;
  bool epo = false;

  friend bool operator==(const OverlapPattern &, const OverlapPattern &) = default;
};

/// Normal: no entity shared between triples. EPO: two triples over the same
/// ordered (subject, object) pair. SEO: two triples sharing an entity without
/// being the same ordered pair (a reversed pair counts here).
inline OverlapPattern classify_overlap(const SentenceAnnotation &ann) {
  if (ann.triples.empty()) {
    throw Error(ErrorKind::kInvalidInput, "cannot classify a sentence without triples");
  }
  OverlapPattern p;
  const std::vector<Triple> triples(ann.triples.begin(), ann.triples.end());
  for (std::size_t a = 0; a < triples.size(); ++a) {
    for (std::size_t b = a + 1; b < triples.size(); ++b) {
      const Triple &x = triples[a];
      const Triple &y = triples[b];
      if (x.subject == y.subject && x.object == y.object) {
        p.epo = true;
      } else if (x.subject == y.subject || x.subject == y.object || x.object == y.subject ||
                 x.object == y.object) {
        p.seo = true;
      }
    }
  }
  p.normal = !p.seo && !p.epo;
  return p;
}

inline constexpr std::size_t kNumBuckets = 5;

/// Triplet-count bucket: 0 for N = 1, ..., 4 for N >= 5.
inline std::size_t triple_bucket(std::size_t count) {
  if (count == 0) throw Error(ErrorKind::kInvalidInput, "sentence without triples has no bucket");
  return std::min(count, kNumBuckets) - 1;
}

inline const char *bucket_label(std::size_t bucket) {
  static constexpr const char *kLabels[kNumBuckets] = {"N=1", "N=2", "N=3", "N=4", "N>=5"};
  return kLabels[bucket];
}

struct StatsReport {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  std::size_t normal = 0;
  std::size_t seo = 0;
  std::size_t epo = 0;
  std::array<std::size_t, kNumBuckets> buckets{};
  std::size_t without_triples = 0;  // test sentences outside every bucket
  std::size_t relations = 0;

  friend bool operator==(const StatsReport &, const StatsReport &) = default;
};

inline StatsReport dataset_stats(const DatasetSplits &splits, const RelationSchema &schema) {
  StatsReport r;
  r.train = splits.train.size();
  r.valid = splits.valid.size();
  r.test = splits.test.size();
  r.relations = schema.size();
  for (const auto &ann : splits.test) {
    if (ann.triples.empty()) {
      ++r.without_triples;
      continue;
    }
    const OverlapPattern p = classify_overlap(ann);
    r.normal += p.normal;
    r.seo += p.seo;
    r.epo += p.epo;
    ++r.buckets[triple_bucket(ann.triples.size())];
  }
  return r;
}

inline nlohmann::ordered_json to_json(const StatsReport &r) {
  nlohmann::ordered_json j;
  j["train"] = r.train;
  j["valid"] = r.valid;
  j["test"] = r.test;
  j["normal"] = r.normal;
  j["seo"] = r.seo;
  j["epo"] = r.epo;
  for (std::size_t b = 0; b < kNumBuckets; ++b) j["triplets"][bucket_label(b)] = r.buckets[b];
  j["without_triples"] = r.without_triples;
  j["relations"] = r.relations;
  return j;
}

inline std::string format_table(const std::string &name, const StatsReport &r) {
  std::ostringstream os;
  const std::vector<std::string> head = {"Dataset", "Train", "Valid", "Test", "Normal", "SEO",
                                         "EPO",     "N=1",   "N=2",   "N=3",  "N=4",    "N>=5",
                                         "Relation"};
  const std::vector<std::string> row = {
      name, std::to_string(r.train), std::to_string(r.valid), std::to_string(r.test),
      std::to_string(r.normal), std::to_string(r.seo), std::to_string(r.epo),
      std::to_string(r.buckets[0]), std::to_string(r.buckets[1]), std::to_string(r.buckets[2]),
      std::to_string(r.buckets[3]), std::to_string(r.buckets[4]), std::to_string(r.relations)};
  for (std::size_t i = 0; i < head.size(); ++i) {
    const int w = static_cast<int>(std::max(head[i].size(), row[i].size())) + 2;
    os << std::setw(w) << head[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < head.size(); ++i) {
    const int w = static_cast<int>(std::max(head[i].size(), row[i].size())) + 2;
    os << std::setw(w) << row[i];
  }
  os << '\n';
  return os.str();
}

}  // namespace handshake::data
