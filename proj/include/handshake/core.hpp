// Domain types shared by the tagging codec, decoder, model and evaluation.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace handshake {

/// Category of a library failure. The CLI maps these onto exit codes.
enum class ErrorKind {
  kInvalidInput,
  kInvalidIndex,
  kConflict,
  kShape,
  kNumeric,
  kAlignment,
  kParse,
  kSchemaMismatch,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

using RelationId = std::size_t;

/// Inclusive token span [head, tail], 0-based.
struct TokenSpan {
  std::size_t head = 0;
  std::size_t tail = 0;

  constexpr TokenSpan() = default;
  constexpr TokenSpan(std::size_t h, std::size_t t) : head(h), tail(t) {}

  constexpr bool valid() const noexcept { return head <= tail; }
  constexpr bool fits(std::size_t n) const noexcept { return valid() && tail < n; }
  constexpr std::size_t length() const noexcept { return tail - head + 1; }

  friend constexpr auto operator<=>(const TokenSpan &, const TokenSpan &) = default;
};

struct Triple {
  TokenSpan subject;
  RelationId relation = 0;
  TokenSpan object;

  friend constexpr auto operator<=>(const Triple &, const Triple &) = default;
};

using TripleSet = std::set<Triple>;

/// Ordered registry of relation types. Relation id == position.
class RelationSchema {
 public:
  RelationSchema() = default;

  explicit RelationSchema(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) {
      throw Error(ErrorKind::kInvalidInput, "relation schema must hold at least one relation");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second) {
        throw Error(ErrorKind::kInvalidInput, "duplicate relation name in schema: " + names_[i]);
      }
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::vector<std::string> &names() const noexcept { return names_; }

  const std::string &name(RelationId id) const {
    if (id >= names_.size()) {
      throw Error(ErrorKind::kInvalidIndex, "relation id " + std::to_string(id) + " out of range");
    }
    return names_[id];
  }

  std::optional<RelationId> find(const std::string &name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  RelationId id(const std::string &name) const {
    if (auto found = find(name)) return *found;
    throw Error(ErrorKind::kSchemaMismatch, "relation not in schema: " + name);
  }

  friend bool operator==(const RelationSchema &a, const RelationSchema &b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, RelationId> index_;
};

struct CharSpan {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  friend constexpr auto operator<=>(const CharSpan &, const CharSpan &) = default;
};

/// A tokenized sentence with its gold triples.
struct SentenceAnnotation {
  std::string text;
  std::vector<std::string> tokens;
  TripleSet triples;
  std::optional<std::vector<CharSpan>> char_spans;

  std::size_t size() const noexcept { return tokens.size(); }

  /// Throws unless n >= 1 and every triple fits the sentence and schema.
  void validate(std::size_t num_relations) const {
    if (tokens.empty()) {
      throw Error(ErrorKind::kInvalidInput, "sentence must contain at least one token");
    }
    for (const Triple &t : triples) {
      if (!t.subject.fits(tokens.size()) || !t.object.fits(tokens.size())) {
        throw Error(ErrorKind::kInvalidIndex, "triple span outside sentence of length " +
                                                  std::to_string(tokens.size()));
      }
      if (t.relation >= num_relations) {
        throw Error(ErrorKind::kInvalidIndex,
                    "triple relation id " + std::to_string(t.relation) + " outside schema");
      }
    }
  }

  /// Distinct entity spans appearing as a subject or object, ascending.
  std::set<TokenSpan> entities() const {
    std::set<TokenSpan> out;
    for (const Triple &t : triples) {
      out.insert(t.subject);
      out.insert(t.object);
    }
    return out;
  }
};

enum class LinkTag : std::uint8_t {
  kNone = 0,
  kForward = 1,
  kReversed = 2,
};

constexpr int to_int(LinkTag tag) noexcept { return static_cast<int>(tag); }

inline LinkTag link_tag_from_int(long long value) {
  if (value < 0 || value > 2) {
    throw Error(ErrorKind::kInvalidInput, "link tag must be 0, 1 or 2, got " + std::to_string(value));
  }
  return static_cast<LinkTag>(value);
}

/// Number of upper-triangle token pairs (i <= j) of a length-n sentence.
constexpr std::size_t seq_length(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidInput, "sentence length must be >= 1");
  return (n * n + n) / 2;
}

using TagSequence = std::vector<LinkTag>;

/// The 2N+1 flattened tag sequences of one sentence.
struct HandshakingTagging {
  std::size_t n = 0;
  TagSequence eh2et;
  std::vector<TagSequence> sh2oh;  // one per relation
  std::vector<TagSequence> st2ot;  // one per relation

  HandshakingTagging() = default;

  HandshakingTagging(std::size_t length, std::size_t num_relations)
      : n(length),
        eh2et(seq_length(length), LinkTag::kNone),
        sh2oh(num_relations, TagSequence(seq_length(length), LinkTag::kNone)),
        st2ot(num_relations, TagSequence(seq_length(length), LinkTag::kNone)) {}

  std::size_t num_relations() const noexcept { return sh2oh.size(); }
  std::size_t num_sequences() const noexcept { return 1 + sh2oh.size() + st2ot.size(); }

  /// Throws unless there are exactly 2N+1 sequences of length (n^2+n)/2.
  void validate(std::optional<std::size_t> expected_relations = std::nullopt) const {
    const std::size_t len = seq_length(n);
    if (sh2oh.size() != st2ot.size()) {
      throw Error(ErrorKind::kShape, "SH-to-OH and ST-to-OT sequence counts differ");
    }
    if (expected_relations && sh2oh.size() != *expected_relations) {
      throw Error(ErrorKind::kSchemaMismatch,
                  "tagging holds " + std::to_string(sh2oh.size()) + " relations, schema has " +
                      std::to_string(*expected_relations));
    }
    auto check = [len](const TagSequence &seq, const char *what) {
      if (seq.size() != len) {
        throw Error(ErrorKind::kInvalidInput, std::string(what) + " sequence has length " +
                                                  std::to_string(seq.size()) + ", expected " +
                                                  std::to_string(len));
      }
    };
    check(eh2et, "EH-to-ET");
    for (const auto &s : sh2oh) check(s, "SH-to-OH");
    for (const auto &s : st2ot) check(s, "ST-to-OT");
  }

  friend bool operator==(const HandshakingTagging &, const HandshakingTagging &) = default;
};

}  // namespace handshake
