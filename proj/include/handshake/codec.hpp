// Encoding of gold triples into handshaking tag sequences.
//
// Three link kinds are tagged on the upper triangle of the token-pair matrix:
// EH-to-ET (entity head -> entity tail, shared by all relations), and per
// relation SH-to-OH (subject head -> object head) and ST-to-OT (subject tail
// -> object tail). A link that would land in the lower triangle is folded
// onto the transposed cell with tag 2.
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "handshake/core.hpp"
#include "handshake/decoder.hpp"
#include "handshake/index_map.hpp"

namespace handshake {

struct EncodeConflict {
  enum class Kind {
    kHeadLink,        // two triples claim one SH-to-OH cell with tags 1 and 2
    kTailLink,        // same for ST-to-OT
    kAmbiguousDecode, // links of distinct triples combine into a phantom triple
  };

  Kind kind = Kind::kHeadLink;
  RelationId relation = 0;
  PairIndex pair;
  LinkTag kept = LinkTag::kNone;
  LinkTag rejected = LinkTag::kNone;
  std::optional<Triple> phantom;

  friend bool operator==(const EncodeConflict &, const EncodeConflict &) = default;
};

inline const char *to_string(EncodeConflict::Kind kind) {
  switch (kind) {
    case EncodeConflict::Kind::kHeadLink: return "SH-to-OH";
    case EncodeConflict::Kind::kTailLink: return "ST-to-OT";
    case EncodeConflict::Kind::kAmbiguousDecode: return "ambiguous-decode";
  }
  return "?";
}

class ConflictError : public Error {
 public:
  explicit ConflictError(std::vector<EncodeConflict> conflicts)
      : Error(ErrorKind::kConflict,
              std::to_string(conflicts.size()) + " tagging conflict(s) in strict mode"),
        conflicts_(std::move(conflicts)) {}

  const std::vector<EncodeConflict> &conflicts() const noexcept { return conflicts_; }

 private:
  std::vector<EncodeConflict> conflicts_;
};

struct EncodeResult {
  HandshakingTagging tagging;
  std::vector<EncodeConflict> conflicts;
  std::size_t self_links = 0;  // triples whose subject span equals the object span
};

namespace detail {

struct FoldedCell {
  std::size_t index;
  LinkTag tag;
};

inline FoldedCell fold(std::size_t from, std::size_t to, std::size_t n) {
  if (from <= to) return {seq_index(from, to, n), LinkTag::kForward};
  return {seq_index(to, from, n), LinkTag::kReversed};
}

// Writes one boundary link. Tag 1 beats tag 2; equal tags are idempotent.
inline void write_link(TagSequence &seq, FoldedCell cell, std::size_t n, RelationId r,
                       EncodeConflict::Kind kind, std::vector<EncodeConflict> &conflicts) {
  LinkTag &slot = seq[cell.index];
  if (slot == LinkTag::kNone || slot == cell.tag) {
    slot = cell.tag;
    return;
  }
  const PairIndex pair = matrix_index(cell.index, n);
  const bool already_recorded = std::any_of(conflicts.begin(), conflicts.end(), [&](const auto &c) {
    return c.kind == kind && c.relation == r && c.pair == pair;
  });
  if (!already_recorded) {
    conflicts.push_back({kind, r, pair, LinkTag::kForward, LinkTag::kReversed, std::nullopt});
  }
  slot = LinkTag::kForward;
}

inline EncodeResult encode_links(const SentenceAnnotation &ann, const RelationSchema &schema) {
  ann.validate(schema.size());
  const std::size_t n = ann.size();
  EncodeResult out{HandshakingTagging(n, schema.size()), {}, 0};
  HandshakingTagging &tagging = out.tagging;
  for (const Triple &t : ann.triples) {
    tagging.eh2et[seq_index(t.subject.head, t.subject.tail, n)] = LinkTag::kForward;
    tagging.eh2et[seq_index(t.object.head, t.object.tail, n)] = LinkTag::kForward;
    if (t.subject == t.object) ++out.self_links;
    write_link(tagging.sh2oh[t.relation], fold(t.subject.head, t.object.head, n), n, t.relation,
               EncodeConflict::Kind::kHeadLink, out.conflicts);
    write_link(tagging.st2ot[t.relation], fold(t.subject.tail, t.object.tail, n), n, t.relation,
               EncodeConflict::Kind::kTailLink, out.conflicts);
  }
  return out;
}

inline void append_phantoms(const SentenceAnnotation &ann, const RelationSchema &schema,
                            EncodeResult &result) {
  const TripleSet decoded = decode(result.tagging, schema);
  for (const Triple &t : decoded) {
    if (ann.triples.contains(t)) continue;
    result.conflicts.push_back({EncodeConflict::Kind::kAmbiguousDecode, t.relation,
                                PairIndex{t.subject.head, t.object.head}, LinkTag::kNone,
                                LinkTag::kNone, t});
  }
}

}  // namespace detail

/// All reasons the annotation cannot be tagged losslessly: contradictory
/// folded tags, and phantom triples that decoding the tagging would add.
inline std::vector<EncodeConflict> detect_conflicts(const SentenceAnnotation &ann,
                                                    const RelationSchema &schema) {
  EncodeResult result = detail::encode_links(ann, schema);
  detail::append_phantoms(ann, schema, result);
  return std::move(result.conflicts);
}

/// Strict mode throws ConflictError on any conflict; lenient mode keeps the
/// tie-broken tagging and returns the conflicts alongside it.
inline EncodeResult encode(const SentenceAnnotation &ann, const RelationSchema &schema,
                           Strictness mode = Strictness::kStrict) {
  EncodeResult result = detail::encode_links(ann, schema);
  detail::append_phantoms(ann, schema, result);
  if (mode == Strictness::kStrict && !result.conflicts.empty()) {
    throw ConflictError(std::move(result.conflicts));
  }
  return result;
}

}  // namespace handshake
