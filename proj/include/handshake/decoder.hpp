// Reconstruction of relation triples from the 2N+1 handshaking tag sequences.
#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "handshake/core.hpp"
#include "handshake/index_map.hpp"

namespace handshake {

enum class Strictness { kStrict, kLenient };

/// Work counters, useful for asserting the decoder's cost in tests.
struct DecodeCounters {
  std::size_t cells_visited = 0;
  std::size_t candidate_checks = 0;
  std::size_t ignored_reversed_entities = 0;
};

struct DecodeOptions {
  Strictness strictness = Strictness::kStrict;
  DecodeCounters *counters = nullptr;
};

/// Entity spans grouped by head position.
class HeadEntityIndex {
 public:
  explicit HeadEntityIndex(std::size_t n = 0) : by_head_(n) {}

  void add(const TokenSpan &span) { by_head_.at(span.head).push_back(span); }

  std::span<const TokenSpan> starting_at(std::size_t head) const noexcept {
    if (head >= by_head_.size()) return {};
    return by_head_[head];
  }

  std::size_t positions() const noexcept { return by_head_.size(); }

 private:
  std::vector<std::vector<TokenSpan>> by_head_;
};

/// (subject tail, object tail) pairs of one relation, stored densely.
class TailPairSet {
 public:
  explicit TailPairSet(std::size_t n) : n_(n), bits_(n * n, 0) {}

  void insert(std::size_t subject_tail, std::size_t object_tail) {
    bits_[subject_tail * n_ + object_tail] = 1;
  }

  bool contains(std::size_t subject_tail, std::size_t object_tail) const noexcept {
    return subject_tail < n_ && object_tail < n_ && bits_[subject_tail * n_ + object_tail] != 0;
  }

  void clear() { std::fill(bits_.begin(), bits_.end(), 0); }

 private:
  std::size_t n_;
  std::vector<unsigned char> bits_;
};

struct EntityExtraction {
  std::set<TokenSpan> entities;
  HeadEntityIndex index;
};

/// Reads entity spans from the EH-to-ET sequence. A tag 2 there is corrupt:
/// an error in strict mode, ignored and counted in lenient mode.
inline EntityExtraction extract_entities(std::span<const LinkTag> eh2et, std::size_t n,
                                         const DecodeOptions &options = {}) {
  if (n == 0 || eh2et.size() != seq_length(n)) {
    throw Error(ErrorKind::kInvalidInput, "EH-to-ET sequence length does not match n");
  }
  EntityExtraction out{{}, HeadEntityIndex(n)};
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++k) {
      if (options.counters) ++options.counters->cells_visited;
      switch (eh2et[k]) {
        case LinkTag::kNone:
          break;
        case LinkTag::kForward:
          out.entities.insert({i, j});
          out.index.add({i, j});
          break;
        case LinkTag::kReversed:
          if (options.strictness == Strictness::kStrict) {
            throw Error(ErrorKind::kInvalidInput, "EH-to-ET tag 2 at flat index " +
                                                      std::to_string(k) + " (corrupt tagging)");
          }
          if (options.counters) ++options.counters->ignored_reversed_entities;
          break;
      }
    }
  }
  return out;
}

/// Handshaking sequence decoding. Tail pairs are collected per relation.
inline TripleSet decode(const HandshakingTagging &tagging, const RelationSchema &schema,
                        const DecodeOptions &options = {}) {
  tagging.validate(schema.size());
  const std::size_t n = tagging.n;
  const IndexMap map(n);
  const auto [entities, heads] = extract_entities(tagging.eh2et, n, options);

  TripleSet out;
  TailPairSet tails(n);
  for (RelationId r = 0; r < schema.size(); ++r) {
    tails.clear();
    const TagSequence &st2ot = tagging.st2ot[r];
    for (std::size_t k = 0; k < st2ot.size(); ++k) {
      if (options.counters) ++options.counters->cells_visited;
      const PairIndex &p = map[k];
      if (st2ot[k] == LinkTag::kForward) {
        tails.insert(p.row, p.col);
      } else if (st2ot[k] == LinkTag::kReversed) {
        tails.insert(p.col, p.row);
      }
    }

    const TagSequence &sh2oh = tagging.sh2oh[r];
    for (std::size_t k = 0; k < sh2oh.size(); ++k) {
      if (options.counters) ++options.counters->cells_visited;
      if (sh2oh[k] == LinkTag::kNone) continue;
      const PairIndex &p = map[k];
      // Objects are keyed by the object head, i.e. the second coordinate for tag 1.
      const bool forward = sh2oh[k] == LinkTag::kForward;
      const auto subjects = heads.starting_at(forward ? p.row : p.col);
      const auto objects = heads.starting_at(forward ? p.col : p.row);
      for (const TokenSpan &s : subjects) {
        for (const TokenSpan &o : objects) {
          if (options.counters) ++options.counters->candidate_checks;
          if (tails.contains(s.tail, o.tail)) out.insert({s, r, o});
        }
      }
    }
  }
  return out;
}

namespace detail {

// Whether the directed link a -> b is present in a folded sequence. The
// diagonal reads any nonzero tag as a link, matching decode.
inline bool has_link(const TagSequence &seq, std::size_t a, std::size_t b, std::size_t n) {
  if (a == b) return seq[seq_index(a, a, n)] != LinkTag::kNone;
  if (a < b) return seq[seq_index(a, b, n)] == LinkTag::kForward;
  return seq[seq_index(b, a, n)] == LinkTag::kReversed;
}

}  // namespace detail

/// Brute-force reference decoder: every (subject, relation, object) over all
/// entity pairs, kept iff both boundary links carry the oriented tag.
inline TripleSet decode_oracle(const HandshakingTagging &tagging, const RelationSchema &schema,
                               Strictness strictness = Strictness::kStrict) {
  tagging.validate(schema.size());
  const std::size_t n = tagging.n;
  std::vector<TokenSpan> entities;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const LinkTag tag = tagging.eh2et[seq_index(i, j, n)];
      if (tag == LinkTag::kForward) entities.push_back({i, j});
      if (tag == LinkTag::kReversed && strictness == Strictness::kStrict) {
        throw Error(ErrorKind::kInvalidInput, "EH-to-ET tag 2 (corrupt tagging)");
      }
    }
  }
  TripleSet out;
  for (RelationId r = 0; r < schema.size(); ++r) {
    for (const TokenSpan &s : entities) {
      for (const TokenSpan &o : entities) {
        if (detail::has_link(tagging.sh2oh[r], s.head, o.head, n) &&
            detail::has_link(tagging.st2ot[r], s.tail, o.tail, n)) {
          out.insert({s, r, o});
        }
      }
    }
  }
  return out;
}

}  // namespace handshake
