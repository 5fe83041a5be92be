// One-pass inference: encoder once per sentence, every tagger scored on the
// shared pair representations, then handshaking decoding of the argmax tags.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "handshake/core.hpp"
#include "handshake/decoder.hpp"
#include "handshake/model/network.hpp"

namespace handshake::model {

inline constexpr std::size_t kDefaultMaxLength = 100;

struct InferOptions {
  std::size_t max_length = kDefaultMaxLength;
  Strictness strictness = Strictness::kLenient;  // strict: over-long sentences are an error
  ModelCounters *counters = nullptr;
  std::vector<std::string> *warnings = nullptr;
};

/// Argmax tags for every (tagger, pair) cell of an L x 3K probability block.
inline HandshakingTagging predict_tagging(const Eigen::Ref<const Matrix> &probs, std::size_t n,
                                          std::size_t num_relations) {
  HandshakingTagging out(n, num_relations);
  const auto len = static_cast<Eigen::Index>(seq_length(n));
  if (probs.rows() != len || probs.cols() != static_cast<Eigen::Index>(3 * (2 * num_relations + 1))) {
    throw Error(ErrorKind::kShape, "probability block does not match sentence length and schema");
  }
  std::vector<TagSequence *> seqs{&out.eh2et};
  for (auto &s : out.sh2oh) seqs.push_back(&s);
  for (auto &s : out.st2ot) seqs.push_back(&s);
  for (std::size_t t = 0; t < seqs.size(); ++t) {
    for (Eigen::Index l = 0; l < len; ++l) {
      const double p[3] = {probs(l, 3 * t), probs(l, 3 * t + 1), probs(l, 3 * t + 2)};
      (*seqs[t])[static_cast<std::size_t>(l)] = argmax_tag(p);
    }
  }
  return out;
}

namespace detail {

// Head logits row by row with a fixed summation order, so a sentence scores
// identically whether it is inferred alone or inside a batch.
inline Matrix score_rows(const Matrix &pairs, const StackedHeads &heads) {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix x = pairs;
  const RowMatrix w = heads.weight;
  Matrix logits(x.rows(), w.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double *xr = x.data() + r * x.cols();
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      const double *wo = w.data() + o * w.cols();
      double acc = heads.bias(o);
      for (Eigen::Index k = 0; k < x.cols(); ++k) acc += wo[k] * xr[k];
      logits(r, o) = acc;
    }
  }
  return logits;
}

inline std::span<const std::string> window(std::span<const std::string> tokens,
                                           const InferOptions &options) {
  if (tokens.size() <= options.max_length) return tokens;
  if (options.strictness == Strictness::kStrict) {
    throw Error(ErrorKind::kInvalidInput, "sentence of " + std::to_string(tokens.size()) +
                                              " tokens exceeds max length " +
                                              std::to_string(options.max_length));
  }
  if (options.warnings) {
    options.warnings->push_back("sentence of " + std::to_string(tokens.size()) +
                                " tokens truncated to " + std::to_string(options.max_length));
  }
  return tokens.first(options.max_length);
}

}  // namespace detail

/// Batched inference: pair rows of all sentences are stacked and scored together.
inline std::vector<TripleSet> infer_batch(std::span<const std::vector<std::string>> sentences,
                                          const ModelParams &params,
                                          const InferOptions &options = {}) {
  std::vector<Matrix> pairs;
  std::vector<std::size_t> lengths;
  pairs.reserve(sentences.size());
  Eigen::Index total_rows = 0;
  for (const auto &sentence : sentences) {
    const auto tokens = detail::window(sentence, options);
    const Encoding enc = encode_tokens(tokens, params.encoder, options.counters);
    pairs.push_back(pair_representations(enc.hidden, params.kernel));
    lengths.push_back(tokens.size());
    total_rows += pairs.back().rows();
  }
  std::vector<TripleSet> out;
  out.reserve(sentences.size());
  if (sentences.empty()) return out;

  Matrix stacked(total_rows, params.kernel.pair_dim());
  Eigen::Index offset = 0;
  for (const auto &p : pairs) {
    stacked.middleRows(offset, p.rows()) = p;
    offset += p.rows();
  }
  if (options.counters) options.counters->pairs_scored += static_cast<std::size_t>(total_rows);
  const StackedHeads heads = stack_heads(params.taggers);
  Matrix probs = detail::score_rows(stacked, heads);
  softmax_rows(probs);

  offset = 0;
  const DecodeOptions decode_options{Strictness::kLenient, nullptr};
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto rows = pairs[s].rows();
    const HandshakingTagging tagging =
        predict_tagging(probs.middleRows(offset, rows), lengths[s], params.schema.size());
    out.push_back(decode(tagging, params.schema, decode_options));
    offset += rows;
  }
  return out;
}

inline TripleSet infer(std::span<const std::string> tokens, const ModelParams &params,
                       const InferOptions &options = {}) {
  const std::vector<std::vector<std::string>> one{std::vector<std::string>(tokens.begin(), tokens.end())};
  return std::move(infer_batch(one, params, options).front());
}

}  // namespace handshake::model
