// Forward pass, joint loss and exact backpropagation for the token-pair tagger.
//
//   h_1..h_n      contextual token vectors (embedding, optional bidirectional mixer)
//   h_ij          = tanh(W_h [h_i; h_j] + b_h)          for every j >= i
//   P(y_ij)       = softmax(W_o h_ij + b_o)             one head per tagger
//   loss          = mean over (pair, tagger) cells of -log max(P(gold), eps)
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "handshake/core.hpp"
#include "handshake/index_map.hpp"
#include "handshake/model/params.hpp"

namespace handshake::model {

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr std::size_t kNumClasses = 3;

struct ModelCounters {
  std::size_t encoder_calls = 0;
  std::size_t pairs_scored = 0;
};

/// Contextual vectors h_1..h_n as rows of an n x d matrix.
struct Encoding {
  std::vector<std::size_t> ids;
  Matrix embedded;   // n x embedding_dim
  Matrix forward;    // n x hidden (mixer only)
  Matrix backward;   // n x hidden (mixer only)
  Matrix hidden;     // n x d
};

inline Encoding encode_tokens(std::span<const std::string> tokens, const EncoderParams &params,
                              ModelCounters *counters = nullptr) {
  if (tokens.empty()) throw Error(ErrorKind::kInvalidInput, "cannot encode an empty token list");
  if (counters) ++counters->encoder_calls;
  const auto n = static_cast<Eigen::Index>(tokens.size());
  Encoding enc;
  enc.ids.reserve(tokens.size());
  enc.embedded.resize(n, params.embedding_dim());
  for (Eigen::Index t = 0; t < n; ++t) {
    const std::size_t id = params.vocab.id(tokens[static_cast<std::size_t>(t)]);
    enc.ids.push_back(id);
    enc.embedded.row(t) = params.embedding.row(static_cast<Eigen::Index>(id));
  }
  if (!params.mixer) {
    enc.hidden = enc.embedded;
    return enc;
  }
  const ContextMixer &mix = *params.mixer;
  const auto h = mix.hidden();
  enc.forward.resize(n, h);
  enc.backward.resize(n, h);
  Vector state = Vector::Zero(h);
  for (Eigen::Index t = 0; t < n; ++t) {
    Vector pre = mix.forward.input * enc.embedded.row(t).transpose() + mix.forward.recurrent * state +
                 mix.forward.bias;
    state = pre.array().tanh().matrix();
    enc.forward.row(t) = state.transpose();
  }
  state.setZero();
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    Vector pre = mix.backward.input * enc.embedded.row(t).transpose() +
                 mix.backward.recurrent * state + mix.backward.bias;
    state = pre.array().tanh().matrix();
    enc.backward.row(t) = state.transpose();
  }
  enc.hidden.resize(n, 2 * h);
  enc.hidden << enc.forward, enc.backward;
  return enc;
}

/// h_ij for a single pair; the batched path computes the same quantity via split projections.
inline Vector handshaking_kernel(const Vector &h_i, const Vector &h_j, const KernelParams &params) {
  if (h_i.size() != params.input_dim() || h_j.size() != params.input_dim()) {
    throw Error(ErrorKind::kShape, "token vector dimension " + std::to_string(h_i.size()) + "/" +
                                       std::to_string(h_j.size()) + " does not match kernel input " +
                                       std::to_string(params.input_dim()));
  }
  Vector joined(h_i.size() + h_j.size());
  joined << h_i, h_j;
  return (params.weight * joined + params.bias).array().tanh().matrix();
}

namespace detail {

inline void softmax_inplace(double *z) {
  const double m = std::max({z[0], z[1], z[2]});
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    z[c] = std::exp(z[c] - m);
    sum += z[c];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) z[c] /= sum;
}

}  // namespace detail

inline Eigen::Vector3d tag_distribution(const Vector &pair, const TaggerParams &taggers,
                                        std::size_t tagger) {
  if (tagger >= taggers.size()) {
    throw Error(ErrorKind::kInvalidIndex, "unknown tagger id " + std::to_string(tagger));
  }
  const TaggerHead &head = taggers.heads[tagger];
  if (pair.size() != head.weight.cols()) throw Error(ErrorKind::kShape, "pair vector dimension mismatch");
  Eigen::Vector3d z = head.weight * pair + head.bias;
  detail::softmax_inplace(z.data());
  return z;
}

/// Argmax label; ties resolve toward the smaller label.
inline LinkTag argmax_tag(const double *p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<LinkTag>(best);
}

inline LinkTag predict_link(const Eigen::Vector3d &distribution) {
  return argmax_tag(distribution.data());
}

inline LinkTag predict_link(const Vector &pair, const TaggerParams &taggers, std::size_t tagger) {
  return predict_link(tag_distribution(pair, taggers, tagger));
}

/// All tagger heads stacked into one (3K x pair_dim) map, row 3k+c = head k, class c.
struct StackedHeads {
  Matrix weight;
  Vector bias;
};

inline StackedHeads stack_heads(const TaggerParams &taggers) {
  const auto k = static_cast<Eigen::Index>(taggers.size());
  const auto dp = taggers.heads.front().weight.cols();
  StackedHeads s{Matrix(3 * k, dp), Vector(3 * k)};
  for (Eigen::Index t = 0; t < k; ++t) {
    s.weight.middleRows(3 * t, 3) = taggers.heads[static_cast<std::size_t>(t)].weight;
    s.bias.segment(3 * t, 3) = taggers.heads[static_cast<std::size_t>(t)].bias;
  }
  return s;
}

/// Upper-triangle pair representations (L x pair_dim), rows in flat-index order.
inline Matrix pair_representations(const Matrix &hidden, const KernelParams &kernel) {
  const auto n = hidden.rows();
  const auto d = hidden.cols();
  if (kernel.input_dim() != d) throw Error(ErrorKind::kShape, "kernel input dimension mismatch");
  const Matrix left = hidden * kernel.weight.leftCols(d).transpose();
  const Matrix right = hidden * kernel.weight.rightCols(d).transpose();
  const auto len = static_cast<Eigen::Index>(seq_length(static_cast<std::size_t>(n)));
  Matrix pairs(len, kernel.pair_dim());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      pairs.row(k) = (left.row(i) + right.row(j) + kernel.bias.transpose()).array().tanh();
    }
  }
  return pairs;
}

/// Converts logits (rows x 3K) into per-tagger probabilities in place.
inline void softmax_rows(Matrix &logits) {
  const auto k = logits.cols() / 3;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index t = 0; t < k; ++t) {
      double z[3] = {logits(r, 3 * t), logits(r, 3 * t + 1), logits(r, 3 * t + 2)};
      detail::softmax_inplace(z);
      for (int c = 0; c < 3; ++c) logits(r, 3 * t + c) = z[c];
    }
  }
}

struct SentenceForward {
  Encoding encoding;
  Matrix pairs;  // L x pair_dim
  Matrix probs;  // L x 3K
};

inline SentenceForward forward(std::span<const std::string> tokens, const ModelParams &params,
                               ModelCounters *counters = nullptr) {
  SentenceForward f;
  f.encoding = encode_tokens(tokens, params.encoder, counters);
  f.pairs = pair_representations(f.encoding.hidden, params.kernel);
  if (counters) counters->pairs_scored += static_cast<std::size_t>(f.pairs.rows());
  const StackedHeads heads = stack_heads(params.taggers);
  f.probs = f.pairs * heads.weight.transpose();
  f.probs.rowwise() += heads.bias.transpose();
  softmax_rows(f.probs);
  return f;
}

/// Gold class per (tagger, flat index), taggers in head order.
inline std::vector<const TagSequence *> gold_sequences(const HandshakingTagging &gold) {
  std::vector<const TagSequence *> seqs;
  seqs.reserve(gold.num_sequences());
  seqs.push_back(&gold.eh2et);
  for (const auto &s : gold.sh2oh) seqs.push_back(&s);
  for (const auto &s : gold.st2ot) seqs.push_back(&s);
  return seqs;
}

/// Mean cross-entropy of `probs` (L x 3K) against the gold tagging.
inline double loss(const Matrix &probs, const HandshakingTagging &gold) {
  const auto seqs = gold_sequences(gold);
  const auto len = static_cast<Eigen::Index>(seq_length(gold.n));
  if (probs.rows() != len || probs.cols() != static_cast<Eigen::Index>(3 * seqs.size())) {
    throw Error(ErrorKind::kShape, "prediction shape does not match gold tagging");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < seqs.size(); ++t) {
    for (Eigen::Index l = 0; l < len; ++l) {
      const int g = to_int((*seqs[t])[static_cast<std::size_t>(l)]);
      total -= std::log(std::max(probs(l, static_cast<Eigen::Index>(3 * t) + g), kProbabilityFloor));
    }
  }
  return total / (static_cast<double>(len) * static_cast<double>(seqs.size()));
}

namespace detail {

inline void backprop_recurrence(const Recurrence &rec, Recurrence &grad, const Matrix &inputs,
                                const Matrix &states, const Matrix &d_states, bool reverse,
                                Matrix &d_inputs) {
  const auto n = inputs.rows();
  Vector carry = Vector::Zero(rec.bias.size());
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index t = reverse ? step : n - 1 - step;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    const Vector g = d_states.row(t).transpose() + carry;
    const Vector du = g.array() * (1.0 - states.row(t).transpose().array().square());
    grad.input.noalias() += du * inputs.row(t);
    grad.bias += du;
    if (prev >= 0 && prev < n) grad.recurrent.noalias() += du * states.row(prev);
    d_inputs.row(t).noalias() += (rec.input.transpose() * du).transpose();
    carry.noalias() = rec.recurrent.transpose() * du;
  }
}

}  // namespace detail

/// Adds `scale` times the gradient of this sentence's loss into `grad`; returns the loss.
inline double accumulate_gradient(std::span<const std::string> tokens, const HandshakingTagging &gold,
                                  const ModelParams &params, double scale, ModelParams &grad) {
  const SentenceForward f = forward(tokens, params);
  const double value = loss(f.probs, gold);
  const auto seqs = gold_sequences(gold);
  const auto len = f.pairs.rows();
  const auto k = static_cast<Eigen::Index>(seqs.size());
  const double cell_scale = scale / (static_cast<double>(len) * static_cast<double>(k));

  Matrix d_logits = Matrix::Zero(len, 3 * k);
  for (Eigen::Index t = 0; t < k; ++t) {
    for (Eigen::Index l = 0; l < len; ++l) {
      const int g = to_int((*seqs[static_cast<std::size_t>(t)])[static_cast<std::size_t>(l)]);
      if (f.probs(l, 3 * t + g) < kProbabilityFloor) continue;  // clamped: flat in the logits
      for (int c = 0; c < 3; ++c) {
        d_logits(l, 3 * t + c) = cell_scale * (f.probs(l, 3 * t + c) - (c == g ? 1.0 : 0.0));
      }
    }
  }

  const StackedHeads heads = stack_heads(params.taggers);
  const Matrix d_head_w = d_logits.transpose() * f.pairs;
  const Vector d_head_b = d_logits.colwise().sum().transpose();
  for (Eigen::Index t = 0; t < k; ++t) {
    auto &gh = grad.taggers.heads[static_cast<std::size_t>(t)];
    gh.weight += d_head_w.middleRows(3 * t, 3);
    gh.bias += d_head_b.segment(3 * t, 3);
  }

  const Matrix d_pre =
      ((d_logits * heads.weight).array() * (1.0 - f.pairs.array().square())).matrix();
  grad.kernel.bias += d_pre.colwise().sum().transpose();

  const Matrix &hidden = f.encoding.hidden;
  const auto n = hidden.rows();
  const auto d = hidden.cols();
  Matrix d_left = Matrix::Zero(n, d_pre.cols());
  Matrix d_right = Matrix::Zero(n, d_pre.cols());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++row) {
      d_left.row(i) += d_pre.row(row);
      d_right.row(j) += d_pre.row(row);
    }
  }
  grad.kernel.weight.leftCols(d) += d_left.transpose() * hidden;
  grad.kernel.weight.rightCols(d) += d_right.transpose() * hidden;
  const Matrix d_hidden = d_left * params.kernel.weight.leftCols(d) +
                          d_right * params.kernel.weight.rightCols(d);

  Matrix d_embedded;
  if (params.encoder.mixer) {
    const auto h = params.encoder.mixer->hidden();
    d_embedded = Matrix::Zero(n, params.encoder.embedding_dim());
    detail::backprop_recurrence(params.encoder.mixer->forward, grad.encoder.mixer->forward,
                                f.encoding.embedded, f.encoding.forward, d_hidden.leftCols(h),
                                false, d_embedded);
    detail::backprop_recurrence(params.encoder.mixer->backward, grad.encoder.mixer->backward,
                                f.encoding.embedded, f.encoding.backward, d_hidden.rightCols(h),
                                true, d_embedded);
  } else {
    d_embedded = d_hidden;
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    grad.encoder.embedding.row(static_cast<Eigen::Index>(f.encoding.ids[static_cast<std::size_t>(t)])) +=
        d_embedded.row(t);
  }
  return value;
}

struct TrainingExample {
  std::vector<std::string> tokens;
  HandshakingTagging gold;
};

struct GradientResult {
  double loss = 0.0;
  ModelParams grad;
};

/// Mean batch loss and its exact gradient. Summation follows batch order.
inline GradientResult gradient(std::span<const TrainingExample> batch, const ModelParams &params) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidInput, "gradient of an empty batch");
  GradientResult out{0.0, zeros_like(params)};
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto &ex : batch) {
    if (ex.gold.num_relations() != params.schema.size() || ex.gold.n != ex.tokens.size()) {
      throw Error(ErrorKind::kShape, "training example does not match model schema or sentence length");
    }
    out.loss += scale * accumulate_gradient(ex.tokens, ex.gold, params, scale, out.grad);
  }
  if (!std::isfinite(out.loss)) throw Error(ErrorKind::kNumeric, "non-finite batch loss");
  for (const auto &t : tensors(std::as_const(out.grad))) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t.data[i])) {
        throw Error(ErrorKind::kNumeric, "non-finite gradient in tensor " + t.name);
      }
    }
  }
  return out;
}

/// Mean batch loss without gradients.
inline double batch_loss(std::span<const TrainingExample> batch, const ModelParams &params) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidInput, "loss of an empty batch");
  double total = 0.0;
  for (const auto &ex : batch) total += loss(forward(ex.tokens, params).probs, ex.gold);
  return total / static_cast<double>(batch.size());
}

}  // namespace handshake::model
