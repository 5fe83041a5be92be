// Mini-batch training with best-epoch selection on validation F1.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "handshake/codec.hpp"
#include "handshake/core.hpp"
#include "handshake/eval.hpp"
#include "handshake/model/gradient_check.hpp"
#include "handshake/model/infer.hpp"
#include "handshake/model/network.hpp"
#include "handshake/model/optimizer.hpp"
#include "handshake/model/params.hpp"

namespace handshake::model {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 6;
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  bool gradient_check = false;  // finite-difference check of the first batch before training
  std::size_t max_length = kDefaultMaxLength;
  std::optional<double> stop_at_f1;  // stop once the selection F1 reaches this value
  eval::MatchMode selection_match = eval::MatchMode::kExact;
  ModelConfig model;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::kInvalidInput, "learning rate must be > 0");
    if (epochs < 1) throw Error(ErrorKind::kInvalidInput, "epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorKind::kInvalidInput, "batch size must be >= 1");
    if (max_length < 1) throw Error(ErrorKind::kInvalidInput, "max length must be >= 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean per-sentence loss over the epoch's updates
  double f1 = 0.0;        // selection F1 after the epoch

  friend bool operator==(const EpochRecord &, const EpochRecord &) = default;
};

struct TrainResult {
  ModelParams params;  // best selection F1 (earliest epoch on ties)
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_f1 = 0.0;
  bool diverged = false;
  std::string divergence;
  std::size_t truncated_sentences = 0;
  std::size_t encode_conflicts = 0;
  std::optional<GradientCheckReport> gradient_check;
};

/// Training view of one sentence: tokens cut to the window, triples outside it dropped.
inline SentenceAnnotation training_view(const SentenceAnnotation &ann, std::size_t max_length,
                                        bool *truncated = nullptr) {
  if (truncated) *truncated = ann.tokens.size() > max_length;
  if (ann.tokens.size() <= max_length) return ann;
  SentenceAnnotation view;
  view.text = ann.text;
  view.tokens.assign(ann.tokens.begin(), ann.tokens.begin() + static_cast<std::ptrdiff_t>(max_length));
  for (const Triple &t : ann.triples) {
    if (t.subject.tail < max_length && t.object.tail < max_length) view.triples.insert(t);
  }
  return view;
}

inline Vocabulary build_vocabulary(std::span<const SentenceAnnotation> sentences) {
  Vocabulary vocab;
  for (const auto &s : sentences) {
    for (const auto &tok : s.tokens) vocab.add(tok);
  }
  return vocab;
}

inline double selection_f1(const ModelParams &params, std::span<const SentenceAnnotation> sentences,
                           std::size_t max_length, eval::MatchMode mode) {
  std::vector<std::vector<std::string>> tokens;
  std::vector<TripleSet> gold;
  for (const auto &s : sentences) {
    tokens.push_back(s.tokens);
    gold.push_back(s.triples);
  }
  InferOptions options;
  options.max_length = max_length;
  const auto predicted = infer_batch(tokens, params, options);
  return eval::micro_prf(predicted, gold, mode).f1;
}

/// Deterministic for a given seed: one generator drives initialization and shuffling.
inline TrainResult train(std::span<const SentenceAnnotation> dataset, const RelationSchema &schema,
                         const TrainConfig &config,
                         std::span<const SentenceAnnotation> validation = {}) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorKind::kInvalidInput, "training set is empty");
  std::mt19937_64 rng(config.seed);

  TrainResult result;
  std::vector<SentenceAnnotation> views;
  std::vector<TrainingExample> examples;
  views.reserve(dataset.size());
  examples.reserve(dataset.size());
  for (const auto &ann : dataset) {
    bool truncated = false;
    views.push_back(training_view(ann, config.max_length, &truncated));
    result.truncated_sentences += truncated;
    EncodeResult enc = encode(views.back(), schema, Strictness::kLenient);
    result.encode_conflicts += enc.conflicts.size();
    examples.push_back({views.back().tokens, std::move(enc.tagging)});
  }

  ModelParams params = init_params(schema, build_vocabulary(views), config.model, rng);
  Optimizer optimizer(config.optimizer, config.learning_rate, params);
  const std::span<const SentenceAnnotation> selection =
      validation.empty() ? std::span<const SentenceAnnotation>(views) : validation;

  if (config.gradient_check) {
    const std::span<const TrainingExample> first(examples.data(),
                                                 std::min(config.batch_size, examples.size()));
    result.gradient_check = check_gradient(first, params, gradient(first, params).grad);
  }

  result.params = params;
  result.best_f1 = -1.0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TrainingExample> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    const ModelParams before_epoch = params;
    try {
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t end = std::min(order.size(), start + config.batch_size);
        batch.clear();
        for (std::size_t i = start; i < end; ++i) batch.push_back(examples[order[i]]);
        const GradientResult g = gradient(batch, params);
        epoch_loss += g.loss * static_cast<double>(batch.size());
        optimizer.step(params, g.grad);
      }
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kNumeric) throw;
      result.diverged = true;
      result.divergence = "epoch " + std::to_string(epoch) + ": " + e.what();
      params = before_epoch;
      break;
    }
    epoch_loss /= static_cast<double>(examples.size());
    const double f1 = selection_f1(params, selection, config.max_length, config.selection_match);
    result.history.push_back({epoch, epoch_loss, f1});
    if (f1 > result.best_f1) {
      result.best_f1 = f1;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (config.stop_at_f1 && f1 >= *config.stop_at_f1) break;
  }
  if (result.best_epoch == 0) {
    result.params = params;
    result.best_f1 = 0.0;
  }
  return result;
}

}  // namespace handshake::model
