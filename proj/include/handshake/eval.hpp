// Micro precision / recall / F1 under partial or exact triple matching, and
// the breakdown by overlap pattern and triplet count.
#pragma once

#include <array>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handshake/core.hpp"
#include "handshake/data.hpp"

namespace handshake::eval {

enum class MatchMode { kPartial, kExact };

inline MatchMode parse_match_mode(const std::string &s) {
  if (s == "partial") return MatchMode::kPartial;
  if (s == "exact") return MatchMode::kExact;
  throw Error(ErrorKind::kInvalidInput, "unknown match mode '" + s + "'");
}

inline const char *to_string(MatchMode m) { return m == MatchMode::kPartial ? "partial" : "exact"; }

/// Relation plus subject and object head tokens.
constexpr bool match_partial(const Triple &pred, const Triple &gold) noexcept {
  return pred.relation == gold.relation && pred.subject.head == gold.subject.head &&
         pred.object.head == gold.object.head;
}

/// Relation plus both full spans.
constexpr bool match_exact(const Triple &pred, const Triple &gold) noexcept {
  return pred.relation == gold.relation && pred.subject == gold.subject && pred.object == gold.object;
}

constexpr bool matches(const Triple &pred, const Triple &gold, MatchMode mode) noexcept {
  return mode == MatchMode::kExact ? match_exact(pred, gold) : match_partial(pred, gold);
}

/// Size of a greedy one-to-one matching. Both match relations compare a fixed
/// key for equality, so greedy pairing is maximum.
inline std::size_t count_correct(const TripleSet &pred, const TripleSet &gold, MatchMode mode) {
  std::vector<bool> used(gold.size(), false);
  std::size_t correct = 0;
  for (const Triple &p : pred) {
    std::size_t g = 0;
    for (auto it = gold.begin(); it != gold.end(); ++it, ++g) {
      if (!used[g] && matches(p, *it, mode)) {
        used[g] = true;
        ++correct;
        break;
      }
    }
  }
  return correct;
}

struct Prf {
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool vacuous = false;  // nothing predicted and nothing gold: scored 1 by convention
};

inline Prf prf_from_counts(std::size_t predicted, std::size_t gold, std::size_t correct) {
  Prf r{predicted, gold, correct, 0.0, 0.0, 0.0, false};
  if (predicted == 0 && gold == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    r.vacuous = true;
    return r;
  }
  if (predicted > 0) r.precision = static_cast<double>(correct) / static_cast<double>(predicted);
  if (gold > 0) r.recall = static_cast<double>(correct) / static_cast<double>(gold);
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

/// Corpus-level scores from pooled counts. A sentence missing a prediction
/// should be passed as an empty set.
inline Prf micro_prf(std::span<const TripleSet> predictions, std::span<const TripleSet> golds,
                     MatchMode mode) {
  if (predictions.size() != golds.size()) {
    throw Error(ErrorKind::kInvalidInput, "prediction and gold lists are not aligned (" +
                                              std::to_string(predictions.size()) + " vs " +
                                              std::to_string(golds.size()) + ")");
  }
  std::size_t predicted = 0, gold = 0, correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    predicted += predictions[i].size();
    gold += golds[i].size();
    correct += count_correct(predictions[i], golds[i], mode);
  }
  return prf_from_counts(predicted, gold, correct);
}

struct EvalReport {
  MatchMode mode = MatchMode::kExact;
  Prf overall;
  std::optional<double> normal, seo, epo;
  std::array<std::optional<double>, data::kNumBuckets> buckets{};
  std::vector<std::string> warnings;
};

/// Micro F1 restricted to every overlap pattern and triplet-count bucket of the gold sentences.
/// An empty subset is reported as absent.
inline EvalReport subset_report(std::span<const TripleSet> predictions,
                                std::span<const SentenceAnnotation> golds, MatchMode mode) {
  if (predictions.size() != golds.size()) {
    throw Error(ErrorKind::kInvalidInput, "prediction and gold lists are not aligned");
  }
  struct Counts {
    std::size_t predicted = 0, gold = 0, correct = 0, sentences = 0;
    void add(const TripleSet &p, const TripleSet &g, MatchMode m) {
      predicted += p.size();
      gold += g.size();
      correct += count_correct(p, g, m);
      ++sentences;
    }
    std::optional<double> f1() const {
      if (sentences == 0) return std::nullopt;
      return prf_from_counts(predicted, gold, correct).f1;
    }
  };
  Counts all, normal, seo, epo;
  std::array<Counts, data::kNumBuckets> buckets{};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const TripleSet &p = predictions[i];
    const TripleSet &g = golds[i].triples;
    all.add(p, g, mode);
    if (g.empty()) continue;
    const data::OverlapPattern pattern = data::classify_overlap(golds[i]);
    if (pattern.normal) normal.add(p, g, mode);
    if (pattern.seo) seo.add(p, g, mode);
    if (pattern.epo) epo.add(p, g, mode);
    buckets[data::triple_bucket(g.size())].add(p, g, mode);
  }
  EvalReport r;
  r.mode = mode;
  r.overall = prf_from_counts(all.predicted, all.gold, all.correct);
  if (r.overall.vacuous) r.warnings.push_back("no gold and no predicted triples; scores set to 1");
  r.normal = normal.f1();
  r.seo = seo.f1();
  r.epo = epo.f1();
  for (std::size_t b = 0; b < data::kNumBuckets; ++b) r.buckets[b] = buckets[b].f1();
  return r;
}

inline nlohmann::ordered_json to_json(const EvalReport &r) {
  auto opt = [](const std::optional<double> &v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["mode"] = to_string(r.mode);
  j["precision"] = r.overall.precision;
  j["recall"] = r.overall.recall;
  j["f1"] = r.overall.f1;
  j["counts"] = {{"predicted", r.overall.predicted}, {"gold", r.overall.gold}, {"correct", r.overall.correct}};
  j["by_pattern"] = {{"normal", opt(r.normal)}, {"seo", opt(r.seo)}, {"epo", opt(r.epo)}};
  for (std::size_t b = 0; b < data::kNumBuckets; ++b) j["by_triplets"][data::bucket_label(b)] = opt(r.buckets[b]);
  j["warnings"] = r.warnings;
  return j;
}

/// Plain-text table: overall P/R/F1, then F1 per pattern and per triplet count (as percentages).
inline std::string format_table(const EvalReport &r, bool by_subset) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  auto pct = [](double v) { return 100.0 * v; };
  os << std::setw(8) << "Match" << std::setw(8) << "Prec." << std::setw(8) << "Rec." << std::setw(8)
     << "F1" << '\n';
  os << std::setw(8) << to_string(r.mode) << std::setw(8) << pct(r.overall.precision) << std::setw(8)
     << pct(r.overall.recall) << std::setw(8) << pct(r.overall.f1) << '\n';
  if (by_subset) {
    const std::vector<std::pair<std::string, std::optional<double>>> cols = {
        {"Normal", r.normal}, {"SEO", r.seo},         {"EPO", r.epo},
        {"N=1", r.buckets[0]}, {"N=2", r.buckets[1]}, {"N=3", r.buckets[2]},
        {"N=4", r.buckets[3]}, {"N>=5", r.buckets[4]}};
    for (const auto &c : cols) os << std::setw(8) << c.first;
    os << '\n';
    for (const auto &c : cols) {
      if (c.second) {
        os << std::setw(8) << pct(*c.second);
      } else {
        os << std::setw(8) << "-";
      }
    }
    os << '\n';
  }
  for (const auto &w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace handshake::eval
