// Randomized property suites shared by the test binaries and `selftest`.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "handshake/codec.hpp"
#include "handshake/data.hpp"
#include "handshake/decoder.hpp"
#include "handshake/model/gradient_check.hpp"
#include "handshake/model/network.hpp"
#include "handshake/testing/generators.hpp"

namespace handshake::testing {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  std::string detail;

  bool passed() const { return cases > 0 && failures == 0; }
};

inline std::string describe(const TripleSet &triples) {
  std::ostringstream os;
  os << '{';
  for (const Triple &t : triples) {
    os << " ((" << t.subject.head << ',' << t.subject.tail << ")," << t.relation << ",(" << t.object.head
       << ',' << t.object.tail << "))";
  }
  os << " }";
  return os.str();
}

/// decode(encode(ann)) == ann.triples over `cases` conflict-free random annotations.
/// Generated annotations with conflicts are redrawn and counted.
inline SuiteResult roundtrip_suite(std::size_t cases, std::uint64_t seed) {
  SuiteResult r{"roundtrip", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::size_t link_conflicts = 0, ambiguous = 0, nested = 0, seo = 0, epo = 0;
  while (r.cases < cases) {
    const std::size_t num_relations = uniform(rng, 1, 4);
    const RelationSchema schema = numbered_schema(num_relations);
    const SentenceAnnotation ann = random_annotation(rng, num_relations);
    const auto conflicts = detect_conflicts(ann, schema);
    if (!conflicts.empty()) {
      bool any_link = false;
      for (const auto &c : conflicts) any_link |= c.kind != EncodeConflict::Kind::kAmbiguousDecode;
      ++(any_link ? link_conflicts : ambiguous);
      continue;
    }
    ++r.cases;
    const auto entities = ann.entities();
    for (auto a = entities.begin(); a != entities.end(); ++a) {
      bool found = false;
      for (auto b = std::next(a); b != entities.end() && !found; ++b) {
        found = b->head <= a->tail;  // ascending heads: overlap means nesting or crossing
      }
      if (found) {
        ++nested;
        break;
      }
    }
    const auto pattern = data::classify_overlap(ann);
    seo += pattern.seo;
    epo += pattern.epo;
    const TripleSet decoded = decode(encode(ann, schema).tagging, schema);
    if (decoded != ann.triples) {
      if (r.failures++ == 0) {
        r.first_failure = "gold " + describe(ann.triples) + " decoded " + describe(decoded);
      }
    }
  }
  std::ostringstream os;
  os << "overlapping-entity cases " << nested << ", SEO " << seo << ", EPO " << epo
     << "; redrawn: link conflicts " << link_conflicts << ", ambiguous " << ambiguous;
  r.detail = os.str();
  return r;
}

/// decode == decode_oracle (lenient) over arbitrary random taggings.
inline SuiteResult oracle_suite(std::size_t cases, std::uint64_t seed) {
  SuiteResult r{"decoder-oracle", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::size_t nonempty = 0;
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = uniform(rng, 1, 10);
    const std::size_t num_relations = uniform(rng, 1, 3);
    const RelationSchema schema = numbered_schema(num_relations);
    const HandshakingTagging tagging = random_tagging(rng, n, num_relations);
    const TripleSet fast = decode(tagging, schema, {Strictness::kLenient, nullptr});
    const TripleSet slow = decode_oracle(tagging, schema, Strictness::kLenient);
    nonempty += !fast.empty();
    if (fast != slow && r.failures++ == 0) {
      r.first_failure = "decode " + describe(fast) + " oracle " + describe(slow);
    }
  }
  r.detail = "nonempty outputs " + std::to_string(nonempty);
  return r;
}

struct GradientInstance {
  std::vector<model::TrainingExample> batch;
  model::ModelParams params;
};

/// Small random instance: n <= 6, N <= 2, embedding and pair dims <= 8.
inline GradientInstance random_gradient_instance(std::mt19937_64 &rng, bool context_mixer = true) {
  const std::size_t num_relations = uniform(rng, 1, 2);
  const RelationSchema schema = numbered_schema(num_relations);
  model::ModelConfig mc;
  mc.embedding_dim = static_cast<Eigen::Index>(uniform(rng, 2, 8));
  mc.context_mixer = context_mixer;
  mc.hidden_dim = static_cast<Eigen::Index>(uniform(rng, 1, 4));
  mc.pair_dim = static_cast<Eigen::Index>(uniform(rng, 2, 8));
  model::Vocabulary vocab;
  for (int i = 0; i < 6; ++i) vocab.add("t" + std::to_string(i));

  GradientInstance inst;
  const std::size_t batch = uniform(rng, 1, 3);
  AnnotationShape shape;
  shape.max_length = 6;
  shape.max_triples = 3;
  for (std::size_t b = 0; b < batch; ++b) {
    SentenceAnnotation ann = random_annotation(rng, num_relations, shape);
    for (auto &tok : ann.tokens) tok = "t" + std::to_string(uniform(rng, 0, 6));  // t6 is unknown
    inst.batch.push_back({ann.tokens, encode(ann, schema, Strictness::kLenient).tagging});
  }
  inst.params = model::init_params(schema, vocab, mc, rng);
  return inst;
}

inline constexpr double kGradientTolerance = 1e-4;

/// Analytic gradient vs central differences (step 1e-5) on every coordinate.
inline SuiteResult gradient_suite(std::size_t instances, std::uint64_t seed) {
  SuiteResult r{"gradient", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t coordinates = 0;
  for (; r.cases < instances; ++r.cases) {
    const GradientInstance inst = random_gradient_instance(rng, r.cases % 2 == 0);
    const auto analytic = model::gradient(inst.batch, inst.params);
    const auto report = model::check_gradient(inst.batch, inst.params, analytic.grad, 1e-5);
    coordinates += report.coordinates;
    worst = std::max(worst, report.max_relative_error);
    if (report.max_relative_error >= kGradientTolerance && r.failures++ == 0) {
      std::ostringstream os;
      os << report.worst.tensor << '[' << report.worst.index << "] analytic " << report.worst.analytic
         << " numeric " << report.worst.numeric << " rel " << report.worst.relative_error;
      r.first_failure = os.str();
    }
  }
  std::ostringstream os;
  os << coordinates << " coordinates, max relative error " << worst;
  r.detail = os.str();
  return r;
}

/// seq_length(n) against direct pair enumeration for n = 1..max_n.
inline SuiteResult seq_length_suite(std::size_t max_n) {
  SuiteResult r{"seq-length", 0, 0, {}, {}};
  for (std::size_t n = 1; n <= max_n; ++n, ++r.cases) {
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) ++pairs;
    }
    if (pairs != seq_length(n) && r.failures++ == 0) {
      r.first_failure = "n=" + std::to_string(n);
    }
  }
  return r;
}

}  // namespace handshake::testing
