// Hand-built fixtures shared by the unit tests and the acceptance binary.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "handshake/handshake.hpp"

namespace fixtures {

using namespace handshake;

inline const std::vector<std::string> kMayorTokens = {"New", "York", "City", "mayor", "De", "Blasio"};

inline RelationSchema mayor_schema() { return RelationSchema({"mayor", "born in", "live in"}); }

inline void set(TagSequence &seq, std::size_t i, std::size_t j, LinkTag tag, std::size_t n) {
  seq[seq_index(i, j, n)] = tag;
}

// Entities: New York (0,1), New York City (0,2), De Blasio (4,5).
inline HandshakingTagging mayor_tagging() {
  constexpr std::size_t n = 6;
  HandshakingTagging t(n, 3);
  set(t.eh2et, 0, 1, LinkTag::kForward, n);
  set(t.eh2et, 0, 2, LinkTag::kForward, n);
  set(t.eh2et, 4, 5, LinkTag::kForward, n);
  set(t.sh2oh[0], 0, 4, LinkTag::kForward, n);
  set(t.st2ot[0], 1, 5, LinkTag::kForward, n);
  for (RelationId r : {1u, 2u}) {
    set(t.sh2oh[r], 0, 4, LinkTag::kReversed, n);
    set(t.st2ot[r], 1, 5, LinkTag::kReversed, n);
    set(t.st2ot[r], 2, 5, LinkTag::kReversed, n);
  }
  return t;
}

inline TripleSet mayor_triples() {
  const TokenSpan ny{0, 1}, nyc{0, 2}, dbl{4, 5};
  return {{ny, 0, dbl}, {dbl, 1, ny}, {dbl, 1, nyc}, {dbl, 2, ny}, {dbl, 2, nyc}};
}

inline SentenceAnnotation mayor_annotation() {
  SentenceAnnotation ann;
  ann.tokens = kMayorTokens;
  ann.triples = mayor_triples();
  return ann;
}

// Three test sentences counted by hand: one normal with 1 triple, one SEO
// with 2, one EPO+SEO with 3. Two relations in use, one train sentence.
inline const char *kStatsTest =
    R"({"text": "Rome is in Italy .", "triple_list": [["Rome", "located_in", "Italy"]]}
{"text": "Ada lives in Oslo and works in Bergen .", "triple_list": [["Ada", "located_in", "Oslo"], ["Ada", "works_in", "Bergen"]]}
{"text": "Bo lives and works in Lund near Malmo .", "triple_list": [["Bo", "located_in", "Lund"], ["Bo", "works_in", "Lund"], ["Lund", "located_in", "Malmo"]]}
)";

inline const char *kStatsTrain =
    R"({"text": "Eva works in Turin .", "triple_list": [["Eva", "works_in", "Turin"]]}
)";

inline data::StatsReport expected_stats() {
  data::StatsReport r;
  r.train = 1;
  r.valid = 0;
  r.test = 3;
  r.normal = 1;
  r.seo = 2;
  r.epo = 1;
  r.buckets = {1, 1, 1, 0, 0};
  r.relations = 2;
  return r;
}

/// Writes `content` to a fresh file under the system temp directory.
inline std::string temp_file(const std::string &name, const std::string &content) {
  const auto dir = std::filesystem::temp_directory_path() / "handshake-tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path.string();
}

inline data::StatsReport stats_fixture_report() {
  const RelationSchema schema({"located_in", "works_in"});
  data::LoadOptions opts;
  opts.schema = &schema;
  opts.strictness = Strictness::kStrict;
  data::DatasetSplits splits;
  splits.train = data::load_dataset(temp_file("stats_train.json", kStatsTrain), opts).sentences;
  splits.test = data::load_dataset(temp_file("stats_test.json", kStatsTest), opts).sentences;
  return data::dataset_stats(splits, schema);
}

// 2 predicted, 1 correct, 3 gold.
struct MetricFixture {
  std::vector<TripleSet> predicted, gold;
};

inline MetricFixture metric_fixture() {
  const TokenSpan a{0, 0}, b{2, 3}, c{5, 5}, d{7, 8};
  return {{{{a, 0, b}, {c, 1, d}}}, {{{a, 0, b}, {c, 0, d}, {b, 1, a}}}};
}

// Sentence 1 is perfect, sentence 2 gets nothing right with 3 guesses for 3
// gold triples: micro F1 = 0.25, mean per-sentence F1 = 0.5.
inline MetricFixture micro_macro_fixture() {
  const TokenSpan a{0, 0}, b{1, 1}, c{2, 2}, d{3, 3};
  return {{{{a, 0, b}}, {{a, 1, b}, {b, 1, c}, {c, 1, d}}},
          {{{a, 0, b}}, {{a, 0, c}, {b, 0, d}, {d, 0, a}}}};
}

}  // namespace fixtures
