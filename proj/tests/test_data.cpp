#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "handshake/data.hpp"

using namespace handshake;
using namespace handshake::data;

TEST(Tokenize, DetachesPunctuation) {
  const auto t = tokenize("Paris, France.");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"Paris", ",", "France", "."}));
  EXPECT_EQ(t.spans[2], (CharSpan{7, 13}));
  EXPECT_EQ(tokenize("Paris, France.", false).tokens, (std::vector<std::string>{"Paris,", "France."}));
  EXPECT_TRUE(tokenize("   ").tokens.empty());
}

TEST(Align, MentionToTokenSpan) {
  const std::string text = "New York City mayor De Blasio";
  const auto spans = tokenize(text).spans;
  EXPECT_EQ(align_spans(text, spans, "De Blasio"), (TokenSpan{4, 5}));
  EXPECT_EQ(align_spans(text, spans, "New York"), (TokenSpan{0, 1}));
  EXPECT_EQ(align_spans(text, spans, "mayor"), (TokenSpan{3, 3}));
  // "York C" stops inside a token
  EXPECT_THROW(align_spans(text, spans, "York C"), Error);
  EXPECT_THROW(align_spans(text, spans, "Boston"), Error);
}

TEST(Align, SkipsOccurrencesInsideTokens) {
  const std::string text = "Newark and New York";
  EXPECT_EQ(align_spans(text, tokenize(text).spans, "New"), (TokenSpan{2, 2}));
}

TEST(Align, CharacterOffsets) {
  const std::string text = "New York City mayor";
  const auto spans = tokenize(text).spans;
  EXPECT_EQ(align_offsets(spans, {0, 13}), (TokenSpan{0, 2}));
  EXPECT_THROW(align_offsets(spans, {1, 13}), Error);
  try {
    align_offsets(spans, {0, 6});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlignment);
  }
}

TEST(Annotate, LastWordVersusWholeSpan) {
  const auto rec = parse_record(nlohmann::json::parse(
      R"({"text": "New York City mayor De Blasio", "triple_list": [["De Blasio", "mayor_of", "New York City"]]})"));
  auto rel = [](const std::string &) -> RelationId { return 0; };
  const auto whole = annotate(rec, AnnotationStandard::kWholeSpan, default_tokenizer(), rel);
  const auto last = annotate(rec, AnnotationStandard::kLastWord, default_tokenizer(), rel);
  EXPECT_EQ(whole.triples, (TripleSet{{{4, 5}, 0, {0, 2}}}));
  EXPECT_EQ(last.triples, (TripleSet{{{5, 5}, 0, {2, 2}}}));
}

TEST(Annotate, MentionForms) {
  const auto rec = parse_record(nlohmann::json::parse(
      R"({"text": "Ada met Bo in Oslo", "triples": [{"subject": [0, 3], "relation": "met", "object": {"text": "Bo"}}, ["Ada", "in", {"char_span": [14, 18]}]]})"));
  ASSERT_EQ(rec.triples.size(), 2u);
  EXPECT_EQ(rec.triples[0].subject.text, "Ada");
  EXPECT_EQ(rec.triples[1].object.text, "Oslo");
  EXPECT_THROW(parse_record(nlohmann::json::parse(R"({"text": "x"})")), Error);
  EXPECT_THROW(parse_record(nlohmann::json::parse(R"({"text": "x", "triple_list": [["x", "r"]]})")), Error);
}

TEST(Load, EmptyFileGivesEmptyDataset) {
  const auto ds = load_dataset(fixtures::temp_file("empty.json", ""));
  EXPECT_TRUE(ds.sentences.empty());
  EXPECT_TRUE(ds.relations.empty());
  EXPECT_TRUE(load_dataset(fixtures::temp_file("empty_array.json", "[]")).sentences.empty());
}

TEST(Load, MissingFileIsIoError) {
  try {
    load_dataset("/nonexistent/data.json");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Load, MalformedLineNamesTheLine) {
  const auto path = fixtures::temp_file("bad.json", std::string(fixtures::kStatsTrain) + "{oops\n");
  try {
    load_dataset(path);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Load, UnalignableRecordStrictVersusLenient) {
  const auto path = fixtures::temp_file(
      "unaligned.json",
      std::string(fixtures::kStatsTrain) +
          R"({"text": "Ada is here .", "triple_list": [["Ada", "new_rel", "Oslo"]]})" + "\n");
  LoadOptions opts;
  const auto lenient = load_dataset(path, opts);
  EXPECT_EQ(lenient.sentences.size(), 1u);
  ASSERT_EQ(lenient.skipped.size(), 1u);
  EXPECT_EQ(lenient.skipped[0].record, 2u);
  EXPECT_EQ(lenient.relations, (std::vector<std::string>{"works_in"}));
  opts.strictness = Strictness::kStrict;
  EXPECT_THROW(load_dataset(path, opts), Error);
}

TEST(Load, UnknownRelationAgainstSchema) {
  const RelationSchema schema({"located_in"});
  LoadOptions opts;
  opts.schema = &schema;
  opts.strictness = Strictness::kStrict;
  try {
    load_dataset(fixtures::temp_file("unknown_rel.json", fixtures::kStatsTrain), opts);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchemaMismatch);
  }
}

TEST(Schema, AcceptedLayouts) {
  const std::vector<std::string> expected{"a", "b"};
  EXPECT_EQ(load_schema(fixtures::temp_file("s1.json", R"(["a", "b"])")).names(), expected);
  EXPECT_EQ(load_schema(fixtures::temp_file("s2.json", R"({"b": 1, "a": 0})")).names(), expected);
  EXPECT_EQ(load_schema(fixtures::temp_file("s3.json", R"([{"0": "a", "1": "b"}, {"a": 0, "b": 1}])")).names(),
            expected);
  EXPECT_THROW(load_schema(fixtures::temp_file("s4.json", R"({"a": 0, "b": 2})")), Error);
  EXPECT_THROW(load_schema(fixtures::temp_file("s5.json", R"({"a": "x"})")), Error);
}

namespace {

SentenceAnnotation with(TripleSet triples) {
  SentenceAnnotation ann;
  ann.tokens = std::vector<std::string>(10, "w");
  ann.triples = std::move(triples);
  return ann;
}

}  // namespace

TEST(Overlap, Patterns) {
  const TokenSpan a{0, 0}, b{2, 3}, c{5, 5}, d{7, 8};
  EXPECT_EQ(classify_overlap(with({{a, 0, b}, {c, 0, d}})), (OverlapPattern{true, false, false}));
  EXPECT_EQ(classify_overlap(with({{a, 0, b}, {a, 1, c}})), (OverlapPattern{false, true, false}));
  EXPECT_EQ(classify_overlap(with({{a, 0, b}, {a, 1, b}})), (OverlapPattern{false, false, true}));
  EXPECT_EQ(classify_overlap(with({{a, 0, b}, {a, 1, b}, {b, 0, c}})), (OverlapPattern{false, true, true}));
  // reversed pair: shares entities but not the ordered pair
  EXPECT_EQ(classify_overlap(with({{a, 0, b}, {b, 1, a}})), (OverlapPattern{false, true, false}));
  EXPECT_EQ(classify_overlap(with({{a, 0, b}})), (OverlapPattern{true, false, false}));
  EXPECT_THROW(classify_overlap(with({})), Error);
}

TEST(Stats, Buckets) {
  EXPECT_EQ(triple_bucket(1), 0u);
  EXPECT_EQ(triple_bucket(4), 3u);
  EXPECT_EQ(triple_bucket(5), 4u);
  EXPECT_EQ(triple_bucket(17), 4u);
  EXPECT_THROW(triple_bucket(0), Error);
}

TEST(Stats, HandCountedFixture) {
  EXPECT_EQ(fixtures::stats_fixture_report(), fixtures::expected_stats());
  const std::string table = format_table("fixture", fixtures::expected_stats());
  EXPECT_NE(table.find("Normal"), std::string::npos);
  EXPECT_NE(table.find("fixture"), std::string::npos);
}
