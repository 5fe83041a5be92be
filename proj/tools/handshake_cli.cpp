// handshake: command-line front end for encoding, decoding, dataset
// statistics, training, evaluation and benchmarking.
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "handshake/handshake.hpp"
#include "handshake/testing/suites.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kSchemaMismatch = 4,
  kDataError = 5,
  kConflict = 6,
  kNumeric = 7,
};

int exit_code_for(handshake::ErrorKind kind) {
  using handshake::ErrorKind;
  switch (kind) {
    case ErrorKind::kIo: return kIo;
    case ErrorKind::kSchemaMismatch: return kSchemaMismatch;
    case ErrorKind::kConflict: return kConflict;
    case ErrorKind::kNumeric: return kNumeric;
    default: return kDataError;
  }
}

struct RunConfig {
  std::string command;
  std::vector<std::string> data;
  std::string valid;
  std::string standard = "whole-span";
  std::string schema;
  std::string ckpt;
  std::string out = ".";
  std::string mode = "lenient";
  std::string match = "exact";
  std::string tokenizer = "punct";
  std::string name = "dataset";
  bool by_subset = false;
  std::size_t batch_size = 6;
  std::size_t bench_batch_size = 24;
  std::size_t epochs = 100;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  std::string optimizer = "adam";
  long dim = 32;
  long hidden = 16;
  long pair_dim = 32;
  std::string encoder = "birnn";
  double stop_at_f1 = 0.0;
  std::size_t max_length = handshake::model::kDefaultMaxLength;
  std::size_t cases = 2000;
  std::size_t warmup = 8;

  json to_json() const {
    json j;
    j["command"] = command;
    j["data"] = data;
    j["valid"] = valid;
    j["standard"] = standard;
    j["schema"] = schema;
    j["ckpt"] = ckpt;
    j["mode"] = mode;
    j["match"] = match;
    j["tokenizer"] = tokenizer;
    j["by-subset"] = by_subset;
    j["batch-size"] = command == "bench" ? bench_batch_size : batch_size;
    j["epochs"] = epochs;
    j["lr"] = lr;
    j["seed"] = seed;
    j["optimizer"] = optimizer;
    j["dim"] = dim;
    j["hidden"] = hidden;
    j["pair-dim"] = pair_dim;
    j["encoder"] = encoder;
    j["stop-at-f1"] = stop_at_f1;
    j["max-length"] = max_length;
    j["cases"] = cases;
    j["warmup"] = warmup;
    return j;
  }
};

json provenance(const RunConfig &cfg) {
  return {{"tool", "handshake"}, {"command", cfg.command}, {"seed", cfg.seed}, {"config", cfg.to_json()}};
}

/// Applies keys of a JSON config file to options not given on the command line.
class ConfigLayer {
 public:
  template <class T>
  CLI::Option *bind(CLI::App *app, const std::string &flag, T &target, const std::string &help) {
    CLI::Option *opt = app->add_option(flag, target, help);
    const std::string key = opt->get_name(false, true).substr(2);
    setters_[app].push_back({opt, key, [&target](const json &v) { target = v.get<T>(); }});
    return opt;
  }

  CLI::Option *bind_flag(CLI::App *app, const std::string &flag, bool &target, const std::string &help) {
    CLI::Option *opt = app->add_flag(flag, target, help);
    const std::string key = opt->get_name(false, true).substr(2);
    setters_[app].push_back({opt, key, [&target](const json &v) { target = v.get<bool>(); }});
    return opt;
  }

  void apply(CLI::App *app, const std::string &path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw handshake::Error(handshake::ErrorKind::kIo, "cannot open config file " + path);
    json j;
    try {
      in >> j;
    } catch (const json::parse_error &e) {
      throw handshake::Error(handshake::ErrorKind::kParse, path + ": " + e.what());
    }
    for (auto &s : setters_[app]) {
      if (s.option->count() == 0 && j.contains(s.key)) {
        try {
          s.set(j[s.key]);
        } catch (const json::exception &e) {
          throw handshake::Error(handshake::ErrorKind::kParse, "config key '" + s.key + "': " + e.what());
        }
      }
    }
  }

 private:
  struct Setter {
    CLI::Option *option;
    std::string key;
    std::function<void(const json &)> set;
  };
  std::map<CLI::App *, std::vector<Setter>> setters_;
};

handshake::Strictness strictness(const std::string &mode) {
  if (mode == "strict") return handshake::Strictness::kStrict;
  if (mode == "lenient") return handshake::Strictness::kLenient;
  throw handshake::Error(handshake::ErrorKind::kInvalidInput, "unknown mode '" + mode + "'");
}

void write_file(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw handshake::Error(handshake::ErrorKind::kIo, "cannot write " + path.string());
  out << content;
}

void write_json(const fs::path &path, const json &j) { write_file(path, j.dump(2) + "\n"); }

const std::string &single_data(const RunConfig &cfg) {
  if (cfg.data.size() != 1) {
    throw handshake::Error(handshake::ErrorKind::kInvalidInput, "expected exactly one --data path");
  }
  return cfg.data.front();
}

handshake::data::LoadOptions load_options(const RunConfig &cfg, const handshake::RelationSchema *schema) {
  handshake::data::LoadOptions opts;
  opts.standard = handshake::data::parse_standard(cfg.standard);
  opts.strictness = strictness(cfg.mode);
  opts.schema = schema;
  if (cfg.tokenizer == "whitespace") {
    opts.tokenizer = handshake::data::whitespace_tokenizer();
  } else if (cfg.tokenizer != "punct") {
    throw handshake::Error(handshake::ErrorKind::kInvalidInput, "unknown tokenizer '" + cfg.tokenizer + "'");
  }
  return opts;
}

json skipped_json(const std::vector<handshake::data::SkipReport> &skipped) {
  json arr = json::array();
  for (const auto &s : skipped) arr.push_back({{"record", s.record}, {"reason", s.reason}});
  return arr;
}

json triples_json(const handshake::TripleSet &triples, const handshake::RelationSchema &schema,
                  const std::vector<std::string> *tokens) {
  auto mention = [&](const handshake::TokenSpan &s) {
    std::string text;
    for (std::size_t i = s.head; i <= s.tail && tokens && i < tokens->size(); ++i) {
      text += (i == s.head ? "" : " ") + (*tokens)[i];
    }
    return text;
  };
  json arr = json::array();
  for (const auto &t : triples) {
    json jt;
    jt["subject"] = {t.subject.head, t.subject.tail};
    jt["relation"] = schema.name(t.relation);
    jt["object"] = {t.object.head, t.object.tail};
    if (tokens) {
      jt["subject_text"] = mention(t.subject);
      jt["object_text"] = mention(t.object);
    }
    arr.push_back(std::move(jt));
  }
  return arr;
}

// Loads --data with the schema from --schema, or one inferred from the data.
struct LoadedWithSchema {
  handshake::data::LoadedDataset dataset;
  handshake::RelationSchema schema;
};

LoadedWithSchema load_with_schema(const RunConfig &cfg, const std::string &path) {
  if (!cfg.schema.empty()) {
    handshake::RelationSchema schema = handshake::data::load_schema(cfg.schema);
    auto ds = handshake::data::load_dataset(path, load_options(cfg, &schema));
    return {std::move(ds), std::move(schema)};
  }
  auto ds = handshake::data::load_dataset(path, load_options(cfg, nullptr));
  if (ds.relations.empty()) {
    throw handshake::Error(handshake::ErrorKind::kInvalidInput,
                           "no relations found in " + path + "; pass --schema");
  }
  handshake::RelationSchema schema(ds.relations);
  return {std::move(ds), std::move(schema)};
}

int run_encode(const RunConfig &cfg) {
  const auto [dataset, schema] = load_with_schema(cfg, single_data(cfg));
  const auto mode = strictness(cfg.mode);
  const fs::path out(cfg.out);
  std::string taggings, gold;
  json conflicts = json::array();
  std::size_t conflicted_sentences = 0;
  for (std::size_t i = 0; i < dataset.sentences.size(); ++i) {
    const auto &ann = dataset.sentences[i];
    const auto result = handshake::encode(ann, schema, handshake::Strictness::kLenient);
    conflicted_sentences += !result.conflicts.empty();
    for (const auto &c : result.conflicts) {
      json jc{{"sentence", i},
              {"kind", handshake::to_string(c.kind)},
              {"relation", schema.name(c.relation)},
              {"pair", {c.pair.row, c.pair.col}},
              {"kept", handshake::to_int(c.kept)},
              {"rejected", handshake::to_int(c.rejected)}};
      if (c.phantom) jc["phantom"] = triples_json({*c.phantom}, schema, &ann.tokens)[0];
      conflicts.push_back(std::move(jc));
    }
    taggings += handshake::tagging_to_line(result.tagging, schema, ann.tokens) + "\n";
    gold += json{{"triples", triples_json(ann.triples, schema, &ann.tokens)}}.dump() + "\n";
  }
  json report;
  report["provenance"] = provenance(cfg);
  report["relations"] = schema.names();
  report["sentences"] = dataset.sentences.size();
  report["conflicted_sentences"] = conflicted_sentences;
  report["conflicts"] = conflicts;
  report["skipped"] = skipped_json(dataset.skipped);
  write_json(out / "encode_report.json", report);
  if (mode == handshake::Strictness::kStrict && !conflicts.empty()) {
    std::cerr << "error: " << conflicts.size() << " conflict(s) in " << conflicted_sentences
              << " sentence(s); see " << (out / "encode_report.json").string() << '\n';
    return kConflict;
  }
  write_file(out / "taggings.jsonl", taggings);
  write_file(out / "gold.jsonl", gold);
  std::cout << "encoded " << dataset.sentences.size() << " sentence(s), " << conflicts.size()
            << " conflict(s), " << dataset.skipped.size() << " skipped -> " << out.string() << '\n';
  return kOk;
}

int run_decode(const RunConfig &cfg) {
  const std::string &path = single_data(cfg);
  std::ifstream in(path);
  if (!in) throw handshake::Error(handshake::ErrorKind::kIo, "cannot open " + path);
  const auto mode = strictness(cfg.mode);
  std::optional<handshake::RelationSchema> fixed;
  if (!cfg.schema.empty()) fixed = handshake::data::load_schema(cfg.schema);

  handshake::DecodeCounters counters;
  std::string triples;
  std::string line;
  std::size_t line_no = 0, sentences = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto st = handshake::tagging_from_line(line, mode);
      const handshake::RelationSchema schema(st.relations);
      if (fixed && !(*fixed == schema)) {
        throw handshake::Error(handshake::ErrorKind::kSchemaMismatch,
                               "relations differ from --schema");
      }
      const auto decoded = handshake::decode(st.tagging, schema, {mode, &counters});
      const std::vector<std::string> *tokens = st.tokens ? &*st.tokens : nullptr;
      triples += json{{"triples", triples_json(decoded, schema, tokens)}}.dump() + "\n";
      ++sentences;
    } catch (const handshake::Error &e) {
      throw handshake::Error(e.kind(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  const fs::path out(cfg.out);
  write_file(out / "triples.jsonl", triples);
  json report;
  report["provenance"] = provenance(cfg);
  report["sentences"] = sentences;
  report["ignored_entity_reversed_tags"] = counters.ignored_reversed_entities;
  write_json(out / "decode_report.json", report);
  std::cout << "decoded " << sentences << " sentence(s) -> " << (out / "triples.jsonl").string() << '\n';
  return kOk;
}

int run_stats(const RunConfig &cfg) {
  const auto files = handshake::data::locate_splits(single_data(cfg));
  std::optional<handshake::RelationSchema> schema;
  if (!cfg.schema.empty()) schema = handshake::data::load_schema(cfg.schema);
  const auto loaded = handshake::data::load_splits(files, load_options(cfg, schema ? &*schema : nullptr));
  const auto report = handshake::data::dataset_stats(loaded.splits, loaded.schema);
  const std::string table = handshake::data::format_table(cfg.name, report);
  json j;
  j["provenance"] = provenance(cfg);
  j["name"] = cfg.name;
  j["standard"] = cfg.standard;
  j["stats"] = handshake::data::to_json(report);
  j["skipped_records"] = loaded.skipped;
  const fs::path out(cfg.out);
  write_json(out / "stats.json", j);
  write_file(out / "stats.txt", table);
  std::cout << table;
  return kOk;
}

handshake::model::TrainConfig train_config(const RunConfig &cfg) {
  handshake::model::TrainConfig tc;
  tc.learning_rate = cfg.lr;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.seed;
  tc.optimizer = handshake::model::parse_optimizer(cfg.optimizer);
  tc.max_length = cfg.max_length;
  if (cfg.stop_at_f1 > 0.0) tc.stop_at_f1 = cfg.stop_at_f1;
  tc.selection_match = handshake::eval::parse_match_mode(cfg.match);
  tc.model.embedding_dim = cfg.dim;
  tc.model.hidden_dim = cfg.hidden;
  tc.model.pair_dim = cfg.pair_dim;
  if (cfg.encoder == "birnn") {
    tc.model.context_mixer = true;
  } else if (cfg.encoder == "embedding") {
    tc.model.context_mixer = false;
  } else {
    throw handshake::Error(handshake::ErrorKind::kInvalidInput, "unknown encoder '" + cfg.encoder + "'");
  }
  return tc;
}

int run_train(const RunConfig &cfg) {
  const auto [dataset, schema] = load_with_schema(cfg, single_data(cfg));
  std::vector<handshake::SentenceAnnotation> valid;
  if (!cfg.valid.empty()) valid = handshake::data::load_dataset(cfg.valid, load_options(cfg, &schema)).sentences;
  const auto tc = train_config(cfg);
  const auto result = handshake::model::train(dataset.sentences, schema, tc, valid);

  handshake::model::save_checkpoint(cfg.ckpt, {result.params, tc, provenance(cfg)});
  json history = json::array();
  for (const auto &h : result.history) history.push_back({{"epoch", h.epoch}, {"loss", h.loss}, {"f1", h.f1}});
  json j;
  j["provenance"] = provenance(cfg);
  j["best_epoch"] = result.best_epoch;
  j["best_f1"] = result.best_f1;
  j["diverged"] = result.diverged;
  j["divergence"] = result.divergence;
  j["truncated_sentences"] = result.truncated_sentences;
  j["encode_conflicts"] = result.encode_conflicts;
  j["history"] = history;
  write_json(fs::path(cfg.out) / "history.json", j);
  std::cout << "trained " << result.history.size() << " epoch(s); best " << cfg.match << " F1 "
            << result.best_f1 << " at epoch " << result.best_epoch << " -> " << cfg.ckpt << '\n';
  if (result.diverged) {
    std::cerr << "warning: training diverged (" << result.divergence << "); kept last finite parameters\n";
    return kNumeric;
  }
  return kOk;
}

int run_eval(const RunConfig &cfg) {
  const auto ckpt = handshake::model::load_checkpoint(cfg.ckpt);
  const auto ds = handshake::data::load_dataset(single_data(cfg), load_options(cfg, &ckpt.params.schema));
  std::vector<std::vector<std::string>> tokens;
  for (const auto &s : ds.sentences) tokens.push_back(s.tokens);
  handshake::model::InferOptions io;
  io.max_length = ckpt.config.max_length;
  io.strictness = strictness(cfg.mode);
  std::vector<std::string> warnings;
  io.warnings = &warnings;
  const auto predicted = handshake::model::infer_batch(tokens, ckpt.params, io);
  auto report = handshake::eval::subset_report(predicted, ds.sentences,
                                               handshake::eval::parse_match_mode(cfg.match));
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
  const std::string table = handshake::eval::format_table(report, cfg.by_subset);
  json j;
  j["provenance"] = provenance(cfg);
  j["report"] = handshake::eval::to_json(report);
  j["skipped"] = skipped_json(ds.skipped);
  const fs::path out(cfg.out);
  write_json(out / "eval.json", j);
  write_file(out / "eval.txt", table);
  std::cout << table;
  return kOk;
}

int run_bench(const RunConfig &cfg) {
  const auto ckpt = handshake::model::load_checkpoint(cfg.ckpt);
  const auto ds = handshake::data::load_dataset(single_data(cfg), load_options(cfg, &ckpt.params.schema));
  std::vector<std::vector<std::string>> tokens;
  for (const auto &s : ds.sentences) tokens.push_back(s.tokens);
  handshake::eval::BenchOptions bo;
  bo.batch_size = cfg.bench_batch_size;
  bo.warmup = cfg.warmup;
  bo.infer.max_length = ckpt.config.max_length;
  const auto report = handshake::eval::bench_inference(ckpt.params, tokens, bo);
  json j;
  j["provenance"] = provenance(cfg);
  j["timing"] = handshake::eval::to_json(report);
  const fs::path out(cfg.out);
  write_json(out / "bench.json", j);
  const std::string table = handshake::eval::format_table(report);
  write_file(out / "bench.txt", table);
  std::cout << table;
  if (!report.outputs_identical) {
    std::cerr << "error: batched and batch-size-1 outputs differ\n";
    return kFailure;
  }
  return kOk;
}

int run_selftest(const RunConfig &cfg) {
  using namespace handshake::testing;
  const std::vector<SuiteResult> results = {
      seq_length_suite(64),
      roundtrip_suite(cfg.cases, cfg.seed),
      oracle_suite(cfg.cases, cfg.seed + 1),
      gradient_suite(5, cfg.seed + 2),
  };
  bool ok = true;
  for (const auto &r : results) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases";
    if (!r.detail.empty()) std::cout << "; " << r.detail;
    std::cout << ")\n";
    if (!r.passed()) std::cout << "  first failure: " << r.first_failure << '\n';
    ok = ok && r.passed();
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Handshaking token-pair tagging for joint entity and relation extraction"};
  app.require_subcommand(1);
  RunConfig cfg;
  ConfigLayer layer;
  std::string config_path;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "JSON config file; command-line flags take precedence");
    layer.bind(sub, "--seed", cfg.seed, "Random seed");
    layer.bind(sub, "--out", cfg.out, "Output directory");
  };
  auto data_flags = [&](CLI::App *sub) {
    layer.bind(sub, "--data", cfg.data, "Input file (or directory for stats)");
    layer.bind(sub, "--standard", cfg.standard, "Annotation standard")
        ->check(CLI::IsMember({"last-word", "whole-span"}));
    layer.bind(sub, "--tokenizer", cfg.tokenizer, "Tokenizer for raw text")
        ->check(CLI::IsMember({"punct", "whitespace"}));
  };
  auto mode_flag = [&](CLI::App *sub) {
    layer.bind(sub, "--mode", cfg.mode, "Conflict and corrupt-data handling")
        ->check(CLI::IsMember({"strict", "lenient"}));
  };

  CLI::App *encode = app.add_subcommand("encode", "Dataset -> serialized taggings + conflict report");
  common(encode);
  data_flags(encode);
  mode_flag(encode);
  layer.bind(encode, "--schema", cfg.schema, "Relation schema file");

  CLI::App *decode = app.add_subcommand("decode", "Serialized taggings -> triples");
  common(decode);
  layer.bind(decode, "--data", cfg.data, "Taggings file (JSON lines)");
  mode_flag(decode);
  layer.bind(decode, "--schema", cfg.schema, "Expected relation schema");

  CLI::App *stats = app.add_subcommand("stats", "Dataset statistics table");
  common(stats);
  data_flags(stats);
  mode_flag(stats);
  layer.bind(stats, "--schema", cfg.schema, "Relation schema file");
  layer.bind(stats, "--name", cfg.name, "Dataset label for the table");

  CLI::App *train = app.add_subcommand("train", "Dataset -> checkpoint + history");
  common(train);
  data_flags(train);
  mode_flag(train);
  layer.bind(train, "--schema", cfg.schema, "Relation schema file");
  layer.bind(train, "--valid", cfg.valid, "Validation file for model selection");
  layer.bind(train, "--ckpt", cfg.ckpt, "Checkpoint output path");
  layer.bind(train, "--epochs", cfg.epochs, "Training epochs");
  layer.bind(train, "--lr", cfg.lr, "Learning rate");
  layer.bind(train, "--batch-size", cfg.batch_size, "Mini-batch size");
  layer.bind(train, "--optimizer", cfg.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  layer.bind(train, "--dim", cfg.dim, "Embedding dimension");
  layer.bind(train, "--hidden", cfg.hidden, "Context mixer hidden size per direction");
  layer.bind(train, "--pair-dim", cfg.pair_dim, "Token-pair representation size");
  layer.bind(train, "--encoder", cfg.encoder, "birnn or embedding")->check(CLI::IsMember({"birnn", "embedding"}));
  layer.bind(train, "--stop-at-f1", cfg.stop_at_f1, "Stop once selection F1 reaches this value (0: never)");
  layer.bind(train, "--max-length", cfg.max_length, "Maximum sentence length");
  layer.bind(train, "--match", cfg.match, "Match mode for model selection")->check(CLI::IsMember({"partial", "exact"}));

  CLI::App *evaluate = app.add_subcommand("eval", "Checkpoint + dataset -> P/R/F1 report");
  common(evaluate);
  data_flags(evaluate);
  mode_flag(evaluate);
  layer.bind(evaluate, "--ckpt", cfg.ckpt, "Checkpoint path");
  layer.bind(evaluate, "--match", cfg.match, "partial or exact")->check(CLI::IsMember({"partial", "exact"}));
  layer.bind_flag(evaluate, "--by-subset", cfg.by_subset, "Break F1 down by overlap pattern and triplet count");

  CLI::App *bench = app.add_subcommand("bench", "Checkpoint + dataset -> inference timing");
  common(bench);
  data_flags(bench);
  mode_flag(bench);
  layer.bind(bench, "--ckpt", cfg.ckpt, "Checkpoint path");
  layer.bind(bench, "--batch-size", cfg.bench_batch_size, "Batch size for the batched pass");
  layer.bind(bench, "--warmup", cfg.warmup, "Warm-up samples excluded from timing");

  CLI::App *selftest = app.add_subcommand("selftest", "Roundtrip, decoder-oracle and gradient property suites");
  common(selftest);
  layer.bind(selftest, "--cases", cfg.cases, "Random cases per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    CLI::App *sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    layer.apply(sub, config_path);
    if (cfg.command != "selftest" && cfg.data.size() != 1) {
      std::cerr << "error: " << cfg.command << " needs exactly one --data path (flag or config)\n";
      return kUsage;
    }
    if ((cfg.command == "train" || cfg.command == "eval" || cfg.command == "bench") && cfg.ckpt.empty()) {
      std::cerr << "error: " << cfg.command << " needs --ckpt\n";
      return kUsage;
    }
    if (cfg.command == "encode") return run_encode(cfg);
    if (cfg.command == "decode") return run_decode(cfg);
    if (cfg.command == "stats") return run_stats(cfg);
    if (cfg.command == "train") return run_train(cfg);
    if (cfg.command == "eval") return run_eval(cfg);
    if (cfg.command == "bench") return run_bench(cfg);
    return run_selftest(cfg);
  } catch (const handshake::ConflictError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConflict;
  } catch (const handshake::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
