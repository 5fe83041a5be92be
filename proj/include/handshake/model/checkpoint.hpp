// Self-describing JSON checkpoint: versioned header, schema, vocabulary,
// model/training configuration, and every tensor in storage order.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handshake/model/params.hpp"
#include "handshake/model/train.hpp"

namespace handshake::model {

inline constexpr const char *kCheckpointFormat = "handshake-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline nlohmann::ordered_json to_json(const ModelConfig &c) {
  return {{"embedding_dim", c.embedding_dim},
          {"context_mixer", c.context_mixer},
          {"hidden_dim", c.hidden_dim},
          {"pair_dim", c.pair_dim}};
}

inline ModelConfig model_config_from_json(const nlohmann::ordered_json &j) {
  ModelConfig c;
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.context_mixer = j.value("context_mixer", c.context_mixer);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.pair_dim = j.value("pair_dim", c.pair_dim);
  return c;
}

inline nlohmann::ordered_json to_json(const TrainConfig &c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["optimizer"] = to_string(c.optimizer);
  j["gradient_check"] = c.gradient_check;
  j["max_length"] = c.max_length;
  j["stop_at_f1"] = c.stop_at_f1 ? nlohmann::ordered_json(*c.stop_at_f1) : nlohmann::ordered_json(nullptr);
  j["selection_match"] = eval::to_string(c.selection_match);
  j["model"] = to_json(c.model);
  return j;
}

inline TrainConfig train_config_from_json(const nlohmann::ordered_json &j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
  c.gradient_check = j.value("gradient_check", c.gradient_check);
  c.max_length = j.value("max_length", c.max_length);
  if (j.contains("stop_at_f1") && !j["stop_at_f1"].is_null()) c.stop_at_f1 = j["stop_at_f1"].get<double>();
  if (j.contains("selection_match")) c.selection_match = eval::parse_match_mode(j["selection_match"].get<std::string>());
  if (j.contains("model")) c.model = model_config_from_json(j["model"]);
  return c;
}

struct Checkpoint {
  ModelParams params;
  TrainConfig config;
  nlohmann::ordered_json provenance;  // free-form record of the producing run
};

inline nlohmann::ordered_json checkpoint_to_json(const Checkpoint &ckpt) {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["schema"] = ckpt.params.schema.names();
  j["vocab"] = ckpt.params.encoder.vocab.tokens();
  j["model"] = to_json(ckpt.params.config);
  j["train_config"] = to_json(ckpt.config);
  j["seed"] = ckpt.config.seed;
  j["provenance"] = ckpt.provenance;
  auto &tensors_json = j["tensors"];
  tensors_json = nlohmann::ordered_json::array();
  for (const auto &t : tensors(ckpt.params)) {
    tensors_json.push_back({{"name", t.name},
                            {"rows", t.rows},
                            {"cols", t.cols},
                            {"data", std::vector<double>(t.data, t.data + t.size())}});
  }
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::ordered_json &j) {
  if (j.value("format", std::string()) != kCheckpointFormat) {
    throw Error(ErrorKind::kParse, "not a handshake checkpoint");
  }
  if (j.value("version", 0) != kCheckpointVersion) {
    throw Error(ErrorKind::kParse, "unsupported checkpoint version " + std::to_string(j.value("version", 0)));
  }
  Checkpoint ckpt;
  ckpt.config = train_config_from_json(j.at("train_config"));
  ckpt.provenance = j.value("provenance", nlohmann::ordered_json::object());
  const ModelConfig mc = model_config_from_json(j.at("model"));
  const RelationSchema schema(j.at("schema").get<std::vector<std::string>>());
  const Vocabulary vocab(j.at("vocab").get<std::vector<std::string>>());
  // Shapes come from a seeded init; values are then overwritten.
  std::mt19937_64 rng(0);
  ckpt.params = init_params(schema, vocab, mc, rng);
  auto refs = tensors(ckpt.params);
  const auto &stored = j.at("tensors");
  if (stored.size() != refs.size()) throw Error(ErrorKind::kShape, "checkpoint tensor count mismatch");
  for (std::size_t t = 0; t < refs.size(); ++t) {
    const auto &s = stored[t];
    if (s.at("name").get<std::string>() != refs[t].name || s.at("rows").get<Eigen::Index>() != refs[t].rows ||
        s.at("cols").get<Eigen::Index>() != refs[t].cols) {
      throw Error(ErrorKind::kShape, "checkpoint tensor " + refs[t].name + " has unexpected name or shape");
    }
    const auto data = s.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != refs[t].size()) {
      throw Error(ErrorKind::kShape, "checkpoint tensor " + refs[t].name + " has wrong element count");
    }
    std::copy(data.begin(), data.end(), refs[t].data);
  }
  ckpt.params.check_shapes();
  return ckpt;
}

inline void save_checkpoint(const std::string &path, const Checkpoint &ckpt) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint " + path);
  out << checkpoint_to_json(ckpt).dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace handshake::model
