// Trainable tensors of the token-pair tagger.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "handshake/core.hpp"

namespace handshake::model {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Token -> id map. Id 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr const char *kUnknownToken = "<unk>";

  Vocabulary() { add(kUnknownToken); }

  explicit Vocabulary(const std::vector<std::string> &tokens) {
    if (tokens.empty() || tokens.front() != kUnknownToken) add(kUnknownToken);
    for (const auto &t : tokens) add(t);
  }

  std::size_t add(const std::string &token) {
    auto [it, inserted] = ids_.emplace(token, tokens_.size());
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  std::size_t id(const std::string &token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnknown : it->second;
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string> &tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

/// One direction of the recurrent context mixer: s_t = tanh(W x_t + U s_prev + b).
struct Recurrence {
  Matrix input;      // hidden x embedding
  Matrix recurrent;  // hidden x hidden
  Vector bias;       // hidden
};

struct ContextMixer {
  Recurrence forward;
  Recurrence backward;

  Eigen::Index hidden() const { return forward.bias.size(); }
};

struct EncoderParams {
  Vocabulary vocab;
  Matrix embedding;  // vocab x embedding_dim
  std::optional<ContextMixer> mixer;

  Eigen::Index embedding_dim() const { return embedding.cols(); }
  /// Dimension of the contextual vectors h_i.
  Eigen::Index output_dim() const {
    return mixer ? 2 * mixer->hidden() : embedding.cols();
  }
};

/// Pair projection h_ij = tanh(W [h_i; h_j] + b).
struct KernelParams {
  Matrix weight;  // pair_dim x 2*d
  Vector bias;    // pair_dim

  Eigen::Index pair_dim() const { return bias.size(); }
  Eigen::Index input_dim() const { return weight.cols() / 2; }
};

struct TaggerHead {
  Matrix weight;  // 3 x pair_dim
  Vector bias;    // 3
};

/// Heads in the order EH-to-ET, SH-to-OH for each relation, ST-to-OT for each relation.
struct TaggerParams {
  std::vector<TaggerHead> heads;

  std::size_t size() const noexcept { return heads.size(); }
  std::size_t num_relations() const noexcept { return heads.empty() ? 0 : (heads.size() - 1) / 2; }

  static constexpr std::size_t entity() noexcept { return 0; }
  static constexpr std::size_t head_link(std::size_t num_relations, RelationId r) noexcept {
    (void)num_relations;
    return 1 + r;
  }
  static constexpr std::size_t tail_link(std::size_t num_relations, RelationId r) noexcept {
    return 1 + num_relations + r;
  }
};

struct ModelConfig {
  Eigen::Index embedding_dim = 32;
  bool context_mixer = true;
  Eigen::Index hidden_dim = 16;  // per direction
  Eigen::Index pair_dim = 32;

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

struct ModelParams {
  RelationSchema schema;
  ModelConfig config;
  EncoderParams encoder;
  KernelParams kernel;
  TaggerParams taggers;

  std::size_t num_taggers() const noexcept { return taggers.size(); }

  void check_shapes() const {
    const auto d = encoder.output_dim();
    auto fail = [](const std::string &what) { throw Error(ErrorKind::kShape, what); };
    if (encoder.embedding.rows() != static_cast<Eigen::Index>(encoder.vocab.size())) {
      fail("embedding rows differ from vocabulary size");
    }
    if (encoder.mixer) {
      const auto h = encoder.mixer->hidden();
      for (const Recurrence *rec : {&encoder.mixer->forward, &encoder.mixer->backward}) {
        if (rec->input.rows() != h || rec->input.cols() != encoder.embedding_dim() ||
            rec->recurrent.rows() != h || rec->recurrent.cols() != h || rec->bias.size() != h) {
          fail("context mixer shapes inconsistent");
        }
      }
    }
    if (kernel.weight.cols() != 2 * d || kernel.weight.rows() != kernel.bias.size()) {
      fail("kernel weight must be pair_dim x 2d");
    }
    if (taggers.size() != 2 * schema.size() + 1) fail("expected 2N+1 tagger heads");
    for (const auto &head : taggers.heads) {
      if (head.weight.rows() != 3 || head.weight.cols() != kernel.pair_dim() || head.bias.size() != 3) {
        fail("tagger head must be 3 x pair_dim");
      }
    }
  }
};

/// Named view over one parameter tensor, in storage order.
struct TensorRef {
  std::string name;
  double *data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
};

struct ConstTensorRef {
  std::string name;
  const double *data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
};

namespace detail {

template <class Params, class Fn>
void visit_tensors(Params &p, Fn &&fn) {
  fn("encoder.embedding", p.encoder.embedding);
  if (p.encoder.mixer) {
    fn("encoder.forward.input", p.encoder.mixer->forward.input);
    fn("encoder.forward.recurrent", p.encoder.mixer->forward.recurrent);
    fn("encoder.forward.bias", p.encoder.mixer->forward.bias);
    fn("encoder.backward.input", p.encoder.mixer->backward.input);
    fn("encoder.backward.recurrent", p.encoder.mixer->backward.recurrent);
    fn("encoder.backward.bias", p.encoder.mixer->backward.bias);
  }
  fn("kernel.weight", p.kernel.weight);
  fn("kernel.bias", p.kernel.bias);
  for (std::size_t t = 0; t < p.taggers.heads.size(); ++t) {
    fn("tagger." + std::to_string(t) + ".weight", p.taggers.heads[t].weight);
    fn("tagger." + std::to_string(t) + ".bias", p.taggers.heads[t].bias);
  }
}

}  // namespace detail

inline std::vector<TensorRef> tensors(ModelParams &p) {
  std::vector<TensorRef> out;
  detail::visit_tensors(p, [&](std::string name, auto &m) {
    out.push_back({std::move(name), m.data(), m.rows(), m.cols()});
  });
  return out;
}

inline std::vector<ConstTensorRef> tensors(const ModelParams &p) {
  std::vector<ConstTensorRef> out;
  detail::visit_tensors(p, [&](std::string name, const auto &m) {
    out.push_back({std::move(name), m.data(), m.rows(), m.cols()});
  });
  return out;
}

inline std::size_t parameter_count(const ModelParams &p) {
  std::size_t total = 0;
  for (const auto &t : tensors(p)) total += static_cast<std::size_t>(t.size());
  return total;
}

inline std::size_t encoder_parameter_count(const ModelParams &p) {
  std::size_t total = 0;
  for (const auto &t : tensors(p)) {
    if (t.name.rfind("encoder.", 0) == 0) total += static_cast<std::size_t>(t.size());
  }
  return total;
}

/// Same structure as `p` with every tensor zeroed; used for gradients and optimizer moments.
inline ModelParams zeros_like(const ModelParams &p) {
  ModelParams z = p;
  for (auto &t : tensors(z)) std::fill(t.data, t.data + t.size(), 0.0);
  return z;
}

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for every tensor, biases included.
inline ModelParams init_params(const RelationSchema &schema, Vocabulary vocab,
                               const ModelConfig &config, std::mt19937_64 &rng) {
  if (config.embedding_dim < 1 || config.pair_dim < 1 ||
      (config.context_mixer && config.hidden_dim < 1)) {
    throw Error(ErrorKind::kInvalidInput, "model dimensions must be >= 1");
  }
  auto fill = [&rng](auto &m, Eigen::Index fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  };

  ModelParams p;
  p.schema = schema;
  p.config = config;
  const auto de = config.embedding_dim;
  p.encoder.vocab = std::move(vocab);
  p.encoder.embedding.resize(static_cast<Eigen::Index>(p.encoder.vocab.size()), de);
  fill(p.encoder.embedding, de);
  if (config.context_mixer) {
    const auto h = config.hidden_dim;
    ContextMixer mixer;
    for (Recurrence *rec : {&mixer.forward, &mixer.backward}) {
      rec->input.resize(h, de);
      rec->recurrent.resize(h, h);
      rec->bias.resize(h);
      fill(rec->input, de + h);
      fill(rec->recurrent, de + h);
      fill(rec->bias, de + h);
    }
    p.encoder.mixer = std::move(mixer);
  }
  const auto d = p.encoder.output_dim();
  p.kernel.weight.resize(config.pair_dim, 2 * d);
  p.kernel.bias.resize(config.pair_dim);
  fill(p.kernel.weight, 2 * d);
  fill(p.kernel.bias, 2 * d);
  p.taggers.heads.resize(2 * schema.size() + 1);
  for (auto &head : p.taggers.heads) {
    head.weight.resize(3, config.pair_dim);
    head.bias.resize(3);
    fill(head.weight, config.pair_dim);
    fill(head.bias, config.pair_dim);
  }
  return p;
}

}  // namespace handshake::model
