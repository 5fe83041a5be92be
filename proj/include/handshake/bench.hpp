// Inference timing: mean wall-clock milliseconds per sample, batched and at
// batch size 1, plus parameter counts.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handshake/core.hpp"
#include "handshake/model/infer.hpp"
#include "handshake/model/params.hpp"

namespace handshake::eval {

struct TimingReport {
  std::size_t batch_size = 0;
  std::size_t samples = 0;
  std::size_t warmup = 0;
  double batched_ms_per_sample = 0.0;
  double single_ms_per_sample = 0.0;
  std::size_t parameters = 0;
  double encoder_proportion = 0.0;
  bool outputs_identical = false;  // batched triples == batch-size-1 triples
};

struct BenchOptions {
  std::size_t batch_size = 24;
  std::size_t warmup = 8;  // samples inferred before timing starts
  model::InferOptions infer;
};

namespace detail {

inline double time_pass(std::span<const std::vector<std::string>> sentences,
                        const model::ModelParams &params, std::size_t batch_size,
                        const model::InferOptions &options, std::vector<TripleSet> &out) {
  out.clear();
  out.reserve(sentences.size());
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t b = 0; b < sentences.size(); b += batch_size) {
    const std::size_t len = std::min(batch_size, sentences.size() - b);
    auto results = model::infer_batch(sentences.subspan(b, len), params, options);
    for (auto &r : results) out.push_back(std::move(r));
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace detail

inline TimingReport bench_inference(const model::ModelParams &params,
                                    std::span<const std::vector<std::string>> sentences,
                                    const BenchOptions &options = {},
                                    std::vector<TripleSet> *triples = nullptr) {
  if (sentences.empty()) throw Error(ErrorKind::kInvalidInput, "benchmark needs a nonempty dataset");
  if (options.batch_size < 1) throw Error(ErrorKind::kInvalidInput, "batch size must be >= 1");
  TimingReport r;
  r.batch_size = options.batch_size;
  r.samples = sentences.size();
  r.warmup = std::min(options.warmup, sentences.size());
  r.parameters = model::parameter_count(params);
  r.encoder_proportion = static_cast<double>(model::encoder_parameter_count(params)) /
                         static_cast<double>(r.parameters);

  std::vector<TripleSet> scratch;
  detail::time_pass(sentences.first(r.warmup), params, options.batch_size, options.infer, scratch);

  std::vector<TripleSet> batched, single;
  const double batched_ms = detail::time_pass(sentences, params, options.batch_size, options.infer, batched);
  const double single_ms = detail::time_pass(sentences, params, 1, options.infer, single);
  const double n = static_cast<double>(sentences.size());
  // A zero reading means the clock did not tick; report its resolution instead.
  const double tick = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::duration(1)).count();
  r.batched_ms_per_sample = std::max(batched_ms, tick) / n;
  r.single_ms_per_sample = std::max(single_ms, tick) / n;
  r.outputs_identical = batched == single;
  if (triples) *triples = std::move(batched);
  return r;
}

inline nlohmann::ordered_json to_json(const TimingReport &r) {
  nlohmann::ordered_json j;
  j["params_all"] = r.parameters;
  j["prop_encoder"] = r.encoder_proportion;
  j["inference_ms_per_sample"] = r.batched_ms_per_sample;
  j["inference_ms_per_sample_batch1"] = r.single_ms_per_sample;
  j["batch_size"] = r.batch_size;
  j["samples"] = r.samples;
  j["warmup"] = r.warmup;
  j["outputs_identical"] = r.outputs_identical;
  return j;
}

inline std::string format_table(const TimingReport &r) {
  char line[256];
  std::string out = "      Params_all  Prop_encoder  Inference Time (ms)\n";
  std::snprintf(line, sizeof line, "%16zu  %11.2f%%  %.3f / %.3f (batch %zu / 1)\n", r.parameters,
                100.0 * r.encoder_proportion, r.batched_ms_per_sample, r.single_ms_per_sample,
                r.batch_size);
  return out + line;
}

}  // namespace handshake::eval
