#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "densedex/mips.hpp"
#include "densedex/synth.hpp"
#include "densedex/trainer.hpp"

namespace densedex {

// End-to-end desk run: synth -> train -> encode both sides -> index ->
// search -> eval. Everything is derived from the seed, so the metric JSON
// is identical across runs with the same config.
struct PipelineConfig {
  SynthConfig synth;
  uint32_t vocab_size = 65536;
  size_t batch_size = 26;
  size_t accumulation = 2;
  size_t steps = 2000;
  double lr = 5.0;
  uint64_t seed = 1;
  size_t k = 100;       // retrieval depth; metrics are mrr@10 and recall@100
  size_t shards = 1;
  size_t threads = 1;
  bool skip_train = false;            // random params instead of training
  std::filesystem::path workdir;      // empty = fresh temp dir, removed at end
};

struct PipelineOutcome {
  nlohmann::ordered_json metrics;  // deterministic given config
  LatencyStats search_latency;     // wall-clock; excluded from metrics
  std::filesystem::path workdir;   // where artifacts were written (if kept)
  bool workdir_kept = false;
};

PipelineOutcome run_pipeline(const PipelineConfig& config);

// Encodes a `id<TAB>text` file into a vector store at out_path.
StoreBuildSummary encode_to_store(const std::filesystem::path& texts,
                                  const ToyEncoderParams& params, Role role,
                                  const std::filesystem::path& out_path,
                                  size_t threads = 1, size_t max_len = 0);

}  // namespace densedex
