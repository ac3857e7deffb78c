#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gamesum/corpus.hpp"
#include "gamesum/eval.hpp"
#include "gamesum/oracle.hpp"
#include "gamesum/retriever.hpp"
#include "gamesum/rewriter.hpp"
#include "gamesum/selector.hpp"

namespace gamesum::pipeline {

// Declarative run configuration. Precedence: command-line flags beat
// GAMESUM_* environment variables beat config-file values beat defaults.
struct PipelineConfig {
  std::filesystem::path games;  // dataset file or split directory
  corpus::CorpusPaths corpus_paths;
  std::filesystem::path output_dir = "out";
  corpus::Split split = corpus::Split::all;

  std::string similarity = "token_f1";  // or "embedding"
  oracle::OracleConfig oracle_cfg = oracle::OracleConfig::defaults();

  retriever::LinkerConfig linker;

  std::string encoder_backend = "hash";
  std::size_t encoder_dim = 16;
  std::size_t encoder_max_len = 512;

  selector::SelectorHyper selector_hyper;
  std::string rewriter_backend = "identity";  // or "toy"
  rewriter::RewriterHyper rewriter_hyper;
  rewriter::AblationFlags ablation;

  std::uint64_t seed = 7;
  bool lenient = false;

  static PipelineConfig from_file(const std::filesystem::path& path);
  void apply_env();

  // All problems for the given subcommand, empty when valid.
  std::vector<std::string> validate(const std::string& subcommand) const;
};

// Stage artifact names under output_dir.
inline constexpr const char* kPairsFile = "pairs.jsonl";
inline constexpr const char* kLabelsFile = "labels.jsonl";
inline constexpr const char* kSelectorFile = "selector.json";
inline constexpr const char* kRewriterFile = "rewriter.json";
inline constexpr const char* kSelectedFile = "selected.jsonl";
inline constexpr const char* kLinksDebugFile = "links.debug.jsonl";
inline constexpr const char* kSummariesFile = "summaries.jsonl";
inline constexpr const char* kScoresFile = "scores.json";
inline constexpr const char* kStatsFile = "stats.json";

corpus::StatsReport run_stats(const PipelineConfig& cfg, Diagnostics* diag = nullptr);

struct OracleArtifacts {
  std::vector<oracle::MappedPair> pairs;
  std::vector<oracle::ImportanceLabels> labels;
};
OracleArtifacts run_build_oracle(const PipelineConfig& cfg, Diagnostics* diag = nullptr);

selector::SelectorTrainResult run_train_selector(const PipelineConfig& cfg,
                                                 Diagnostics* diag = nullptr);

std::vector<double> run_train_rewriter(const PipelineConfig& cfg,
                                       Diagnostics* diag = nullptr);

std::vector<rewriter::Summary> run_summarize(const PipelineConfig& cfg,
                                             Diagnostics* diag = nullptr);

eval::EvalReport run_evaluate(const PipelineConfig& cfg, Diagnostics* diag = nullptr);

// Artifact (de)serialization with schema validation, shared across stages.
std::vector<oracle::MappedPair> load_pairs(const std::filesystem::path& path);
std::vector<oracle::ImportanceLabels> load_labels(const std::filesystem::path& path);
std::vector<rewriter::Summary> load_summaries(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path,
                std::span<const oracle::MappedPair> pairs);
void save_labels(const std::filesystem::path& path,
                 std::span<const oracle::ImportanceLabels> labels);
void save_summaries(const std::filesystem::path& path,
                    std::span<const rewriter::Summary> summaries);

}  // namespace gamesum::pipeline
