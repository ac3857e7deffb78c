#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamesum/eval.hpp"
#include "gamesum/jsonio.hpp"
#include "gamesum/pipeline.hpp"

namespace {

using gamesum::Diagnostics;
using gamesum::pipeline::PipelineConfig;

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kRuntimeFailure = 2;

struct CommonFlags {
  std::string config_path;
  std::string games;
  std::string output_dir;
  std::string split;
  long long seed = -1;
  bool lenient = false;
  bool no_segment = false;
  bool no_knowledge = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Pipeline config file (JSON)");
  cmd->add_option("--games", flags.games, "Dataset file or split directory");
  cmd->add_option("--output-dir", flags.output_dir, "Artifact output directory");
  cmd->add_option("--split", flags.split, "train|dev|test|all");
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_flag("--lenient", flags.lenient, "Skip dangling link ids with a diagnostic");
  cmd->add_flag("--no-segment-embeddings", flags.no_segment,
                "Ablation: drop segment embeddings");
  cmd->add_flag("--no-knowledge-embeddings", flags.no_knowledge,
                "Ablation: drop knowledge embeddings");
}

// Flags win over environment variables, which win over the config file.
PipelineConfig resolve_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = PipelineConfig::from_file(flags.config_path);
  } else {
    cfg.apply_env();
  }
  if (!flags.games.empty()) cfg.games = flags.games;
  if (!flags.output_dir.empty()) cfg.output_dir = flags.output_dir;
  if (!flags.split.empty()) {
    const auto split = gamesum::corpus::parse_split(flags.split);
    if (!split.has_value()) {
      throw gamesum::ValidationError("unknown split: " + flags.split);
    }
    cfg.split = *split;
  }
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.lenient) cfg.lenient = true;
  if (flags.no_segment) cfg.ablation.no_segment = true;
  if (flags.no_knowledge) cfg.ablation.no_knowledge = true;
  return cfg;
}

int check_config(const PipelineConfig& cfg, const std::string& subcommand) {
  const std::vector<std::string> problems = cfg.validate(subcommand);
  if (problems.empty()) return kOk;
  std::cerr << "configuration invalid for `" << subcommand << "`:\n";
  for (const std::string& p : problems) std::cerr << "  - " << p << "\n";
  return kValidationFailure;
}

void flush_warnings(const Diagnostics& diag) {
  for (const std::string& w : diag.warnings()) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sports game summarization pipeline: oracle construction, key "
               "sentence selection, knowledge retrieval and rewriting"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> compare_files;

  CLI::App* stats = app.add_subcommand("stats", "Dataset statistics report");
  CLI::App* build_oracle =
      app.add_subcommand("build-oracle", "Map news sentences to commentaries");
  CLI::App* train_selector =
      app.add_subcommand("train-selector", "Train the key-sentence classifier");
  CLI::App* train_rewriter =
      app.add_subcommand("train-rewriter", "Train the rewriting model");
  CLI::App* summarize =
      app.add_subcommand("summarize", "Select, retrieve, rewrite and compose news");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score summaries against references");
  evaluate->add_option("--compare", compare_files,
                       "Score files to diff against this run's scores");
  for (CLI::App* cmd : {stats, build_oracle, train_selector, train_rewriter,
                        summarize, evaluate}) {
    add_common(cmd, flags);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  Diagnostics diag;
  try {
    const PipelineConfig cfg = resolve_config(flags);
    if (const int rc = check_config(cfg, subcommand); rc != kOk) return rc;

    if (subcommand == "stats") {
      const auto report = gamesum::pipeline::run_stats(cfg, &diag);
      flush_warnings(diag);
      std::cout << gamesum::corpus::stats_to_json(report).dump(2) << "\n";
    } else if (subcommand == "build-oracle") {
      const auto artifacts = gamesum::pipeline::run_build_oracle(cfg, &diag);
      flush_warnings(diag);
      std::cout << "wrote " << artifacts.pairs.size() << " pairs and "
                << artifacts.labels.size() << " label rows to "
                << cfg.output_dir.string() << "\n";
    } else if (subcommand == "train-selector") {
      const auto result = gamesum::pipeline::run_train_selector(cfg, &diag);
      flush_warnings(diag);
      std::cout << "selector trained: epochs=" << result.loss_curve.size();
      if (!result.loss_curve.empty()) {
        std::cout << " first_loss=" << result.loss_curve.front()
                  << " last_loss=" << result.loss_curve.back();
      }
      std::cout << " train_accuracy=" << result.train_accuracy << "\n";
    } else if (subcommand == "train-rewriter") {
      const auto curve = gamesum::pipeline::run_train_rewriter(cfg, &diag);
      flush_warnings(diag);
      std::cout << "rewriter trained: epochs=" << curve.size();
      if (!curve.empty()) {
        std::cout << " first_nll=" << curve.front() << " last_nll=" << curve.back();
      }
      std::cout << "\n";
    } else if (subcommand == "summarize") {
      const auto summaries = gamesum::pipeline::run_summarize(cfg, &diag);
      flush_warnings(diag);
      std::cout << "wrote " << summaries.size() << " summaries to "
                << (cfg.output_dir / gamesum::pipeline::kSummariesFile).string()
                << "\n";
    } else if (subcommand == "evaluate") {
      const auto report = gamesum::pipeline::run_evaluate(cfg, &diag);
      flush_warnings(diag);
      std::cout << gamesum::eval::report_to_json(report)["mean"].dump(2) << "\n";
      if (!compare_files.empty()) {
        std::vector<std::pair<std::string, double>> rows;
        rows.emplace_back("this run", report.avg_rouge);
        for (const std::string& file : compare_files) {
          const auto v = gamesum::jsonio::read_json_file(file);
          rows.emplace_back(file, v.at("mean").at("avg").get<double>());
        }
        std::cout << gamesum::eval::comparison_table(rows);
      }
    }
  } catch (const gamesum::ValidationError& e) {
    flush_warnings(diag);
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    flush_warnings(diag);
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}
