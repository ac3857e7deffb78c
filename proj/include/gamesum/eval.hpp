#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamesum/corpus.hpp"
#include "gamesum/rewriter.hpp"

namespace gamesum::eval {

struct RougeTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RougeScore {
  RougeTriple rouge1;
  RougeTriple rouge2;
  RougeTriple rougeL;
};

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

// Character-level tokens, the standard granularity for Chinese overlap
// metrics.
Tokenizer char_tokenizer();
Tokenizer word_tokenizer();

// Clipped n-gram overlap precision/recall/F1, n in {1,2}.
RougeTriple rouge_n(const std::string& candidate, const std::string& reference,
                    int n, const Tokenizer& tokenizer = char_tokenizer());

// LCS-based precision/recall/F1.
RougeTriple rouge_l(const std::string& candidate, const std::string& reference,
                    const Tokenizer& tokenizer = char_tokenizer());

RougeScore rouge_score(const std::string& candidate, const std::string& reference,
                       const Tokenizer& tokenizer = char_tokenizer());

struct GameScore {
  std::string game_id;
  RougeScore score;
};

struct EvalReport {
  std::vector<GameScore> per_game;  // ordered by game_id
  RougeScore mean;                  // corpus means of per-game scores
  double avg_rouge = 0.0;           // unweighted mean of the three F1s
};

// Scores each summary against its game's reference news (sentences joined by
// a single space). Errors when a summary has no matching reference game.
EvalReport evaluate_run(std::span<const rewriter::Summary> outputs,
                        std::span<const corpus::GameRecord> references,
                        const Tokenizer& tokenizer = char_tokenizer());

nlohmann::json report_to_json(const EvalReport& report);

// Table-style comparison of several score files against the first entry.
std::string comparison_table(std::span<const std::pair<std::string, double>> labeled_avgs);

}  // namespace gamesum::eval
