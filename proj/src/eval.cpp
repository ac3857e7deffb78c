#include "gamesum/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include "gamesum/text.hpp"

namespace gamesum::eval {

using nlohmann::json;

Tokenizer char_tokenizer() {
  return [](const std::string& s) { return text::char_token_strings(s); };
}

Tokenizer word_tokenizer() {
  return [](const std::string& s) { return text::word_token_strings(s); };
}

namespace {

double f1_of(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<std::string, int> counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';  // unit separator, cannot appear inside a token
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

RougeTriple rouge_n(const std::string& candidate, const std::string& reference,
                    int n, const Tokenizer& tokenizer) {
  if (n != 1 && n != 2) throw ValidationError("rouge_n: n must be 1 or 2");
  const auto ref_tokens = tokenizer(reference);
  if (ref_tokens.empty()) throw ValidationError("rouge_n: empty reference");
  const auto cand_tokens = tokenizer(candidate);
  const auto ref_counts = ngram_counts(ref_tokens, n);
  const auto cand_counts = ngram_counts(cand_tokens, n);
  std::size_t ref_total = 0;
  std::size_t cand_total = 0;
  for (const auto& [g, c] : ref_counts) ref_total += static_cast<std::size_t>(c);
  for (const auto& [g, c] : cand_counts) cand_total += static_cast<std::size_t>(c);
  // Clipped overlap: each n-gram counts at most min(candidate, reference).
  std::size_t overlap = 0;
  for (const auto& [g, c] : ref_counts) {
    const auto it = cand_counts.find(g);
    if (it != cand_counts.end()) {
      overlap += static_cast<std::size_t>(std::min(c, it->second));
    }
  }
  RougeTriple t;
  t.precision = cand_total == 0 ? 0.0
                                : static_cast<double>(overlap) /
                                      static_cast<double>(cand_total);
  t.recall = ref_total == 0
                 ? 0.0
                 : static_cast<double>(overlap) / static_cast<double>(ref_total);
  t.f1 = f1_of(t.precision, t.recall);
  return t;
}

RougeTriple rouge_l(const std::string& candidate, const std::string& reference,
                    const Tokenizer& tokenizer) {
  const auto ref = tokenizer(reference);
  if (ref.empty()) throw ValidationError("rouge_l: empty reference");
  const auto cand = tokenizer(candidate);
  // Two-row LCS length DP.
  std::vector<std::size_t> prev(cand.size() + 1, 0);
  std::vector<std::size_t> cur(cand.size() + 1, 0);
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = 0;
    for (std::size_t j = 1; j <= cand.size(); ++j) {
      if (ref[i - 1] == cand[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[cand.size()]);
  RougeTriple t;
  t.precision = cand.empty() ? 0.0 : lcs / static_cast<double>(cand.size());
  t.recall = lcs / static_cast<double>(ref.size());
  t.f1 = f1_of(t.precision, t.recall);
  return t;
}

RougeScore rouge_score(const std::string& candidate, const std::string& reference,
                       const Tokenizer& tokenizer) {
  RougeScore s;
  s.rouge1 = rouge_n(candidate, reference, 1, tokenizer);
  s.rouge2 = rouge_n(candidate, reference, 2, tokenizer);
  s.rougeL = rouge_l(candidate, reference, tokenizer);
  return s;
}

EvalReport evaluate_run(std::span<const rewriter::Summary> outputs,
                        std::span<const corpus::GameRecord> references,
                        const Tokenizer& tokenizer) {
  std::map<std::string, const corpus::GameRecord*> by_id;
  for (const auto& game : references) by_id[game.game_id] = &game;

  EvalReport report;
  for (const rewriter::Summary& summary : outputs) {
    const auto it = by_id.find(summary.game_id);
    if (it == by_id.end()) {
      throw ValidationError("evaluate_run: no reference for game_id " +
                            summary.game_id);
    }
    const std::string reference =
        rewriter::compose_news(it->second->news);
    if (reference.empty()) {
      throw ValidationError("evaluate_run: reference news empty for game_id " +
                            summary.game_id);
    }
    const std::string candidate = summary.article.empty()
                                      ? rewriter::compose_news(summary.sentences)
                                      : summary.article;
    report.per_game.push_back({summary.game_id,
                               rouge_score(candidate, reference, tokenizer)});
  }
  std::sort(report.per_game.begin(), report.per_game.end(),
            [](const GameScore& a, const GameScore& b) {
              return a.game_id < b.game_id;
            });
  const double n = static_cast<double>(report.per_game.size());
  if (n > 0) {
    for (const GameScore& g : report.per_game) {
      report.mean.rouge1.precision += g.score.rouge1.precision / n;
      report.mean.rouge1.recall += g.score.rouge1.recall / n;
      report.mean.rouge1.f1 += g.score.rouge1.f1 / n;
      report.mean.rouge2.precision += g.score.rouge2.precision / n;
      report.mean.rouge2.recall += g.score.rouge2.recall / n;
      report.mean.rouge2.f1 += g.score.rouge2.f1 / n;
      report.mean.rougeL.precision += g.score.rougeL.precision / n;
      report.mean.rougeL.recall += g.score.rougeL.recall / n;
      report.mean.rougeL.f1 += g.score.rougeL.f1 / n;
    }
    report.avg_rouge =
        (report.mean.rouge1.f1 + report.mean.rouge2.f1 + report.mean.rougeL.f1) / 3.0;
  }
  return report;
}

namespace {

json triple_to_json(const RougeTriple& t) {
  return json{{"p", t.precision}, {"r", t.recall}, {"f", t.f1}};
}

}  // namespace

json report_to_json(const EvalReport& report) {
  json per_game = json::array();
  for (const GameScore& g : report.per_game) {
    per_game.push_back(json{{"game_id", g.game_id},
                            {"rouge1", triple_to_json(g.score.rouge1)},
                            {"rouge2", triple_to_json(g.score.rouge2)},
                            {"rougeL", triple_to_json(g.score.rougeL)}});
  }
  return json{{"per_game", per_game},
              {"mean",
               {{"rouge1", report.mean.rouge1.f1},
                {"rouge2", report.mean.rouge2.f1},
                {"rougeL", report.mean.rougeL.f1},
                {"avg", report.avg_rouge}}}};
}

std::string comparison_table(
    std::span<const std::pair<std::string, double>> labeled_avgs) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "Model"
      << "Avg. Rouge/Delta\n";
  for (std::size_t i = 0; i < labeled_avgs.size(); ++i) {
    const auto& [label, avg] = labeled_avgs[i];
    out << std::left << std::setw(28) << label << std::fixed
        << std::setprecision(2) << 100.0 * avg;
    if (i > 0) {
      out << "/" << std::showpos << 100.0 * (avg - labeled_avgs.front().second)
          << std::noshowpos;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace gamesum::eval
