#include "gamesum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "gamesum/text.hpp"

namespace gamesum::oracle {

OracleConfig OracleConfig::defaults() {
  OracleConfig cfg;
  cfg.patterns = {
      // "In the 45th minute", "in the 90+3rd minutes"
      R"([Ii]n\s+the\s+(\d{1,3})(?:\s*\+\s*(\d{1,3}))?\s*(?:st|nd|rd|th|-th)?\s+minutes?)",
      // Chinese form
      R"(第\s*(\d{1,3})(?:\s*\+\s*(\d{1,3}))?\s*分钟)",
  };
  return cfg;
}

std::optional<TimePrefix> extract_time_prefix(const std::string& news_sentence,
                                              const OracleConfig& cfg) {
  const std::vector<text::Token> tokens = text::word_tokens(news_sentence);
  // The prefix may start at the sentence head or after a few connective
  // tokens ("Then, in the 30th minute ...").
  std::vector<std::size_t> anchors;  // byte offsets
  const std::size_t limit = std::min(tokens.size(), cfg.max_leading_tokens + 1);
  for (std::size_t i = 0; i < limit; ++i) {
    anchors.push_back(text::char_to_byte(news_sentence, tokens[i].begin));
  }
  if (anchors.empty()) return std::nullopt;

  std::vector<std::regex> compiled;
  compiled.reserve(cfg.patterns.size());
  for (const std::string& p : cfg.patterns) compiled.emplace_back(p);

  for (std::size_t anchor : anchors) {
    for (const std::regex& re : compiled) {
      std::smatch m;
      const auto begin = news_sentence.cbegin() + static_cast<std::ptrdiff_t>(anchor);
      if (!std::regex_search(begin, news_sentence.cend(), m, re,
                             std::regex_constants::match_continuous)) {
        continue;
      }
      int minute = std::stoi(m[1].str());
      if (m[2].matched) minute += std::stoi(m[2].str());  // additive stoppage time
      TimePrefix prefix;
      prefix.minute = minute;
      const std::size_t byte_begin = anchor + static_cast<std::size_t>(m.position(0));
      const std::size_t byte_end = byte_begin + static_cast<std::size_t>(m.length(0));
      prefix.span_begin = text::char_length(news_sentence.substr(0, byte_begin));
      prefix.span_end = text::char_length(news_sentence.substr(0, byte_end));
      return prefix;
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> candidate_window(int h,
                                          std::span<const corpus::Commentary> commentaries,
                                          int span) {
  // Sorted by t, so the window is one contiguous index range.
  const auto lo = std::lower_bound(
      commentaries.begin(), commentaries.end(), h,
      [](const corpus::Commentary& c, int value) { return c.t < value; });
  const auto hi = std::upper_bound(
      commentaries.begin(), commentaries.end(), h + span,
      [](int value, const corpus::Commentary& c) { return value < c.t; });
  std::vector<std::size_t> out;
  for (auto it = lo; it < hi; ++it) {
    out.push_back(static_cast<std::size_t>(it - commentaries.begin()));
  }
  return out;
}

std::vector<MappedPair> map_article(const corpus::GameRecord& game,
                                    const SentenceSimilarity& sim,
                                    const OracleConfig& cfg) {
  if (game.news.empty()) {
    throw ValidationError("map_article: game " + game.game_id + " has no news");
  }
  std::vector<MappedPair> pairs;
  for (std::size_t i = 0; i < game.news.size(); ++i) {
    const auto prefix = extract_time_prefix(game.news[i], cfg);
    if (!prefix.has_value()) continue;
    const std::vector<std::size_t> window =
        candidate_window(prefix->minute, game.commentaries, cfg.window_span);
    if (window.empty()) continue;
    std::size_t best_index = window.front();
    double best_sim = sim(game.news[i], game.commentaries[best_index].c);
    for (std::size_t k = 1; k < window.size(); ++k) {
      const std::size_t j = window[k];
      const double s = sim(game.news[i], game.commentaries[j].c);
      const bool better =
          s > best_sim ||
          (s == best_sim && game.commentaries[j].t < game.commentaries[best_index].t);
      if (better) {
        best_sim = s;
        best_index = j;
      }
    }
    pairs.push_back({game.game_id, best_index, i, best_sim, prefix->minute});
  }
  return pairs;
}

ImportanceLabels derive_labels(const corpus::GameRecord& game,
                               std::span<const MappedPair> pairs) {
  ImportanceLabels labels;
  labels.game_id = game.game_id;
  labels.labels.assign(game.commentaries.size(), 0);
  for (const MappedPair& pair : pairs) {
    if (pair.game_id != game.game_id) {
      throw ValidationError("derive_labels: pair for game " + pair.game_id +
                            " applied to game " + game.game_id);
    }
    if (pair.commentary_index >= labels.labels.size()) {
      throw ValidationError("derive_labels: commentary index " +
                            std::to_string(pair.commentary_index) +
                            " out of range for game " + game.game_id);
    }
    labels.labels[pair.commentary_index] = 1;
  }
  return labels;
}

namespace {

std::map<std::string, int> token_counts(const std::string& s) {
  std::map<std::string, int> counts;
  for (const auto& t : text::word_tokens(s)) ++counts[t.token];
  return counts;
}

}  // namespace

SentenceSimilarity token_f1_similarity() {
  return [](const std::string& a, const std::string& b) {
    const auto ca = token_counts(a);
    const auto cb = token_counts(b);
    std::size_t total_a = 0;
    std::size_t total_b = 0;
    for (const auto& [t, n] : ca) total_a += static_cast<std::size_t>(n);
    for (const auto& [t, n] : cb) total_b += static_cast<std::size_t>(n);
    if (total_a == 0 || total_b == 0) {
      return total_a == total_b ? 1.0 : 0.0;  // two empty sentences are identical
    }
    std::size_t overlap = 0;
    for (const auto& [t, n] : ca) {
      const auto it = cb.find(t);
      if (it != cb.end()) overlap += static_cast<std::size_t>(std::min(n, it->second));
    }
    if (overlap == 0) return 0.0;
    const double p = static_cast<double>(overlap) / static_cast<double>(total_b);
    const double r = static_cast<double>(overlap) / static_cast<double>(total_a);
    return 2.0 * p * r / (p + r);
  };
}

SentenceSimilarity embedding_similarity(const EncoderBackend& encoder) {
  return [&encoder](const std::string& a, const std::string& b) {
    const auto ta = text::word_token_strings(a);
    const auto tb = text::word_token_strings(b);
    if (ta.empty() || tb.empty()) return ta.size() == tb.size() ? 1.0 : 0.0;
    const auto ea = encoder.encode(ta);
    const auto eb = encoder.encode(tb);
    const auto cosine = [](const nn::Vec& x, const nn::Vec& y) {
      const double nx = std::sqrt(nn::dot(x, x));
      const double ny = std::sqrt(nn::dot(y, y));
      if (nx == 0.0 || ny == 0.0) return 0.0;
      return nn::dot(x, y) / (nx * ny);
    };
    // Greedy matching in both directions, combined as F1.
    double recall = 0.0;
    for (const nn::Vec& va : ea) {
      double best = -1.0;
      for (const nn::Vec& vb : eb) best = std::max(best, cosine(va, vb));
      recall += best;
    }
    recall /= static_cast<double>(ea.size());
    double precision = 0.0;
    for (const nn::Vec& vb : eb) {
      double best = -1.0;
      for (const nn::Vec& va : ea) best = std::max(best, cosine(va, vb));
      precision += best;
    }
    precision /= static_cast<double>(eb.size());
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
  };
}

}  // namespace gamesum::oracle
