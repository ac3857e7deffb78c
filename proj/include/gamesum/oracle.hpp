#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamesum/corpus.hpp"
#include "gamesum/encoder.hpp"

namespace gamesum::oracle {

// Minute parsed from the head of a news sentence, with the character span of
// the matched phrase. Stoppage-time forms ("90+3") parse additively.
struct TimePrefix {
  int minute = 0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
};

// One weak-supervision alignment: news sentence i paired with the
// highest-similarity commentary inside the minute window starting at h_i.
struct MappedPair {
  std::string game_id;
  std::size_t commentary_index = 0;
  std::size_t news_index = 0;
  double similarity = 0.0;
  int minute = 0;  // h_i from the news sentence
};

struct ImportanceLabels {
  std::string game_id;
  std::vector<int> labels;  // one {0,1} per commentary sentence
};

using SentenceSimilarity =
    std::function<double(const std::string&, const std::string&)>;

struct OracleConfig {
  // Regular set for the minute prefix, tried in order. Group 1 is the
  // minute, optional group 2 the stoppage-time addend.
  std::vector<std::string> patterns;
  int window_span = 3;                 // window is [h, h + window_span]
  std::size_t max_leading_tokens = 3;  // connective tokens allowed before the prefix

  static OracleConfig defaults();
};

std::optional<TimePrefix> extract_time_prefix(const std::string& news_sentence,
                                              const OracleConfig& cfg = OracleConfig::defaults());

// Indices of commentaries with t in [h, h + span], in document order.
// Requires commentaries sorted by t.
std::vector<std::size_t> candidate_window(int h,
                                          std::span<const corpus::Commentary> commentaries,
                                          int span = 3);

// Maps each news sentence with a time prefix to the argmax-similarity
// commentary inside its window. Ties break to the smaller t, then the
// smaller index.
std::vector<MappedPair> map_article(const corpus::GameRecord& game,
                                    const SentenceSimilarity& sim,
                                    const OracleConfig& cfg = OracleConfig::defaults());

ImportanceLabels derive_labels(const corpus::GameRecord& game,
                               std::span<const MappedPair> pairs);

// Default similarity: token-level F1 overlap. Symmetric, in [0,1], equals 1
// on identical sentences, and needs no model downloads.
SentenceSimilarity token_f1_similarity();

// Embedding-based adapter in the shape of the usual greedy-matching
// similarity metrics: per-token cosines matched greedily in both directions,
// combined as F1.
SentenceSimilarity embedding_similarity(const EncoderBackend& encoder);

}  // namespace gamesum::oracle
