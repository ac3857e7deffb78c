#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gamesum/common.hpp"

namespace gamesum::corpus {

// One timestamped live-commentary entry: minute on the game clock, the score
// at that moment and the commentary sentence. The score is parsed and kept
// for round-trips but no model stage consumes it.
struct Commentary {
  int t = 0;
  std::string s;
  std::string c;
  nlohmann::json extra = nlohmann::json::object();  // unknown input fields
};

struct GameRecord {
  std::string game_id;
  std::vector<Commentary> commentaries;  // sorted non-decreasing by t
  std::vector<std::string> news;         // empty only for inference-time games
  nlohmann::json extra = nlohmann::json::object();
};

// Structured player description: ordered (aspect, value) pairs.
struct KnowledgeCard {
  std::string player_id;
  std::string title;
  std::vector<std::pair<std::string, std::string>> attributes;
  nlohmann::json extra = nlohmann::json::object();
};

// A player passage or team article: title plus its sentences.
struct Passage {
  std::string entity_id;
  std::string title;
  std::vector<std::string> sentences;
  nlohmann::json extra = nlohmann::json::object();
};

using PlayerPassage = Passage;
using TeamArticle = Passage;

struct GameLinks {
  std::string game_id;
  std::vector<std::string> team_ids;
  std::vector<std::string> player_ids;
  nlohmann::json extra = nlohmann::json::object();
};

// Team articles and player passages plus the game -> entity link relations.
// Immutable after loading; safe to share across concurrent readers.
struct KnowledgeCorpus {
  std::map<std::string, Passage> players;
  std::map<std::string, Passage> teams;
  std::map<std::string, GameLinks> game_links;
};

// Game-scoped retrieval pool: the passages/articles a game's links point at.
struct CandidateSet {
  std::vector<Passage> players;
  std::vector<Passage> teams;
};

struct FieldStats {
  double mean = 0.0;
  double p95 = 0.0;  // nearest-rank 95th percentile
};

struct StatsReport {
  std::size_t example_count = 0;
  FieldStats news_tokens, news_words, news_sentences;
  FieldStats commentary_tokens, commentary_words, commentary_sentences;
};

// Pluggable counters for the stats report. The defaults are a CJK-aware
// fine-grained splitter (tokens) and a whitespace-and-punctuation splitter
// (words); exact replication of any particular pretrained tokenizer is out
// of scope.
struct TokenCounter {
  std::function<std::size_t(const std::string&)> tokens;
  std::function<std::size_t(const std::string&)> words;
  static TokenCounter defaults();
};

enum class Split { train, dev, test, all };

std::optional<Split> parse_split(const std::string& name);
std::string split_name(Split split);

// Loads games from a .jsonl file, or from <split>.jsonl under a directory.
// Invariant violations are rejected with positional diagnostics.
std::vector<GameRecord> load_dataset(const std::filesystem::path& path,
                                     Split split = Split::all,
                                     Diagnostics* diag = nullptr);
void save_dataset(const std::filesystem::path& path, std::span<const GameRecord> games);

nlohmann::json game_to_json(const GameRecord& game);
GameRecord game_from_json(const nlohmann::json& value, const std::string& where);

// Templates one sentence per non-empty attribute, in attribute order.
Passage card_to_passage(const KnowledgeCard& card);

struct CorpusPaths {
  std::filesystem::path players;  // players.jsonl (optional when cards given)
  std::filesystem::path cards;    // cards.jsonl (templated into passages)
  std::filesystem::path teams;    // teams.jsonl
  std::filesystem::path links;    // links.jsonl
};

// Loads the knowledge corpus. Dangling ids in link relations are fatal unless
// lenient, in which case they are dropped with a diagnostic.
KnowledgeCorpus load_corpus(const CorpusPaths& paths, bool lenient = false,
                            Diagnostics* diag = nullptr);

// Exactly the passages/articles referenced by the game's link relations, in
// link-relation order.
CandidateSet candidate_knowledge(const std::string& game_id,
                                 const KnowledgeCorpus& corpus,
                                 bool lenient = false,
                                 Diagnostics* diag = nullptr);

StatsReport corpus_stats(std::span<const GameRecord> dataset,
                         const TokenCounter& counter = TokenCounter::defaults());

nlohmann::json stats_to_json(const StatsReport& report);

// ceil(0.95 * N)-th order statistic (nearest-rank).
double nearest_rank_p95(std::vector<double> values);

}  // namespace gamesum::corpus
