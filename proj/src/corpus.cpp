#include "gamesum/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gamesum/jsonio.hpp"
#include "gamesum/text.hpp"

namespace gamesum::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json extra_fields(const json& value, std::initializer_list<const char*> known) {
  json extra = json::object();
  for (auto it = value.begin(); it != value.end(); ++it) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return it.key() == k;
        }) == known.end()) {
      extra[it.key()] = it.value();
    }
  }
  return extra;
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ValidationError(where + ": " + what);
}

std::string field_string(const json& v, const char* key, const std::string& where) {
  require(v.contains(key) && v[key].is_string(), where,
          std::string("missing or non-string field \"") + key + "\"");
  return v[key].get<std::string>();
}

}  // namespace

std::optional<Split> parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  if (name == "all") return Split::all;
  return std::nullopt;
}

std::string split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    case Split::all: return "all";
  }
  return "all";
}

GameRecord game_from_json(const json& value, const std::string& where) {
  require(value.is_object(), where, "record is not a JSON object");
  GameRecord game;
  game.game_id = field_string(value, "game_id", where);
  require(!game.game_id.empty(), where, "empty game_id");
  require(value.contains("commentaries") && value["commentaries"].is_array(),
          where, "missing commentaries array (game_id=" + game.game_id + ")");
  const std::string at = where + " (game_id=" + game.game_id + ")";
  int prev_t = -1;
  for (const json& cj : value["commentaries"]) {
    require(cj.is_object(), at, "commentary entry is not an object");
    Commentary c;
    require(cj.contains("t") && cj["t"].is_number_integer(), at,
            "commentary missing integer field \"t\"");
    c.t = cj["t"].get<int>();
    require(c.t >= 0, at, "negative timeline minute");
    c.s = cj.contains("s") ? field_string(cj, "s", at) : std::string{};
    c.c = field_string(cj, "c", at);
    require(!text::trim(c.c).empty(), at, "empty commentary sentence");
    require(c.t >= prev_t, at, "commentaries out of time order");
    prev_t = c.t;
    c.extra = extra_fields(cj, {"t", "s", "c"});
    game.commentaries.push_back(std::move(c));
  }
  require(!game.commentaries.empty(), at, "game has no commentaries");
  if (value.contains("news")) {
    require(value["news"].is_array(), at, "news is not an array");
    for (const json& n : value["news"]) {
      require(n.is_string(), at, "news entry is not a string");
      game.news.push_back(n.get<std::string>());
    }
  }
  game.extra = extra_fields(value, {"game_id", "commentaries", "news"});
  return game;
}

json game_to_json(const GameRecord& game) {
  json value = game.extra;
  value["game_id"] = game.game_id;
  json commentaries = json::array();
  for (const Commentary& c : game.commentaries) {
    json cj = c.extra;
    cj["t"] = c.t;
    cj["s"] = c.s;
    cj["c"] = c.c;
    commentaries.push_back(std::move(cj));
  }
  value["commentaries"] = std::move(commentaries);
  value["news"] = game.news;
  return value;
}

namespace {

std::vector<GameRecord> load_games_file(const fs::path& file, Diagnostics* diag,
                                        std::set<std::string>& seen_ids) {
  const std::vector<json> lines = jsonio::read_jsonl(file);
  if (lines.empty()) {
    warn_to(diag, "dataset file is empty: " + file.string());
  }
  std::vector<GameRecord> games;
  games.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = file.string() + ":" + std::to_string(i + 1);
    GameRecord game = game_from_json(lines[i], where);
    if (!seen_ids.insert(game.game_id).second) {
      throw ValidationError(where + ": duplicate game_id " + game.game_id);
    }
    games.push_back(std::move(game));
  }
  return games;
}

}  // namespace

std::vector<GameRecord> load_dataset(const fs::path& path, Split split,
                                     Diagnostics* diag) {
  std::set<std::string> seen_ids;
  if (fs::is_directory(path)) {
    std::vector<GameRecord> games;
    const std::vector<Split> wanted =
        split == Split::all ? std::vector<Split>{Split::train, Split::dev, Split::test}
                            : std::vector<Split>{split};
    bool found_any = false;
    for (Split s : wanted) {
      const fs::path file = path / (split_name(s) + ".jsonl");
      if (!fs::exists(file)) {
        if (split != Split::all) {
          throw ValidationError("missing dataset file: " + file.string());
        }
        continue;
      }
      found_any = true;
      std::vector<GameRecord> part = load_games_file(file, diag, seen_ids);
      games.insert(games.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    if (!found_any) {
      throw ValidationError("no split files under " + path.string());
    }
    return games;
  }
  if (!fs::exists(path)) {
    throw ValidationError("missing dataset file: " + path.string());
  }
  return load_games_file(path, diag, seen_ids);
}

void save_dataset(const fs::path& path, std::span<const GameRecord> games) {
  std::vector<json> lines;
  lines.reserve(games.size());
  for (const GameRecord& game : games) lines.push_back(game_to_json(game));
  jsonio::write_jsonl_atomic(path, lines);
}

namespace {

// One fixed template per known aspect of the source schema; anything else
// falls back to the generic form.
const std::vector<std::pair<std::string, std::string>>& aspect_templates() {
  static const std::vector<std::pair<std::string, std::string>> kTemplates = {
      {"name", "{title}'s name is {value}"},
      {"birthday", "{title}'s birthday is {value}"},
      {"age", "{title} is {value} years old"},
      {"height", "{title} is {value} tall"},
      {"weight", "{title} weighs {value}"},
      {"nationality", "{title} comes from {value}"},
      {"position", "{title} plays as {value}"},
      {"club", "{title} plays for {value}"},
      {"number", "{title} wears number {value}"},
      {"previous_clubs", "{title} previously played for {value}"},
  };
  return kTemplates;
}

std::string fill_template(std::string tpl, const std::string& title,
                          const std::string& value) {
  const auto replace_all = [&tpl](const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = tpl.find(from, pos)) != std::string::npos) {
      tpl.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("{title}", title);
  replace_all("{value}", value);
  return tpl;
}

}  // namespace

Passage card_to_passage(const KnowledgeCard& card) {
  if (text::trim(card.title).empty()) {
    throw ValidationError("card_to_passage: empty title (player_id=" +
                          card.player_id + ")");
  }
  Passage passage;
  passage.entity_id = card.player_id;
  passage.title = card.title;
  for (const auto& [aspect, value] : card.attributes) {
    if (text::trim(value).empty()) continue;  // skip empty-valued attributes
    std::string tpl = "{title}'s " + aspect + " is {value}";
    for (const auto& [known, known_tpl] : aspect_templates()) {
      if (aspect == known) {
        tpl = known_tpl;
        break;
      }
    }
    passage.sentences.push_back(fill_template(tpl, card.title, value));
  }
  if (passage.sentences.empty()) {
    throw ValidationError("card_to_passage: card has no non-empty attributes (" +
                          card.title + ")");
  }
  return passage;
}

namespace {

Passage passage_from_json(const json& value, const char* id_key,
                          const std::string& where) {
  Passage p;
  p.entity_id = field_string(value, id_key, where);
  p.title = field_string(value, "title", where);
  require(!text::trim(p.title).empty(), where, "empty title");
  require(value.contains("sentences") && value["sentences"].is_array(), where,
          "missing sentences array");
  for (const json& s : value["sentences"]) {
    require(s.is_string(), where, "sentence is not a string");
    p.sentences.push_back(s.get<std::string>());
  }
  require(!p.sentences.empty(), where, "passage has no sentences");
  p.extra = extra_fields(value, {id_key, "title", "sentences"});
  return p;
}

KnowledgeCard card_from_json(const json& value, const std::string& where) {
  KnowledgeCard card;
  card.player_id = field_string(value, "player_id", where);
  card.title = field_string(value, "title", where);
  require(value.contains("attributes") && value["attributes"].is_array(), where,
          "missing attributes array");
  for (const json& a : value["attributes"]) {
    require(a.is_array() && a.size() == 2 && a[0].is_string() && a[1].is_string(),
            where, "attribute is not a [name, value] pair");
    card.attributes.emplace_back(a[0].get<std::string>(), a[1].get<std::string>());
  }
  card.extra = extra_fields(value, {"player_id", "title", "attributes"});
  return card;
}

}  // namespace

KnowledgeCorpus load_corpus(const CorpusPaths& paths, bool lenient,
                            Diagnostics* diag) {
  KnowledgeCorpus corpus;
  if (!paths.players.empty() && fs::exists(paths.players)) {
    const auto lines = jsonio::read_jsonl(paths.players);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string where = paths.players.string() + ":" + std::to_string(i + 1);
      Passage p = passage_from_json(lines[i], "player_id", where);
      if (!corpus.players.emplace(p.entity_id, p).second) {
        throw ValidationError(where + ": duplicate player_id " + p.entity_id);
      }
    }
  }
  if (!paths.cards.empty() && fs::exists(paths.cards)) {
    const auto lines = jsonio::read_jsonl(paths.cards);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string where = paths.cards.string() + ":" + std::to_string(i + 1);
      const KnowledgeCard card = card_from_json(lines[i], where);
      if (corpus.players.count(card.player_id) != 0) continue;  // passage wins
      corpus.players.emplace(card.player_id, card_to_passage(card));
    }
  }
  if (!paths.teams.empty()) {
    const auto lines = jsonio::read_jsonl(paths.teams);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string where = paths.teams.string() + ":" + std::to_string(i + 1);
      Passage t = passage_from_json(lines[i], "team_id", where);
      if (!corpus.teams.emplace(t.entity_id, t).second) {
        throw ValidationError(where + ": duplicate team_id " + t.entity_id);
      }
    }
  }
  if (!paths.links.empty()) {
    const auto lines = jsonio::read_jsonl(paths.links);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string where = paths.links.string() + ":" + std::to_string(i + 1);
      GameLinks links;
      links.game_id = field_string(lines[i], "game_id", where);
      for (const char* key : {"team_ids", "player_ids"}) {
        require(lines[i].contains(key) && lines[i][key].is_array(), where,
                std::string("missing array field \"") + key + "\"");
      }
      for (const json& id : lines[i]["team_ids"]) links.team_ids.push_back(id.get<std::string>());
      for (const json& id : lines[i]["player_ids"]) links.player_ids.push_back(id.get<std::string>());
      links.extra = extra_fields(lines[i], {"game_id", "team_ids", "player_ids"});
      if (!corpus.game_links.emplace(links.game_id, links).second) {
        throw ValidationError(where + ": duplicate game_id " + links.game_id);
      }
      // Flag dangling ids at load time.
      for (const std::string& id : links.team_ids) {
        if (corpus.teams.count(id) == 0) {
          const std::string msg = where + ": game " + links.game_id +
                                  " links unknown team id " + id;
          if (!lenient) throw ValidationError(msg);
          warn_to(diag, msg);
        }
      }
      for (const std::string& id : links.player_ids) {
        if (corpus.players.count(id) == 0) {
          const std::string msg = where + ": game " + links.game_id +
                                  " links unknown player id " + id;
          if (!lenient) throw ValidationError(msg);
          warn_to(diag, msg);
        }
      }
    }
  }
  return corpus;
}

CandidateSet candidate_knowledge(const std::string& game_id,
                                 const KnowledgeCorpus& corpus, bool lenient,
                                 Diagnostics* diag) {
  const auto it = corpus.game_links.find(game_id);
  if (it == corpus.game_links.end()) {
    throw ValidationError("candidate_knowledge: unknown game_id " + game_id);
  }
  CandidateSet out;
  const GameLinks& links = it->second;
  for (const std::string& id : links.team_ids) {
    const auto t = corpus.teams.find(id);
    if (t == corpus.teams.end()) {
      const std::string msg = "game " + game_id + " links unknown team id " + id;
      if (!lenient) throw ValidationError("candidate_knowledge: " + msg);
      warn_to(diag, msg);
      continue;
    }
    out.teams.push_back(t->second);
  }
  for (const std::string& id : links.player_ids) {
    const auto p = corpus.players.find(id);
    if (p == corpus.players.end()) {
      const std::string msg = "game " + game_id + " links unknown player id " + id;
      if (!lenient) throw ValidationError("candidate_knowledge: " + msg);
      warn_to(diag, msg);
      continue;
    }
    out.players.push_back(p->second);
  }
  if (out.teams.empty() && out.players.empty()) {
    warn_to(diag, "game " + game_id + " has no linked knowledge");
  }
  return out;
}

TokenCounter TokenCounter::defaults() {
  TokenCounter counter;
  counter.tokens = [](const std::string& s) {
    return text::char_tokens(s).size();
  };
  counter.words = [](const std::string& s) {
    return text::word_tokens(s).size();
  };
  return counter;
}

double nearest_rank_p95(std::vector<double> values) {
  if (values.empty()) throw ValidationError("nearest_rank_p95: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return values[rank - 1];
}

namespace {

FieldStats field_stats(const std::vector<double>& values) {
  FieldStats fs;
  double sum = 0.0;
  for (double v : values) sum += v;
  fs.mean = sum / static_cast<double>(values.size());
  fs.p95 = nearest_rank_p95(values);
  return fs;
}

}  // namespace

StatsReport corpus_stats(std::span<const GameRecord> dataset,
                         const TokenCounter& counter) {
  if (dataset.empty()) throw ValidationError("corpus_stats: empty dataset");
  std::vector<double> nt, nw, ns, ct, cw, cs;
  for (const GameRecord& game : dataset) {
    double tokens = 0.0;
    double words = 0.0;
    for (const std::string& sentence : game.news) {
      tokens += static_cast<double>(counter.tokens(sentence));
      words += static_cast<double>(counter.words(sentence));
    }
    nt.push_back(tokens);
    nw.push_back(words);
    ns.push_back(static_cast<double>(game.news.size()));
    tokens = words = 0.0;
    for (const Commentary& c : game.commentaries) {
      tokens += static_cast<double>(counter.tokens(c.c));
      words += static_cast<double>(counter.words(c.c));
    }
    ct.push_back(tokens);
    cw.push_back(words);
    cs.push_back(static_cast<double>(game.commentaries.size()));
  }
  StatsReport report;
  report.example_count = dataset.size();
  report.news_tokens = field_stats(nt);
  report.news_words = field_stats(nw);
  report.news_sentences = field_stats(ns);
  report.commentary_tokens = field_stats(ct);
  report.commentary_words = field_stats(cw);
  report.commentary_sentences = field_stats(cs);
  return report;
}

json stats_to_json(const StatsReport& report) {
  const auto field = [](const FieldStats& fs) {
    return json{{"mean", fs.mean}, {"p95", fs.p95}};
  };
  return json{
      {"example_count", report.example_count},
      {"news",
       {{"tokens", field(report.news_tokens)},
        {"words", field(report.news_words)},
        {"sentences", field(report.news_sentences)}}},
      {"commentary",
       {{"tokens", field(report.commentary_tokens)},
        {"words", field(report.commentary_words)},
        {"sentences", field(report.commentary_sentences)}}},
  };
}

}  // namespace gamesum::corpus
