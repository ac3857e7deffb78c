#include "gamesum/pipeline.hpp"

#include <cstdlib>
#include <map>

#include "gamesum/jsonio.hpp"

namespace gamesum::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
  const json v = jsonio::read_json_file(path);
  PipelineConfig cfg;
  if (v.contains("paths")) {
    const json& p = v["paths"];
    if (p.contains("games")) cfg.games = p["games"].get<std::string>();
    if (p.contains("players")) cfg.corpus_paths.players = p["players"].get<std::string>();
    if (p.contains("cards")) cfg.corpus_paths.cards = p["cards"].get<std::string>();
    if (p.contains("teams")) cfg.corpus_paths.teams = p["teams"].get<std::string>();
    if (p.contains("links")) cfg.corpus_paths.links = p["links"].get<std::string>();
    if (p.contains("output_dir")) cfg.output_dir = p["output_dir"].get<std::string>();
  }
  if (v.contains("split")) {
    const auto split = corpus::parse_split(v["split"].get<std::string>());
    if (!split.has_value()) {
      throw ValidationError("config: unknown split " + v["split"].get<std::string>());
    }
    cfg.split = *split;
  }
  if (v.contains("oracle")) {
    const json& o = v["oracle"];
    if (o.contains("similarity")) cfg.similarity = o["similarity"].get<std::string>();
    if (o.contains("window_span")) cfg.oracle_cfg.window_span = o["window_span"].get<int>();
    if (o.contains("max_leading_tokens")) {
      cfg.oracle_cfg.max_leading_tokens = o["max_leading_tokens"].get<std::size_t>();
    }
    if (o.contains("patterns")) {
      cfg.oracle_cfg.patterns = o["patterns"].get<std::vector<std::string>>();
    }
  }
  if (v.contains("linker")) {
    const json& l = v["linker"];
    if (l.contains("lambda_p")) cfg.linker.lambda_p = l["lambda_p"].get<double>();
    if (l.contains("lambda_o")) cfg.linker.lambda_o = l["lambda_o"].get<double>();
    if (l.contains("case_fold")) cfg.linker.case_fold = l["case_fold"].get<bool>();
  }
  if (v.contains("encoder")) {
    const json& e = v["encoder"];
    if (e.contains("backend")) cfg.encoder_backend = e["backend"].get<std::string>();
    if (e.contains("dim")) cfg.encoder_dim = e["dim"].get<std::size_t>();
    if (e.contains("max_len")) cfg.encoder_max_len = e["max_len"].get<std::size_t>();
  }
  if (v.contains("selector")) {
    const json& s = v["selector"];
    if (s.contains("lr")) cfg.selector_hyper.lr = s["lr"].get<double>();
    if (s.contains("epochs")) cfg.selector_hyper.epochs = s["epochs"].get<std::size_t>();
    if (s.contains("batch_size")) cfg.selector_hyper.batch_size = s["batch_size"].get<std::size_t>();
    if (s.contains("tau")) cfg.selector_hyper.tau = s["tau"].get<double>();
    if (s.contains("positive_weight")) {
      cfg.selector_hyper.positive_weight = s["positive_weight"].get<double>();
    }
  }
  if (v.contains("rewriter")) {
    const json& r = v["rewriter"];
    if (r.contains("backend")) cfg.rewriter_backend = r["backend"].get<std::string>();
    if (r.contains("embed_dim")) cfg.rewriter_hyper.embed_dim = r["embed_dim"].get<std::size_t>();
    if (r.contains("hidden")) cfg.rewriter_hyper.hidden = r["hidden"].get<std::size_t>();
    if (r.contains("lr")) cfg.rewriter_hyper.lr = r["lr"].get<double>();
    if (r.contains("epochs")) cfg.rewriter_hyper.epochs = r["epochs"].get<std::size_t>();
    if (r.contains("max_input_len")) {
      cfg.rewriter_hyper.max_input_len = r["max_input_len"].get<std::size_t>();
    }
    if (r.contains("max_target_len")) {
      cfg.rewriter_hyper.max_target_len = r["max_target_len"].get<std::size_t>();
    }
  }
  if (v.contains("ablation")) {
    const json& a = v["ablation"];
    if (a.contains("no_segment")) cfg.ablation.no_segment = a["no_segment"].get<bool>();
    if (a.contains("no_knowledge")) cfg.ablation.no_knowledge = a["no_knowledge"].get<bool>();
  }
  if (v.contains("seed")) cfg.seed = v["seed"].get<std::uint64_t>();
  if (v.contains("lenient")) cfg.lenient = v["lenient"].get<bool>();
  cfg.apply_env();
  return cfg;
}

void PipelineConfig::apply_env() {
  const auto env = [](const char* name) -> std::optional<std::string> {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
  if (const auto v = env("GAMESUM_SEED")) seed = std::stoull(*v);
  if (const auto v = env("GAMESUM_OUTPUT_DIR")) output_dir = *v;
  if (const auto v = env("GAMESUM_LAMBDA_P")) linker.lambda_p = std::stod(*v);
  if (const auto v = env("GAMESUM_LAMBDA_O")) linker.lambda_o = std::stod(*v);
  if (const auto v = env("GAMESUM_TAU")) selector_hyper.tau = std::stod(*v);
  if (const auto v = env("GAMESUM_LENIENT")) lenient = (*v == "1" || *v == "true");
}

std::vector<std::string> PipelineConfig::validate(const std::string& subcommand) const {
  std::vector<std::string> problems;
  const auto need_file = [&problems](const fs::path& p, const std::string& what) {
    if (p.empty()) {
      problems.push_back("missing config value: " + what);
    } else if (!fs::exists(p)) {
      problems.push_back(what + " does not exist: " + p.string());
    }
  };
  need_file(games, "paths.games");  // every stage reads the dataset
  if (subcommand == "summarize" || subcommand == "train-rewriter") {
    if (!corpus_paths.teams.empty()) need_file(corpus_paths.teams, "paths.teams");
    if (!corpus_paths.links.empty()) need_file(corpus_paths.links, "paths.links");
  }
  if (linker.lambda_p < 0.0 || linker.lambda_p > 1.0) {
    problems.push_back("linker.lambda_p must be in [0,1]");
  }
  if (linker.lambda_o < 0.0 || linker.lambda_o > 1.0) {
    problems.push_back("linker.lambda_o must be in [0,1]");
  }
  if (selector_hyper.tau <= 0.0 || selector_hyper.tau >= 1.0) {
    problems.push_back("selector.tau must be in (0,1)");
  }
  if (similarity != "token_f1" && similarity != "embedding") {
    problems.push_back("oracle.similarity must be token_f1 or embedding");
  }
  if (encoder_backend != "hash") {
    problems.push_back("encoder.backend must be hash");
  }
  if (rewriter_backend != "identity" && rewriter_backend != "toy") {
    problems.push_back("rewriter.backend must be identity or toy");
  }
  if (oracle_cfg.window_span < 0) {
    problems.push_back("oracle.window_span must be >= 0");
  }
  return problems;
}

namespace {

std::unique_ptr<EncoderBackend> encoder_from(const PipelineConfig& cfg) {
  return make_encoder(cfg.encoder_backend, cfg.encoder_dim, cfg.encoder_max_len);
}

oracle::SentenceSimilarity similarity_from(const PipelineConfig& cfg,
                                           const EncoderBackend& encoder) {
  if (cfg.similarity == "embedding") return oracle::embedding_similarity(encoder);
  return oracle::token_f1_similarity();
}

bool has_corpus(const PipelineConfig& cfg) {
  return !cfg.corpus_paths.links.empty() &&
         (!cfg.corpus_paths.teams.empty() || !cfg.corpus_paths.players.empty() ||
          !cfg.corpus_paths.cards.empty());
}

}  // namespace

corpus::StatsReport run_stats(const PipelineConfig& cfg, Diagnostics* diag) {
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const corpus::StatsReport report = corpus::corpus_stats(games);
  jsonio::write_json_atomic(cfg.output_dir / kStatsFile, corpus::stats_to_json(report));
  return report;
}

OracleArtifacts run_build_oracle(const PipelineConfig& cfg, Diagnostics* diag) {
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const auto encoder = encoder_from(cfg);
  const auto sim = similarity_from(cfg, *encoder);
  OracleArtifacts artifacts;
  for (const corpus::GameRecord& game : games) {
    if (game.news.empty()) {
      warn_to(diag, "game " + game.game_id + " has no news; skipped by oracle");
      artifacts.labels.push_back(
          {game.game_id, std::vector<int>(game.commentaries.size(), 0)});
      continue;
    }
    const auto pairs = oracle::map_article(game, sim, cfg.oracle_cfg);
    artifacts.labels.push_back(oracle::derive_labels(game, pairs));
    artifacts.pairs.insert(artifacts.pairs.end(), pairs.begin(), pairs.end());
  }
  save_pairs(cfg.output_dir / kPairsFile, artifacts.pairs);
  save_labels(cfg.output_dir / kLabelsFile, artifacts.labels);
  return artifacts;
}

selector::SelectorTrainResult run_train_selector(const PipelineConfig& cfg,
                                                 Diagnostics* diag) {
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const auto labels = load_labels(cfg.output_dir / kLabelsFile);
  const auto encoder = encoder_from(cfg);
  selector::SelectorHyper hyper = cfg.selector_hyper;
  hyper.seed = cfg.seed;
  auto result = selector::train_selector(games, labels, *encoder, hyper);
  selector::save_selector(cfg.output_dir / kSelectorFile, result.model,
                          result.loss_curve);
  return result;
}

std::vector<double> run_train_rewriter(const PipelineConfig& cfg, Diagnostics* diag) {
  if (cfg.rewriter_backend == "identity") {
    // Nothing to train; still persist a model stub so summarize can load it.
    rewriter::IdentityBackend backend;
    backend.save(cfg.output_dir / kRewriterFile);
    return {};
  }
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const auto pairs = load_pairs(cfg.output_dir / kPairsFile);
  const corpus::KnowledgeCorpus knowledge =
      has_corpus(cfg) ? corpus::load_corpus(cfg.corpus_paths, cfg.lenient, diag)
                      : corpus::KnowledgeCorpus{};
  const auto encoder = encoder_from(cfg);
  const rewriter::KnowledgeEmbedder kb(*encoder);
  const auto examples = rewriter::build_rewriter_examples(
      games, pairs, knowledge, cfg.linker, kb, cfg.lenient, diag);
  rewriter::RewriterHyper hyper = cfg.rewriter_hyper;
  hyper.seed = cfg.seed;
  auto result = rewriter::train_rewriter(examples, kb.dim(), hyper, cfg.ablation);
  result.model->save(cfg.output_dir / kRewriterFile);
  return result.loss_curve;
}

std::vector<rewriter::Summary> run_summarize(const PipelineConfig& cfg,
                                             Diagnostics* diag) {
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const corpus::KnowledgeCorpus knowledge =
      has_corpus(cfg) ? corpus::load_corpus(cfg.corpus_paths, cfg.lenient, diag)
                      : corpus::KnowledgeCorpus{};
  const auto encoder = encoder_from(cfg);
  const rewriter::KnowledgeEmbedder kb(*encoder);

  selector::SelectorModel model =
      fs::exists(cfg.output_dir / kSelectorFile)
          ? selector::load_selector(cfg.output_dir / kSelectorFile, *encoder)
          : selector::SelectorModel(*encoder, cfg.selector_hyper.tau);

  std::unique_ptr<rewriter::Seq2SeqBackend> backend;
  if (cfg.rewriter_backend == "toy") {
    backend = rewriter::ToySeq2Seq::load(cfg.output_dir / kRewriterFile);
  } else {
    backend = std::make_unique<rewriter::IdentityBackend>();
  }

  std::vector<rewriter::Summary> summaries;
  std::vector<json> selected_lines;
  std::vector<json> debug_lines;
  for (const corpus::GameRecord& game : games) {
    std::vector<double> probabilities;
    const std::vector<std::size_t> selected =
        selector::select_key_sentences(model, game, &probabilities);
    selected_lines.push_back(json{{"game_id", game.game_id},
                                  {"selected_indices", selected},
                                  {"probabilities", probabilities}});

    corpus::CandidateSet candidates;
    if (knowledge.game_links.count(game.game_id) != 0) {
      candidates = corpus::candidate_knowledge(game.game_id, knowledge,
                                               cfg.lenient, diag);
    } else if (has_corpus(cfg)) {
      warn_to(diag, "game " + game.game_id + " has no link relations");
    }
    const retriever::GazetteerNer ner(candidates, cfg.linker.case_fold);

    rewriter::Summary summary;
    summary.game_id = game.game_id;
    for (std::size_t index : selected) {
      const corpus::Commentary& commentary = game.commentaries[index];
      const auto links = retriever::retrieve_for_sentence(commentary.c, candidates,
                                                          cfg.linker, ner);
      json mention_dump = json::array();
      for (const auto& mention : retriever::recognize_mentions(commentary.c, ner)) {
        json entry{{"surface", mention.surface},
                   {"start", mention.begin},
                   {"end", mention.end},
                   {"kind", retriever::kind_name(mention.kind)},
                   {"entity_id", nullptr},
                   {"distance", nullptr}};
        for (const auto& link : links) {
          if (link.mention.begin == mention.begin && link.mention.end == mention.end) {
            entry["entity_id"] = link.entity_id;
            entry["distance"] = link.distance;
            break;
          }
        }
        mention_dump.push_back(std::move(entry));
      }
      debug_lines.push_back(json{{"sentence", commentary.c},
                                 {"mentions", std::move(mention_dump)}});

      const rewriter::RewriterInput input =
          rewriter::assemble_input(commentary.t, commentary.c, links, kb);
      summary.sentences.push_back(rewriter::rewrite_sentence(*backend, input, diag));
    }
    summary.article = rewriter::compose_news(summary.sentences);
    summaries.push_back(std::move(summary));
  }
  jsonio::write_jsonl_atomic(cfg.output_dir / kSelectedFile, selected_lines);
  jsonio::write_jsonl_atomic(cfg.output_dir / kLinksDebugFile, debug_lines);
  save_summaries(cfg.output_dir / kSummariesFile, summaries);
  return summaries;
}

eval::EvalReport run_evaluate(const PipelineConfig& cfg, Diagnostics* diag) {
  const auto games = corpus::load_dataset(cfg.games, cfg.split, diag);
  const auto summaries = load_summaries(cfg.output_dir / kSummariesFile);
  const eval::EvalReport report = eval::evaluate_run(summaries, games);
  jsonio::write_json_atomic(cfg.output_dir / kScoresFile,
                            eval::report_to_json(report));
  return report;
}

// ---------------------------------------------------------------------------
// Artifact (de)serialization

void save_pairs(const fs::path& path, std::span<const oracle::MappedPair> pairs) {
  std::vector<json> lines;
  lines.reserve(pairs.size());
  for (const auto& p : pairs) {
    lines.push_back(json{{"game_id", p.game_id},
                         {"news_index", p.news_index},
                         {"commentary_index", p.commentary_index},
                         {"minute", p.minute},
                         {"similarity", p.similarity}});
  }
  jsonio::write_jsonl_atomic(path, lines);
}

std::vector<oracle::MappedPair> load_pairs(const fs::path& path) {
  std::vector<oracle::MappedPair> pairs;
  const auto lines = jsonio::read_jsonl(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& v = lines[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    try {
      oracle::MappedPair p;
      p.game_id = v.at("game_id").get<std::string>();
      p.news_index = v.at("news_index").get<std::size_t>();
      p.commentary_index = v.at("commentary_index").get<std::size_t>();
      p.minute = v.at("minute").get<int>();
      p.similarity = v.at("similarity").get<double>();
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": bad pair record: " + e.what());
    }
  }
  return pairs;
}

void save_labels(const fs::path& path,
                 std::span<const oracle::ImportanceLabels> labels) {
  std::vector<json> lines;
  lines.reserve(labels.size());
  for (const auto& l : labels) {
    lines.push_back(json{{"game_id", l.game_id}, {"labels", l.labels}});
  }
  jsonio::write_jsonl_atomic(path, lines);
}

std::vector<oracle::ImportanceLabels> load_labels(const fs::path& path) {
  std::vector<oracle::ImportanceLabels> labels;
  const auto lines = jsonio::read_jsonl(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& v = lines[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    try {
      oracle::ImportanceLabels l;
      l.game_id = v.at("game_id").get<std::string>();
      l.labels = v.at("labels").get<std::vector<int>>();
      for (int label : l.labels) {
        if (label != 0 && label != 1) {
          throw ValidationError(where + ": labels must be 0 or 1");
        }
      }
      labels.push_back(std::move(l));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": bad labels record: " + e.what());
    }
  }
  return labels;
}

void save_summaries(const fs::path& path,
                    std::span<const rewriter::Summary> summaries) {
  std::vector<json> lines;
  lines.reserve(summaries.size());
  for (const auto& s : summaries) {
    lines.push_back(json{{"game_id", s.game_id},
                         {"sentences", s.sentences},
                         {"article", s.article}});
  }
  jsonio::write_jsonl_atomic(path, lines);
}

std::vector<rewriter::Summary> load_summaries(const fs::path& path) {
  std::vector<rewriter::Summary> summaries;
  const auto lines = jsonio::read_jsonl(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& v = lines[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    try {
      rewriter::Summary s;
      s.game_id = v.at("game_id").get<std::string>();
      s.sentences = v.at("sentences").get<std::vector<std::string>>();
      s.article = v.at("article").get<std::string>();
      summaries.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": bad summary record: " + e.what());
    }
  }
  return summaries;
}

}  // namespace gamesum::pipeline
