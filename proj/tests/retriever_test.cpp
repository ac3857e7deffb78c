#include <doctest.h>

#include <algorithm>

#include "gamesum/retriever.hpp"
#include "gamesum/rng.hpp"
#include "oracles.hpp"

using namespace gamesum;
using retriever::EntityKind;
using retriever::LinkerConfig;
using retriever::Mention;

namespace {

corpus::CandidateSet table_candidates() {
  corpus::CandidateSet set;
  set.players.push_back({"p_semedo", "Semedo", {"Semedo plays as a defender"}, {}});
  set.players.push_back({"p_suarez", "Suarez", {"Suarez plays as a striker"}, {}});
  set.teams.push_back({"t_barca", "Barcelona", {"Barcelona is a football club"}, {}});
  return set;
}

// Tagger stub that emits whatever spans it was given.
class FixedTagger : public retriever::NerBackend {
 public:
  explicit FixedTagger(std::vector<retriever::RawEntity> spans)
      : spans_(std::move(spans)) {}
  std::vector<retriever::RawEntity> tag(const std::string&) const override {
    return spans_;
  }

 private:
  std::vector<retriever::RawEntity> spans_;
};

std::string random_name(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 12) {
  const std::size_t len = min_len + rng.index(max_len - min_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    out += static_cast<char>('a' + rng.index(6));
  }
  return out;
}

}  // namespace

TEST_CASE("gazetteer recognizes known names with kinds and offsets") {
  const auto candidates = table_candidates();
  const retriever::GazetteerNer ner(candidates);
  const std::string sentence =
      "Barcelona pushed down the left, Semedo slid the ball across and Suarez scored!!!";
  const auto mentions = retriever::recognize_mentions(sentence, ner);
  REQUIRE(mentions.size() == 3);
  CHECK(mentions[0].surface == "Barcelona");
  CHECK(mentions[0].kind == EntityKind::ORG);
  CHECK(mentions[0].begin == 0);
  CHECK(mentions[0].end == 9);
  CHECK(mentions[1].surface == "Semedo");
  CHECK(mentions[1].kind == EntityKind::PER);
  CHECK(mentions[2].surface == "Suarez");
  CHECK(mentions[2].kind == EntityKind::PER);
}

TEST_CASE("recognize_mentions returns nothing for unknown names") {
  const retriever::GazetteerNer ner(table_candidates());
  CHECK(retriever::recognize_mentions("A quiet first half with no chances", ner).empty());
}

TEST_CASE("recognize_mentions filters out non PER/ORG kinds") {
  const FixedTagger tagger({{0, 4, EntityKind::LOC}, {5, 9, EntityKind::PER}});
  const auto mentions = retriever::recognize_mentions("Camp Nou hosts", tagger);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].kind == EntityKind::PER);
}

TEST_CASE("recognize_mentions resolves overlaps longer-then-earlier") {
  const FixedTagger tagger({{0, 3, EntityKind::PER},
                            {2, 8, EntityKind::ORG},
                            {10, 13, EntityKind::PER},
                            {11, 14, EntityKind::PER}});
  const auto mentions = retriever::recognize_mentions("abcdefghij klmno", tagger);
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].begin == 2);  // the longer span survives
  CHECK(mentions[0].end == 8);
  CHECK(mentions[1].begin == 10);  // equal length, earlier wins
}

TEST_CASE("recognize_mentions validates spans and propagates tagger failures") {
  const FixedTagger bad({{5, 4, EntityKind::PER}});
  CHECK_THROWS_AS(retriever::recognize_mentions("short", bad), RuntimeError);

  class ThrowingTagger : public retriever::NerBackend {
   public:
    std::vector<retriever::RawEntity> tag(const std::string&) const override {
      throw std::runtime_error("backend down");
    }
  };
  CHECK_THROWS_WITH_AS(retriever::recognize_mentions("context text", ThrowingTagger{}),
                       doctest::Contains("context text"), RuntimeError);
}

TEST_CASE("normalized levenshtein hand-checked values") {
  CHECK(retriever::normalized_levenshtein("kitten", "sitting") ==
        doctest::Approx(3.0 / 7.0));
  CHECK(retriever::normalized_levenshtein("abc", "abc") == 0.0);
  CHECK(retriever::normalized_levenshtein("abc", "") == 1.0);
  CHECK(retriever::normalized_levenshtein("梅西", "梅东西") ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(retriever::normalized_levenshtein("", ""), ValidationError);
}

TEST_CASE("normalized levenshtein equals the DP oracle on random pairs") {
  Rng rng(33);
  for (int rep = 0; rep < 1000; ++rep) {
    std::string a = random_name(rng, 0, 30);
    std::string b = random_name(rng, 0, 30);
    if (a.empty() && b.empty()) b = "x";
    const double got = retriever::normalized_levenshtein(a, b);
    CHECK(got == testoracle::nlev(a, b));
    CHECK(got == retriever::normalized_levenshtein(b, a));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    if (!a.empty()) CHECK(retriever::normalized_levenshtein(a, a) == 0.0);
    if (got == 0.0) CHECK(a == b);
  }
}

TEST_CASE("link_mention links exact and near matches under the threshold") {
  corpus::CandidateSet set;
  set.players.push_back({"p1", "Ronaldo", {"x"}, {}});
  set.players.push_back({"p2", "Rooney", {"x"}, {}});
  LinkerConfig cfg;

  const Mention exact{"Ronaldo", 0, 7, EntityKind::PER};
  auto link = retriever::link_mention(exact, set, cfg);
  REQUIRE(link.has_value());
  CHECK(link->entity_id == "p1");
  CHECK(link->distance == 0.0);

  const Mention near{"Ronaldo7", 0, 8, EntityKind::PER};
  link = retriever::link_mention(near, set, cfg);
  REQUIRE(link.has_value());
  CHECK(link->distance == doctest::Approx(0.125));

  const Mention far{"Messi", 0, 5, EntityKind::PER};
  CHECK(testoracle::nlev("Messi", "Ronaldo") > cfg.lambda_p);
  CHECK(testoracle::nlev("Messi", "Rooney") > cfg.lambda_p);
  CHECK_FALSE(retriever::link_mention(far, set, cfg).has_value());
}

TEST_CASE("link_mention respects kind separation and candidate order ties") {
  corpus::CandidateSet set;
  set.players.push_back({"p1", "Arsenal", {"a player oddly named"}, {}});
  set.teams.push_back({"t1", "Arsenal", {"the club"}, {}});
  LinkerConfig cfg;
  const Mention per{"Arsenal", 0, 7, EntityKind::PER};
  const Mention org{"Arsenal", 0, 7, EntityKind::ORG};
  CHECK(retriever::link_mention(per, set, cfg)->entity_id == "p1");
  CHECK(retriever::link_mention(org, set, cfg)->entity_id == "t1");

  corpus::CandidateSet dup;
  dup.players.push_back({"first", "Silva", {"x"}, {}});
  dup.players.push_back({"second", "Silva", {"x"}, {}});
  const Mention m{"Silva", 0, 5, EntityKind::PER};
  CHECK(retriever::link_mention(m, dup, cfg)->entity_id == "first");

  CHECK_FALSE(retriever::link_mention(per, corpus::CandidateSet{}, cfg).has_value());
}

TEST_CASE("link_mention agrees with the brute-force nearest oracle") {
  Rng rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    corpus::CandidateSet set;
    const std::size_t pool = 1 + rng.index(8);
    for (std::size_t i = 0; i < pool; ++i) {
      set.players.push_back({"p" + std::to_string(i), random_name(rng), {"x"}, {}});
    }
    LinkerConfig cfg;
    cfg.lambda_p = rng.uniform();
    const Mention m{random_name(rng), 0, 1, EntityKind::PER};
    const auto got = retriever::link_mention(m, set, cfg);
    const auto want = testoracle::nearest_candidate(m.surface, set.players, cfg.lambda_p);
    CHECK(got.has_value() == want.has_value());
    if (got.has_value() && want.has_value()) {
      CHECK(got->entity_id == set.players[want->index].entity_id);
      CHECK(got->distance == want->distance);
    }
  }
}

TEST_CASE("raising the threshold only ever adds links") {
  Rng rng(15);
  corpus::CandidateSet set;
  for (std::size_t i = 0; i < 6; ++i) {
    set.players.push_back({"p" + std::to_string(i), random_name(rng), {"x"}, {}});
  }
  for (int rep = 0; rep < 100; ++rep) {
    const Mention m{random_name(rng), 0, 1, EntityKind::PER};
    LinkerConfig lo, hi;
    lo.lambda_p = rng.uniform(0.0, 0.5);
    hi.lambda_p = lo.lambda_p + rng.uniform(0.0, 0.5);
    const auto linked_lo = retriever::link_mention(m, set, lo);
    const auto linked_hi = retriever::link_mention(m, set, hi);
    if (linked_lo.has_value()) {
      REQUIRE(linked_hi.has_value());
      CHECK(linked_lo->entity_id == linked_hi->entity_id);
    }
  }
}

TEST_CASE("retrieve_for_sentence composes tagging and linking") {
  const auto candidates = table_candidates();
  const retriever::GazetteerNer ner(candidates);
  LinkerConfig cfg;
  const std::string sentence =
      "Barcelona pushed down the left, Semedo slid the ball across and Suarez scored!!!";
  const auto links = retriever::retrieve_for_sentence(sentence, candidates, cfg, ner);
  REQUIRE(links.size() == 3);
  CHECK(links[0].entity_id == "t_barca");
  CHECK(links[1].entity_id == "p_semedo");
  CHECK(links[2].entity_id == "p_suarez");
  CHECK(std::is_sorted(links.begin(), links.end(),
                       [](const auto& a, const auto& b) {
                         return a.mention.begin < b.mention.begin;
                       }));
  // Spans never overlap.
  for (std::size_t i = 1; i < links.size(); ++i) {
    CHECK(links[i - 1].mention.end <= links[i].mention.begin);
  }

  const auto none = retriever::retrieve_for_sentence(sentence, corpus::CandidateSet{},
                                                     cfg, ner);
  CHECK(none.empty());
}

TEST_CASE("case folding is optional and off by default") {
  corpus::CandidateSet set;
  set.players.push_back({"p1", "SUAREZ", {"x"}, {}});
  LinkerConfig cfg;
  const Mention m{"suarez", 0, 6, EntityKind::PER};
  CHECK_FALSE(retriever::link_mention(m, set, cfg).has_value());
  cfg.case_fold = true;
  CHECK(retriever::link_mention(m, set, cfg).has_value());
}
