#include "gamesum/retriever.hpp"

#include <algorithm>

#include "gamesum/text.hpp"

namespace gamesum::retriever {

std::string kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::PER: return "PER";
    case EntityKind::ORG: return "ORG";
    case EntityKind::LOC: return "LOC";
    case EntityKind::MISC: return "MISC";
  }
  return "MISC";
}

void LinkerConfig::validate() const {
  if (lambda_p < 0.0 || lambda_p > 1.0) {
    throw ValidationError("linker.lambda_p must be in [0,1]");
  }
  if (lambda_o < 0.0 || lambda_o > 1.0) {
    throw ValidationError("linker.lambda_o must be in [0,1]");
  }
}

namespace {

std::u32string fold(std::u32string s, bool case_fold) {
  if (!case_fold) return s;
  for (char32_t& cp : s) {
    if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
  }
  return s;
}

}  // namespace

GazetteerNer::GazetteerNer(const corpus::CandidateSet& candidates, bool case_fold)
    : case_fold_(case_fold) {
  for (const corpus::Passage& p : candidates.players) {
    entries_.push_back({fold(text::decode_utf8(p.title), case_fold_), EntityKind::PER});
  }
  for (const corpus::Passage& t : candidates.teams) {
    entries_.push_back({fold(text::decode_utf8(t.title), case_fold_), EntityKind::ORG});
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.name.size() > b.name.size();
                   });
}

std::vector<RawEntity> GazetteerNer::tag(const std::string& sentence) const {
  const std::u32string cps = fold(text::decode_utf8(sentence), case_fold_);
  std::vector<RawEntity> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    bool matched = false;
    for (const Entry& entry : entries_) {  // longest first
      if (entry.name.empty() || i + entry.name.size() > cps.size()) continue;
      if (std::u32string_view(cps).substr(i, entry.name.size()) == entry.name) {
        out.push_back({i, i + entry.name.size(), entry.kind});
        i += entry.name.size();
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::vector<Mention> recognize_mentions(const std::string& sentence,
                                        const NerBackend& ner) {
  std::vector<RawEntity> raw;
  try {
    raw = ner.tag(sentence);
  } catch (const std::exception& e) {
    throw RuntimeError("tagger failed on sentence \"" + sentence +
                       "\": " + e.what());
  }
  const std::size_t sentence_len = text::char_length(sentence);
  std::vector<RawEntity> kept;
  for (const RawEntity& r : raw) {
    if (r.kind != EntityKind::PER && r.kind != EntityKind::ORG) continue;
    if (r.begin >= r.end || r.end > sentence_len) {
      throw RuntimeError("tagger emitted invalid span [" + std::to_string(r.begin) +
                         "," + std::to_string(r.end) + ") on sentence \"" +
                         sentence + "\"");
    }
    kept.push_back(r);
  }
  // Overlaps: longer span wins, then the earlier one.
  std::stable_sort(kept.begin(), kept.end(), [](const RawEntity& a, const RawEntity& b) {
    const std::size_t la = a.end - a.begin;
    const std::size_t lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<RawEntity> chosen;
  for (const RawEntity& r : kept) {
    const bool overlaps = std::any_of(chosen.begin(), chosen.end(),
                                      [&](const RawEntity& c) {
                                        return r.begin < c.end && c.begin < r.end;
                                      });
    if (!overlaps) chosen.push_back(r);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const RawEntity& a, const RawEntity& b) { return a.begin < b.begin; });
  std::vector<Mention> mentions;
  for (const RawEntity& r : chosen) {
    mentions.push_back({text::substr_chars(sentence, r.begin, r.end), r.begin,
                        r.end, r.kind});
  }
  return mentions;
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
  const std::u32string ua = text::decode_utf8(a);
  const std::u32string ub = text::decode_utf8(b);
  if (ua.empty() && ub.empty()) {
    throw ValidationError("normalized_levenshtein: both strings empty");
  }
  // Two-row DP over unicode scalars.
  const std::size_t n = ua.size();
  const std::size_t m = ub.size();
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  const double lev = static_cast<double>(prev[m]);
  return lev / static_cast<double>(std::max(n, m));
}

std::optional<MentionLink> link_mention(const Mention& mention,
                                        const corpus::CandidateSet& candidates,
                                        const LinkerConfig& cfg) {
  cfg.validate();
  const bool is_player = mention.kind == EntityKind::PER;
  const std::vector<corpus::Passage>& pool =
      is_player ? candidates.players : candidates.teams;
  const double threshold = is_player ? cfg.lambda_p : cfg.lambda_o;
  const corpus::Passage* best = nullptr;
  double best_distance = 0.0;
  for (const corpus::Passage& candidate : pool) {
    const std::string surface =
        cfg.case_fold ? text::ascii_lower(mention.surface) : mention.surface;
    const std::string title =
        cfg.case_fold ? text::ascii_lower(candidate.title) : candidate.title;
    const double d = normalized_levenshtein(surface, title);
    if (best == nullptr || d < best_distance) {  // ties keep candidate order
      best = &candidate;
      best_distance = d;
    }
  }
  if (best == nullptr || best_distance > threshold) return std::nullopt;
  MentionLink link;
  link.mention = mention;
  link.entity_id = best->entity_id;
  link.title = best->title;
  link.distance = best_distance;
  link.knowledge = best;
  return link;
}

std::vector<MentionLink> retrieve_for_sentence(const std::string& sentence,
                                               const corpus::CandidateSet& candidates,
                                               const LinkerConfig& cfg,
                                               const NerBackend& ner) {
  std::vector<MentionLink> links;
  for (const Mention& mention : recognize_mentions(sentence, ner)) {
    auto link = link_mention(mention, candidates, cfg);
    if (link.has_value()) links.push_back(std::move(*link));
  }
  // recognize_mentions emits mentions ordered by start offset already.
  return links;
}

}  // namespace gamesum::retriever
