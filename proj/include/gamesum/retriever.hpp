#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gamesum/corpus.hpp"

namespace gamesum::retriever {

enum class EntityKind { PER, ORG, LOC, MISC };

std::string kind_name(EntityKind kind);

// Raw tagger output: character span plus predicted kind.
struct RawEntity {
  std::size_t begin = 0;
  std::size_t end = 0;
  EntityKind kind = EntityKind::MISC;
};

// A retained PER/ORG mention. Offsets are character offsets and the surface
// equals the sentence slice; spans of distinct mentions never overlap.
struct Mention {
  std::string surface;
  std::size_t begin = 0;
  std::size_t end = 0;
  EntityKind kind = EntityKind::PER;
};

struct LinkerConfig {
  double lambda_p = 0.2;   // player threshold
  double lambda_o = 0.25;  // team threshold
  bool case_fold = false;  // optional ASCII folding for Latin scripts

  void validate() const;
};

// A mention bound to its passage/article. `knowledge` points into the
// CandidateSet passed to the linker and shares its lifetime.
struct MentionLink {
  Mention mention;
  std::string entity_id;
  std::string title;
  double distance = 0.0;
  const corpus::Passage* knowledge = nullptr;
};

// Pluggable tagger. Backends must declare whether one instance may be shared
// across threads.
class NerBackend {
 public:
  virtual ~NerBackend() = default;
  virtual std::vector<RawEntity> tag(const std::string& sentence) const = 0;
  virtual bool shareable() const { return true; }
};

// Deterministic gazetteer matcher built from candidate titles: longest match,
// left to right. Makes the pipeline runnable with zero model downloads.
class GazetteerNer : public NerBackend {
 public:
  GazetteerNer(const corpus::CandidateSet& candidates, bool case_fold = false);

  std::vector<RawEntity> tag(const std::string& sentence) const override;

 private:
  struct Entry {
    std::u32string name;
    EntityKind kind;
  };
  std::vector<Entry> entries_;  // sorted longest-first
  bool case_fold_;
};

// Runs the tagger, keeps PER/ORG spans only and resolves overlaps (longer
// span first, then the earlier one).
std::vector<Mention> recognize_mentions(const std::string& sentence,
                                        const NerBackend& ner);

// Character-level edit distance divided by the longer length. Errors when
// both strings are empty.
double normalized_levenshtein(std::string_view a, std::string_view b);

// Nearest candidate by title distance, kind-restricted. Returns nothing when
// the pool is empty or the nearest distance exceeds the threshold
// (inclusive "within"). Ties break by candidate order.
std::optional<MentionLink> link_mention(const Mention& mention,
                                        const corpus::CandidateSet& candidates,
                                        const LinkerConfig& cfg);

std::vector<MentionLink> retrieve_for_sentence(const std::string& sentence,
                                               const corpus::CandidateSet& candidates,
                                               const LinkerConfig& cfg,
                                               const NerBackend& ner);

}  // namespace gamesum::retriever
