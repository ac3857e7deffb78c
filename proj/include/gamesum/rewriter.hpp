#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gamesum/corpus.hpp"
#include "gamesum/encoder.hpp"
#include "gamesum/nn.hpp"
#include "gamesum/oracle.hpp"
#include "gamesum/retriever.hpp"

namespace gamesum::rewriter {

// Fine-grained token roles carried by the segment embeddings.
enum class Segment { Player, Team, Time, Other };

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kSep = "</s>";

std::string segment_name(Segment segment);

// "In the <t>th minute"
std::string temporal_phrase(int minute);

// Tokenized rewriter input: <s> temporal-phrase </s> commentary </s>, one
// segment id per token and one knowledge vector per token (zero outside
// linked mention spans).
struct RewriterInput {
  std::vector<std::string> tokens;
  std::vector<Segment> segments;
  std::vector<nn::Vec> knowledge;
  int minute = 0;
  std::string commentary;
  std::string phrase;
};

// Mean of the per-sentence summary embeddings of a passage/article.
nn::Vec passage_embedding(std::span<const std::string> sentences,
                          const EncoderBackend& encoder);

// Computes and caches passage embeddings per entity id.
class KnowledgeEmbedder {
 public:
  explicit KnowledgeEmbedder(const EncoderBackend& encoder) : encoder_(&encoder) {}

  std::size_t dim() const { return encoder_->dim(); }
  const nn::Vec& embed(const corpus::Passage& passage) const;

 private:
  const EncoderBackend* encoder_;
  mutable std::map<std::string, nn::Vec> cache_;
};

RewriterInput assemble_input(int minute, const std::string& commentary,
                             std::span<const retriever::MentionLink> links,
                             const KnowledgeEmbedder& kb);

// Layer-normalized sum of the four per-token embeddings. All inputs must
// share the norm's dimension.
nn::Vec fuse_embeddings(const nn::Vec& token, const nn::Vec& position,
                        const nn::Vec& segment, const nn::Vec& knowledge,
                        const nn::LayerNorm& norm);

struct AblationFlags {
  bool no_segment = false;    // drop segment embeddings from the fusion
  bool no_knowledge = false;  // drop knowledge embeddings from the fusion
};

struct RewriterHyper {
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;
  std::size_t max_input_len = 96;
  std::size_t max_target_len = 32;
  double lr = 0.01;
  std::size_t epochs = 300;
  std::uint64_t seed = 13;
};

struct RewriterExample {
  RewriterInput input;
  std::string target;
};

class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;
  virtual std::string name() const = 0;
  virtual std::size_t embed_dim() const = 0;
  virtual std::string generate(const RewriterInput& input,
                               bool* truncated = nullptr) const = 0;
  // Returns the per-epoch mean NLL curve.
  virtual std::vector<double> train(std::span<const RewriterExample> examples) = 0;
  virtual void save(const std::filesystem::path& path) const = 0;
};

// Mock backend: echoes the commentary segment of the input. Useful for
// pipeline smoke runs with no training step.
class IdentityBackend : public Seq2SeqBackend {
 public:
  std::string name() const override { return "identity"; }
  std::size_t embed_dim() const override { return 0; }
  std::string generate(const RewriterInput& input, bool* truncated) const override;
  std::vector<double> train(std::span<const RewriterExample>) override { return {}; }
  void save(const std::filesystem::path& path) const override;
};

// Small trainable sequence-to-sequence model. The encoder fuses token,
// position, segment and knowledge embeddings through layer normalization and
// mean-pools them into a context vector; the decoder predicts each target
// token from (previous token, target position, context). Deterministic under
// a fixed seed; big enough to memorize a toy pairing, nothing more.
class ToySeq2Seq : public Seq2SeqBackend {
 public:
  ToySeq2Seq(std::vector<std::string> vocab, std::size_t knowledge_dim,
             const RewriterHyper& hyper, AblationFlags flags);

  std::string name() const override { return "toy"; }
  std::size_t embed_dim() const override { return hyper_.embed_dim; }
  std::string generate(const RewriterInput& input, bool* truncated) const override;
  std::vector<double> train(std::span<const RewriterExample> examples) override;
  void save(const std::filesystem::path& path) const override;
  static std::unique_ptr<ToySeq2Seq> load(const std::filesystem::path& path);

  // Fused per-token input embeddings (the z_k sequence). Exposed so tests can
  // pin the fusion and the ablation semantics.
  std::vector<nn::Vec> fused_embeddings(const RewriterInput& input) const;

  const nn::LayerNorm& input_norm() const { return ln_; }
  const nn::Mat& token_table() const { return enc_tok_; }
  const nn::Mat& position_table() const { return enc_pos_; }
  AblationFlags flags() const { return flags_; }
  const std::vector<double>& loss_curve() const { return curve_; }

  static std::vector<std::string> build_vocab(std::span<const RewriterExample> examples);

 private:
  ToySeq2Seq() = default;

  struct Forward;
  Forward run_forward(const RewriterInput& input,
                      std::span<const std::size_t> target_ids) const;

  std::size_t token_id(const std::string& token) const;
  std::vector<std::size_t> input_ids(const RewriterInput& input) const;
  std::vector<std::size_t> target_ids(const std::string& target) const;

  RewriterHyper hyper_;
  AblationFlags flags_;
  std::size_t knowledge_dim_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> token_to_id_;

  nn::Mat enc_tok_, enc_pos_, seg_, know_proj_;
  nn::LayerNorm ln_{1};
  nn::Mat dec_tok_, dec_pos_, u_, c_;
  nn::Vec b_h_, out_b_;
  nn::Mat out_w_;
  std::vector<double> curve_;
};

// Generates one news sentence; warns and falls back to the commentary text if
// the backend produces nothing.
std::string rewrite_sentence(const Seq2SeqBackend& model, const RewriterInput& input,
                             Diagnostics* diag = nullptr);

// Joins generated sentences in selection order with a single separator.
std::string compose_news(std::span<const std::string> sentences);

// Builds training examples from oracle pairs: each mapped commentary with its
// timeline, links and knowledge against the aligned news sentence.
std::vector<RewriterExample> build_rewriter_examples(
    std::span<const corpus::GameRecord> games,
    std::span<const oracle::MappedPair> pairs, const corpus::KnowledgeCorpus& corpus,
    const retriever::LinkerConfig& linker_cfg, const KnowledgeEmbedder& kb,
    bool lenient = false, Diagnostics* diag = nullptr);

struct RewriterTrainResult {
  std::unique_ptr<ToySeq2Seq> model;
  std::vector<double> loss_curve;
};

RewriterTrainResult train_rewriter(std::span<const RewriterExample> examples,
                                   std::size_t knowledge_dim,
                                   const RewriterHyper& hyper, AblationFlags flags);

struct Summary {
  std::string game_id;
  std::vector<std::string> sentences;
  std::string article;
};

}  // namespace gamesum::rewriter
