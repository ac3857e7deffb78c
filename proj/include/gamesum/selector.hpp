#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gamesum/corpus.hpp"
#include "gamesum/encoder.hpp"
#include "gamesum/oracle.hpp"

namespace gamesum::selector {

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - begin; }
};

// A game's commentary sentences flattened into one token stream with one
// span per sentence.
struct TokenizedDoc {
  std::vector<std::string> tokens;
  std::vector<TokenSpan> sentence_spans;

  static TokenizedDoc from_game(const corpus::GameRecord& game);
};

// Window of at most max_len tokens containing the target span, centered on
// it and clamped at the document edges. A target longer than max_len is
// truncated at its tail with a warning.
TokenSpan window_for_target(std::size_t doc_len, TokenSpan target,
                            std::size_t max_len, Diagnostics* diag = nullptr);

// Arithmetic mean of the target tokens' vectors; target is relative to the
// encoded window.
nn::Vec sentence_representation(std::span<const nn::Vec> window_encoding,
                                TokenSpan target_in_window);

// Sigmoid classifier over the mean contextual representation of the target
// sentence.
struct SelectorModel {
  const EncoderBackend* encoder = nullptr;
  nn::Vec weights;  // dim-sized, zero-initialized
  double bias = 0.0;
  double tau = 0.5;  // decision threshold

  explicit SelectorModel(const EncoderBackend& enc, double tau_ = 0.5);
};

double predict_importance(const SelectorModel& model, const TokenizedDoc& doc,
                          std::size_t index, Diagnostics* diag = nullptr);

// Indices with probability >= tau, in document order.
std::vector<std::size_t> select_key_sentences(const SelectorModel& model,
                                              const corpus::GameRecord& game,
                                              std::vector<double>* probabilities = nullptr);

struct SelectorHyper {
  double lr = 0.05;
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  std::uint64_t seed = 7;
  double tau = 0.5;
  double positive_weight = 1.0;  // >1 upweights the key class; 1 = plain CE
};

struct SelectorTrainResult {
  SelectorModel model;
  std::vector<double> loss_curve;  // mean cross-entropy per epoch
  double train_accuracy = 0.0;
};

// Trains the classifier on oracle importance labels with cross-entropy.
// Fixed seed gives an identical loss curve with a deterministic encoder.
SelectorTrainResult train_selector(std::span<const corpus::GameRecord> games,
                                   std::span<const oracle::ImportanceLabels> labels,
                                   const EncoderBackend& encoder,
                                   const SelectorHyper& hyper);

void save_selector(const std::filesystem::path& path, const SelectorModel& model,
                   std::span<const double> loss_curve);
SelectorModel load_selector(const std::filesystem::path& path,
                            const EncoderBackend& encoder);

}  // namespace gamesum::selector
