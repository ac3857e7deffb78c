#include "gamesum/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gamesum/jsonio.hpp"
#include "gamesum/rng.hpp"
#include "gamesum/text.hpp"

namespace gamesum::selector {

using nn::Vec;

TokenizedDoc TokenizedDoc::from_game(const corpus::GameRecord& game) {
  TokenizedDoc doc;
  for (const corpus::Commentary& commentary : game.commentaries) {
    const std::size_t begin = doc.tokens.size();
    for (const auto& token : text::word_tokens(commentary.c)) {
      doc.tokens.push_back(token.token);
    }
    doc.sentence_spans.push_back({begin, doc.tokens.size()});
  }
  return doc;
}

TokenSpan window_for_target(std::size_t doc_len, TokenSpan target,
                            std::size_t max_len, Diagnostics* diag) {
  if (max_len == 0) throw ValidationError("window_for_target: max_len is zero");
  if (target.begin > target.end || target.end > doc_len) {
    throw ValidationError("window_for_target: target span out of bounds");
  }
  if (target.size() > max_len) {
    warn_to(diag, "target sentence of " + std::to_string(target.size()) +
                      " tokens exceeds max_len " + std::to_string(max_len) +
                      "; truncating target tail");
    target.end = target.begin + max_len;
  }
  const std::size_t win_len = std::min(max_len, doc_len);
  // Balance the margins around the target: the optimal start minimizes
  // |left_margin - right_margin|, i.e. floor((begin+end-win_len)/2), with
  // ties resolved toward the smaller start.
  const long long spread =
      static_cast<long long>(target.begin) + static_cast<long long>(target.end) -
      static_cast<long long>(win_len);
  long long start = spread >= 0 ? spread / 2 : -((-spread + 1) / 2);  // floor
  start = std::max(start, 0LL);
  start = std::min(start, static_cast<long long>(doc_len - win_len));
  const std::size_t begin = static_cast<std::size_t>(start);
  return {begin, begin + win_len};
}

Vec sentence_representation(std::span<const Vec> window_encoding,
                            TokenSpan target_in_window) {
  if (target_in_window.begin >= target_in_window.end ||
      target_in_window.end > window_encoding.size()) {
    throw ValidationError("sentence_representation: empty or out-of-range span");
  }
  Vec mean(window_encoding[target_in_window.begin].size(), 0.0);
  for (std::size_t i = target_in_window.begin; i < target_in_window.end; ++i) {
    nn::axpy(mean, window_encoding[i]);
  }
  const double inv = 1.0 / static_cast<double>(target_in_window.size());
  for (double& v : mean) v *= inv;
  return mean;
}

SelectorModel::SelectorModel(const EncoderBackend& enc, double tau_)
    : encoder(&enc), weights(enc.dim(), 0.0), bias(0.0), tau(tau_) {}

namespace {

// Mean contextual representation of sentence `index` inside its centered
// window; zero vector (with a warning) when the sentence has no tokens.
Vec representation_for(const EncoderBackend& encoder, const TokenizedDoc& doc,
                       std::size_t index, Diagnostics* diag) {
  if (index >= doc.sentence_spans.size()) {
    throw ValidationError("sentence index out of range");
  }
  TokenSpan target = doc.sentence_spans[index];
  if (target.size() == 0) {
    warn_to(diag, "commentary sentence " + std::to_string(index) +
                      " has no tokens; using zero representation");
    return Vec(encoder.dim(), 0.0);
  }
  const TokenSpan window =
      window_for_target(doc.tokens.size(), target, encoder.max_len(), diag);
  if (target.end > window.end) target.end = window.end;  // truncated tail
  const std::span<const std::string> window_tokens(
      doc.tokens.data() + window.begin, window.end - window.begin);
  const std::vector<Vec> encoded = encoder.encode(window_tokens);
  return sentence_representation(
      encoded, {target.begin - window.begin, target.end - window.begin});
}

}  // namespace

double predict_importance(const SelectorModel& model, const TokenizedDoc& doc,
                          std::size_t index, Diagnostics* diag) {
  const Vec rep = representation_for(*model.encoder, doc, index, diag);
  return nn::sigmoid(nn::dot(model.weights, rep) + model.bias);
}

std::vector<std::size_t> select_key_sentences(const SelectorModel& model,
                                              const corpus::GameRecord& game,
                                              std::vector<double>* probabilities) {
  if (game.commentaries.empty()) {
    throw ValidationError("select_key_sentences: game " + game.game_id +
                          " has no commentaries");
  }
  const TokenizedDoc doc = TokenizedDoc::from_game(game);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < doc.sentence_spans.size(); ++i) {
    const double p = predict_importance(model, doc, i);
    if (probabilities != nullptr) probabilities->push_back(p);
    if (p >= model.tau) selected.push_back(i);
  }
  return selected;
}

SelectorTrainResult train_selector(std::span<const corpus::GameRecord> games,
                                   std::span<const oracle::ImportanceLabels> labels,
                                   const EncoderBackend& encoder,
                                   const SelectorHyper& hyper) {
  if (games.empty()) throw ValidationError("train_selector: empty dataset");
  std::map<std::string, const oracle::ImportanceLabels*> by_game;
  for (const auto& l : labels) by_game[l.game_id] = &l;

  // Precompute representations once; the encoder is fixed during training.
  std::vector<Vec> features;
  std::vector<int> targets;
  for (const corpus::GameRecord& game : games) {
    const auto it = by_game.find(game.game_id);
    if (it == by_game.end()) {
      throw ValidationError("train_selector: no labels for game " + game.game_id);
    }
    if (it->second->labels.size() != game.commentaries.size()) {
      throw ValidationError("train_selector: label/commentary length mismatch for game " +
                            game.game_id);
    }
    const TokenizedDoc doc = TokenizedDoc::from_game(game);
    for (std::size_t i = 0; i < game.commentaries.size(); ++i) {
      features.push_back(representation_for(encoder, doc, i, nullptr));
      targets.push_back(it->second->labels[i]);
    }
  }

  SelectorTrainResult result{SelectorModel(encoder, hyper.tau), {}, 0.0};
  Vec& w = result.model.weights;
  double& b = result.model.bias;

  nn::AdamConfig adam{hyper.lr};
  nn::AdamState w_state, b_state;
  long step = 0;
  Rng rng(hyper.seed);
  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch_size);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t off = 0; off < order.size(); off += batch) {
      const std::size_t hi = std::min(order.size(), off + batch);
      Vec gw(w.size(), 0.0);
      double gb = 0.0;
      for (std::size_t k = off; k < hi; ++k) {
        const std::size_t i = order[k];
        const double p = nn::sigmoid(nn::dot(w, features[i]) + b);
        const double weight = targets[i] == 1 ? hyper.positive_weight : 1.0;
        epoch_loss += weight * nn::binary_cross_entropy(p, targets[i]);
        const double delta = weight * (p - static_cast<double>(targets[i]));
        nn::axpy(gw, features[i], delta);
        gb += delta;
      }
      const double inv = 1.0 / static_cast<double>(hi - off);
      for (double& g : gw) g *= inv;
      gb *= inv;
      ++step;
      nn::adam_step(w, gw, w_state, adam, step);
      Vec bvec{b};
      nn::adam_step(bvec, Vec{gb}, b_state, adam, step);
      b = bvec[0];
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(order.size()));
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double p = nn::sigmoid(nn::dot(w, features[i]) + b);
    if ((p >= 0.5 ? 1 : 0) == targets[i]) ++correct;
  }
  result.train_accuracy =
      static_cast<double>(correct) / static_cast<double>(features.size());
  return result;
}

void save_selector(const std::filesystem::path& path, const SelectorModel& model,
                   std::span<const double> loss_curve) {
  nlohmann::json value{
      {"dim", model.weights.size()},
      {"weights", model.weights},
      {"bias", model.bias},
      {"tau", model.tau},
      {"loss_curve", std::vector<double>(loss_curve.begin(), loss_curve.end())},
  };
  jsonio::write_json_atomic(path, value);
}

SelectorModel load_selector(const std::filesystem::path& path,
                            const EncoderBackend& encoder) {
  const nlohmann::json value = jsonio::read_json_file(path);
  SelectorModel model(encoder);
  const auto weights = value.at("weights").get<std::vector<double>>();
  if (weights.size() != encoder.dim()) {
    throw ValidationError("selector model dim " + std::to_string(weights.size()) +
                          " does not match encoder dim " +
                          std::to_string(encoder.dim()));
  }
  model.weights = weights;
  model.bias = value.at("bias").get<double>();
  model.tau = value.at("tau").get<double>();
  return model;
}

}  // namespace gamesum::selector
