#include "gamesum/rewriter.hpp"

#include <algorithm>
#include <cmath>

#include "gamesum/jsonio.hpp"
#include "gamesum/rng.hpp"
#include "gamesum/text.hpp"

namespace gamesum::rewriter {

using nn::Mat;
using nn::Vec;
using nlohmann::json;

namespace {

constexpr std::size_t kUnkId = 0;
constexpr std::size_t kBosId = 1;
constexpr std::size_t kSepId = 2;
constexpr std::size_t kEosId = 3;
const char* const kSpecials[] = {"<unk>", "<s>", "</s>", "<eos>"};

}  // namespace

std::string segment_name(Segment segment) {
  switch (segment) {
    case Segment::Player: return "Player";
    case Segment::Team: return "Team";
    case Segment::Time: return "Time";
    case Segment::Other: return "Other";
  }
  return "Other";
}

std::string temporal_phrase(int minute) {
  return "In the " + std::to_string(minute) + "th minute";
}

Vec passage_embedding(std::span<const std::string> sentences,
                      const EncoderBackend& encoder) {
  if (sentences.empty()) {
    throw ValidationError("passage_embedding: empty passage");
  }
  std::vector<Vec> per_sentence;
  per_sentence.reserve(sentences.size());
  for (const std::string& sentence : sentences) {
    per_sentence.push_back(encoder.summarize(text::word_token_strings(sentence)));
  }
  return nn::mean_of(per_sentence);
}

const Vec& KnowledgeEmbedder::embed(const corpus::Passage& passage) const {
  const auto it = cache_.find(passage.entity_id);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(passage.entity_id,
                        passage_embedding(passage.sentences, *encoder_))
      .first->second;
}

RewriterInput assemble_input(int minute, const std::string& commentary,
                             std::span<const retriever::MentionLink> links,
                             const KnowledgeEmbedder& kb) {
  if (text::trim(commentary).empty()) {
    throw ValidationError("assemble_input: empty commentary");
  }
  const std::size_t commentary_len = text::char_length(commentary);
  for (const auto& link : links) {
    if (link.mention.end > commentary_len || link.mention.begin >= link.mention.end) {
      throw ValidationError("assemble_input: link span [" +
                            std::to_string(link.mention.begin) + "," +
                            std::to_string(link.mention.end) +
                            ") out of bounds for commentary");
    }
  }

  RewriterInput input;
  input.minute = minute;
  input.commentary = commentary;
  input.phrase = temporal_phrase(minute);
  const Vec zero(kb.dim(), 0.0);

  const auto push = [&input](std::string token, Segment segment, const Vec& know) {
    input.tokens.push_back(std::move(token));
    input.segments.push_back(segment);
    input.knowledge.push_back(know);
  };

  push(kBos, Segment::Other, zero);
  for (const auto& token : text::word_tokens(input.phrase)) {
    push(token.token, Segment::Time, zero);
  }
  push(kSep, Segment::Other, zero);
  for (const auto& token : text::word_tokens(commentary)) {
    Segment segment = Segment::Other;
    const Vec* know = &zero;
    // Any token overlapping a linked mention span takes its role and
    // knowledge vector.
    for (const auto& link : links) {
      if (token.begin < link.mention.end && link.mention.begin < token.end) {
        segment = link.mention.kind == retriever::EntityKind::PER ? Segment::Player
                                                                  : Segment::Team;
        know = &kb.embed(*link.knowledge);
        break;
      }
    }
    push(token.token, segment, *know);
  }
  push(kSep, Segment::Other, zero);
  return input;
}

nn::Vec fuse_embeddings(const nn::Vec& token, const nn::Vec& position,
                        const nn::Vec& segment, const nn::Vec& knowledge,
                        const nn::LayerNorm& norm) {
  const std::size_t d = norm.dim();
  if (token.size() != d || position.size() != d || segment.size() != d ||
      knowledge.size() != d) {
    throw ValidationError("fuse_embeddings: dimension mismatch");
  }
  Vec sum(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    sum[i] = token[i] + position[i] + segment[i] + knowledge[i];
  }
  return norm.forward(sum);
}

std::string IdentityBackend::generate(const RewriterInput& input,
                                      bool* truncated) const {
  if (truncated != nullptr) *truncated = false;
  return input.commentary;
}

void IdentityBackend::save(const std::filesystem::path& path) const {
  jsonio::write_json_atomic(path, json{{"backend", name()}});
}

// ---------------------------------------------------------------------------
// ToySeq2Seq

std::vector<std::string> ToySeq2Seq::build_vocab(
    std::span<const RewriterExample> examples) {
  std::vector<std::string> vocab(std::begin(kSpecials), std::end(kSpecials));
  std::unordered_map<std::string, bool> seen;
  for (const char* s : kSpecials) seen[s] = true;
  const auto add = [&](const std::string& token) {
    if (!seen.emplace(token, true).second) return;
    vocab.push_back(token);
  };
  for (const RewriterExample& ex : examples) {
    for (const std::string& token : ex.input.tokens) add(token);
    for (const std::string& token : text::word_token_strings(ex.target)) add(token);
  }
  return vocab;
}

ToySeq2Seq::ToySeq2Seq(std::vector<std::string> vocab, std::size_t knowledge_dim,
                       const RewriterHyper& hyper, AblationFlags flags)
    : hyper_(hyper),
      flags_(flags),
      knowledge_dim_(knowledge_dim),
      vocab_(std::move(vocab)),
      ln_(hyper.embed_dim) {
  if (vocab_.size() < 5) throw ValidationError("ToySeq2Seq: vocabulary too small");
  for (std::size_t i = 0; i < vocab_.size(); ++i) token_to_id_[vocab_[i]] = i;

  const std::size_t v = vocab_.size();
  const std::size_t d = hyper_.embed_dim;
  const std::size_t h = hyper_.hidden;
  enc_tok_ = Mat(v, d);
  enc_pos_ = Mat(hyper_.max_input_len, d);
  seg_ = Mat(4, d);
  know_proj_ = Mat(d, knowledge_dim_);
  dec_tok_ = Mat(v, d);
  dec_pos_ = Mat(hyper_.max_target_len, h);
  u_ = Mat(h, d);
  c_ = Mat(h, d);
  b_h_ = Vec(h, 0.0);
  out_w_ = Mat(v, h);
  out_b_ = Vec(v, 0.0);

  Rng rng(hyper_.seed);
  const auto init = [&rng](Mat& m, double scale) {
    for (double& x : m.a) x = rng.uniform(-scale, scale);
  };
  init(enc_tok_, 0.1);
  init(enc_pos_, 0.1);
  init(seg_, 0.1);
  init(dec_tok_, 0.1);
  init(dec_pos_, 0.1);
  const auto xavier = [](std::size_t in, std::size_t out) {
    return std::sqrt(6.0 / static_cast<double>(in + out));
  };
  init(u_, xavier(d, h));
  init(c_, xavier(d, h));
  init(out_w_, xavier(h, v));
  if (d == knowledge_dim_) {
    // The projection bridging the knowledge encoder into the embedding space
    // starts as the identity when the dimensions already agree.
    for (std::size_t i = 0; i < d; ++i) know_proj_.at(i, i) = 1.0;
  } else {
    init(know_proj_, xavier(knowledge_dim_, d));
  }
}

std::size_t ToySeq2Seq::token_id(const std::string& token) const {
  const auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

std::vector<std::size_t> ToySeq2Seq::input_ids(const RewriterInput& input) const {
  std::vector<std::size_t> ids;
  const std::size_t n = std::min(input.tokens.size(), hyper_.max_input_len);
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(token_id(input.tokens[i]));
  return ids;
}

std::vector<std::size_t> ToySeq2Seq::target_ids(const std::string& target) const {
  std::vector<std::size_t> ids;
  for (const std::string& token : text::word_token_strings(target)) {
    ids.push_back(token_id(token));
    if (ids.size() + 1 == hyper_.max_target_len) break;
  }
  ids.push_back(kEosId);
  return ids;
}

std::vector<Vec> ToySeq2Seq::fused_embeddings(const RewriterInput& input) const {
  if (input.tokens.size() != input.segments.size() ||
      input.tokens.size() != input.knowledge.size()) {
    throw ValidationError("rewriter input fields have mismatched lengths");
  }
  const std::vector<std::size_t> ids = input_ids(input);
  std::vector<Vec> fused;
  fused.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    Vec sum(hyper_.embed_dim, 0.0);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] = enc_tok_.at(ids[k], i) + enc_pos_.at(k, i);
    }
    if (!flags_.no_segment) {
      const auto s = static_cast<std::size_t>(input.segments[k]);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += seg_.at(s, i);
    }
    if (!flags_.no_knowledge) {
      if (input.knowledge[k].size() != knowledge_dim_) {
        throw ValidationError("knowledge vector dimension mismatch");
      }
      nn::axpy(sum, nn::matvec(know_proj_, input.knowledge[k]));
    }
    fused.push_back(ln_.forward(sum));
  }
  return fused;
}

struct ToySeq2Seq::Forward {
  std::vector<std::size_t> ids;
  std::vector<Vec> sums;                    // pre-LN per token
  std::vector<nn::LayerNormCache> caches;
  std::vector<Vec> fused;
  Vec context;
  // per decode step
  std::vector<std::size_t> prev_ids;
  std::vector<Vec> hidden;
  std::vector<Vec> probs;
  double nll = 0.0;
};

ToySeq2Seq::Forward ToySeq2Seq::run_forward(
    const RewriterInput& input, std::span<const std::size_t> targets) const {
  Forward f;
  f.ids = input_ids(input);
  if (f.ids.empty()) throw ValidationError("ToySeq2Seq: empty input");
  const std::size_t d = hyper_.embed_dim;
  for (std::size_t k = 0; k < f.ids.size(); ++k) {
    Vec sum(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] = enc_tok_.at(f.ids[k], i) + enc_pos_.at(k, i);
    }
    if (!flags_.no_segment) {
      const auto s = static_cast<std::size_t>(input.segments[k]);
      for (std::size_t i = 0; i < d; ++i) sum[i] += seg_.at(s, i);
    }
    if (!flags_.no_knowledge) {
      nn::axpy(sum, nn::matvec(know_proj_, input.knowledge[k]));
    }
    nn::LayerNormCache cache;
    f.fused.push_back(ln_.forward(sum, &cache));
    f.sums.push_back(std::move(sum));
    f.caches.push_back(std::move(cache));
  }
  f.context = nn::mean_of(f.fused);

  std::size_t prev = kBosId;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    f.prev_ids.push_back(prev);
    Vec dec_embed(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) dec_embed[i] = dec_tok_.at(prev, i);
    Vec pre = nn::matvec(u_, dec_embed);
    nn::axpy(pre, nn::matvec(c_, f.context));
    for (std::size_t i = 0; i < pre.size(); ++i) {
      pre[i] += dec_pos_.at(t, i) + b_h_[i];
    }
    Vec hidden(pre.size(), 0.0);
    for (std::size_t i = 0; i < pre.size(); ++i) hidden[i] = std::tanh(pre[i]);
    Vec logits = nn::matvec(out_w_, hidden);
    nn::axpy(logits, out_b_);
    // softmax
    double max_logit = logits[0];
    for (double l : logits) max_logit = std::max(max_logit, l);
    double z = 0.0;
    Vec probs(logits.size(), 0.0);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      probs[i] = std::exp(logits[i] - max_logit);
      z += probs[i];
    }
    for (double& p : probs) p /= z;
    f.nll += -std::log(std::max(probs[targets[t]], 1e-300));
    f.hidden.push_back(std::move(hidden));
    f.probs.push_back(std::move(probs));
    prev = targets[t];
  }
  return f;
}

std::string ToySeq2Seq::generate(const RewriterInput& input, bool* truncated) const {
  Forward f = run_forward(input, {});
  const std::size_t d = hyper_.embed_dim;
  std::vector<std::string> out;
  std::size_t prev = kBosId;
  bool hit_limit = true;
  for (std::size_t t = 0; t < hyper_.max_target_len; ++t) {
    Vec dec_embed(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) dec_embed[i] = dec_tok_.at(prev, i);
    Vec pre = nn::matvec(u_, dec_embed);
    nn::axpy(pre, nn::matvec(c_, f.context));
    for (std::size_t i = 0; i < pre.size(); ++i) {
      pre[i] += dec_pos_.at(t, i) + b_h_[i];
    }
    for (double& x : pre) x = std::tanh(x);
    Vec logits = nn::matvec(out_w_, pre);
    nn::axpy(logits, out_b_);
    // Greedy argmax over real tokens plus <eos>; ties go to the smaller id.
    std::size_t best = kEosId;
    double best_logit = logits[kEosId];
    for (std::size_t i = 4; i < logits.size(); ++i) {
      if (logits[i] > best_logit) {
        best_logit = logits[i];
        best = i;
      }
    }
    if (best == kEosId) {
      hit_limit = false;
      break;
    }
    out.push_back(vocab_[best]);
    prev = best;
  }
  if (truncated != nullptr) *truncated = hit_limit;
  std::string joined;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i > 0) joined += ' ';
    joined += out[i];
  }
  return joined;
}

namespace {

// Gradients and Adam state for every trainable tensor of the toy model.
struct Tensors {
  std::vector<Vec*> params;
  std::vector<Vec> grads;
  std::vector<nn::AdamState> states;

  void add(Vec& p) {
    params.push_back(&p);
    grads.emplace_back(p.size(), 0.0);
    states.emplace_back();
  }
  void zero() {
    for (Vec& g : grads) std::fill(g.begin(), g.end(), 0.0);
  }
  void step(const nn::AdamConfig& cfg, long t) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      nn::adam_step(*params[i], grads[i], states[i], cfg, t);
    }
  }
};

}  // namespace

std::vector<double> ToySeq2Seq::train(std::span<const RewriterExample> examples) {
  if (examples.empty()) throw ValidationError("ToySeq2Seq::train: no examples");
  const std::size_t d = hyper_.embed_dim;
  const std::size_t h = hyper_.hidden;

  std::vector<std::vector<std::size_t>> targets;
  std::size_t total_tokens = 0;
  for (const RewriterExample& ex : examples) {
    targets.push_back(target_ids(ex.target));
    total_tokens += targets.back().size();
  }
  const double inv_total = 1.0 / static_cast<double>(total_tokens);

  Tensors tensors;
  tensors.add(enc_tok_.a);
  tensors.add(enc_pos_.a);
  tensors.add(seg_.a);
  tensors.add(know_proj_.a);
  tensors.add(ln_.gain);
  tensors.add(ln_.offset);
  tensors.add(dec_tok_.a);
  tensors.add(dec_pos_.a);
  tensors.add(u_.a);
  tensors.add(c_.a);
  tensors.add(b_h_);
  tensors.add(out_w_.a);
  tensors.add(out_b_);
  Vec& g_enc_tok = tensors.grads[0];
  Vec& g_enc_pos = tensors.grads[1];
  Vec& g_seg = tensors.grads[2];
  Vec& g_know = tensors.grads[3];
  Vec& g_gain = tensors.grads[4];
  Vec& g_offset = tensors.grads[5];
  Vec& g_dec_tok = tensors.grads[6];
  Vec& g_dec_pos = tensors.grads[7];
  Vec& g_u = tensors.grads[8];
  Vec& g_c = tensors.grads[9];
  Vec& g_bh = tensors.grads[10];
  Vec& g_out_w = tensors.grads[11];
  Vec& g_out_b = tensors.grads[12];

  const nn::AdamConfig adam{hyper_.lr};
  std::vector<double> curve;
  for (std::size_t epoch = 0; epoch < hyper_.epochs; ++epoch) {
    tensors.zero();
    double epoch_nll = 0.0;
    for (std::size_t e = 0; e < examples.size(); ++e) {
      const Forward f = run_forward(examples[e].input, targets[e]);
      epoch_nll += f.nll;
      Vec d_context(d, 0.0);
      for (std::size_t t = 0; t < targets[e].size(); ++t) {
        Vec d_logits = f.probs[t];
        d_logits[targets[e][t]] -= 1.0;
        for (double& g : d_logits) g *= inv_total;
        // out_w, out_b
        for (std::size_t r = 0; r < out_w_.rows; ++r) {
          const double gr = d_logits[r];
          if (gr == 0.0) continue;
          double* row = g_out_w.data() + r * out_w_.cols;
          for (std::size_t cc = 0; cc < out_w_.cols; ++cc) {
            row[cc] += gr * f.hidden[t][cc];
          }
          g_out_b[r] += gr;
        }
        Vec d_hidden = nn::matvec_t(out_w_, d_logits);
        Vec d_pre(h, 0.0);
        for (std::size_t i = 0; i < h; ++i) {
          d_pre[i] = d_hidden[i] * (1.0 - f.hidden[t][i] * f.hidden[t][i]);
        }
        const std::size_t prev = f.prev_ids[t];
        Vec dec_embed(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) dec_embed[i] = dec_tok_.at(prev, i);
        for (std::size_t r = 0; r < h; ++r) {
          const double gr = d_pre[r];
          double* u_row = g_u.data() + r * d;
          double* c_row = g_c.data() + r * d;
          for (std::size_t cc = 0; cc < d; ++cc) {
            u_row[cc] += gr * dec_embed[cc];
            c_row[cc] += gr * f.context[cc];
          }
          g_dec_pos[t * h + r] += gr;
          g_bh[r] += gr;
        }
        const Vec d_dec_embed = nn::matvec_t(u_, d_pre);
        for (std::size_t i = 0; i < d; ++i) g_dec_tok[prev * d + i] += d_dec_embed[i];
        nn::axpy(d_context, nn::matvec_t(c_, d_pre));
      }
      // Through the mean pool and the fusion.
      const double inv_k = 1.0 / static_cast<double>(f.ids.size());
      for (std::size_t k = 0; k < f.ids.size(); ++k) {
        Vec dz(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) dz[i] = d_context[i] * inv_k;
        Vec dgain, doffset;
        const Vec dsum = ln_.backward(dz, f.caches[k], &dgain, &doffset);
        nn::axpy(g_gain, dgain);
        nn::axpy(g_offset, doffset);
        for (std::size_t i = 0; i < d; ++i) {
          g_enc_tok[f.ids[k] * d + i] += dsum[i];
          g_enc_pos[k * d + i] += dsum[i];
        }
        if (!flags_.no_segment) {
          const auto s = static_cast<std::size_t>(examples[e].input.segments[k]);
          for (std::size_t i = 0; i < d; ++i) g_seg[s * d + i] += dsum[i];
        }
        if (!flags_.no_knowledge) {
          const Vec& know = examples[e].input.knowledge[k];
          bool nonzero = false;
          for (double x : know) {
            if (x != 0.0) {
              nonzero = true;
              break;
            }
          }
          if (nonzero) {
            for (std::size_t r = 0; r < d; ++r) {
              double* row = g_know.data() + r * knowledge_dim_;
              const double gr = dsum[r];
              for (std::size_t cc = 0; cc < knowledge_dim_; ++cc) {
                row[cc] += gr * know[cc];
              }
            }
          }
        }
      }
    }
    curve.push_back(epoch_nll * inv_total);
    tensors.step(adam, static_cast<long>(epoch + 1));
  }
  curve_ = curve;
  return curve;
}

namespace {

json mat_to_json(const Mat& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const json& v) {
  Mat m(v.at("rows").get<std::size_t>(), v.at("cols").get<std::size_t>());
  m.a = v.at("data").get<Vec>();
  if (m.a.size() != m.rows * m.cols) {
    throw ValidationError("model file: matrix shape mismatch");
  }
  return m;
}

}  // namespace

void ToySeq2Seq::save(const std::filesystem::path& path) const {
  json value{
      {"backend", name()},
      {"vocab", vocab_},
      {"knowledge_dim", knowledge_dim_},
      {"flags", {{"no_segment", flags_.no_segment}, {"no_knowledge", flags_.no_knowledge}}},
      {"hyper",
       {{"embed_dim", hyper_.embed_dim},
        {"hidden", hyper_.hidden},
        {"max_input_len", hyper_.max_input_len},
        {"max_target_len", hyper_.max_target_len},
        {"lr", hyper_.lr},
        {"epochs", hyper_.epochs},
        {"seed", hyper_.seed}}},
      {"enc_tok", mat_to_json(enc_tok_)},
      {"enc_pos", mat_to_json(enc_pos_)},
      {"seg", mat_to_json(seg_)},
      {"know_proj", mat_to_json(know_proj_)},
      {"ln_gain", ln_.gain},
      {"ln_offset", ln_.offset},
      {"dec_tok", mat_to_json(dec_tok_)},
      {"dec_pos", mat_to_json(dec_pos_)},
      {"u", mat_to_json(u_)},
      {"c", mat_to_json(c_)},
      {"b_h", b_h_},
      {"out_w", mat_to_json(out_w_)},
      {"out_b", out_b_},
      {"loss_curve", curve_},
  };
  jsonio::write_json_atomic(path, value);
}

std::unique_ptr<ToySeq2Seq> ToySeq2Seq::load(const std::filesystem::path& path) {
  const json v = jsonio::read_json_file(path);
  if (v.value("backend", "") != "toy") {
    throw ValidationError(path.string() + ": not a toy rewriter model file");
  }
  std::unique_ptr<ToySeq2Seq> model(new ToySeq2Seq());
  model->vocab_ = v.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < model->vocab_.size(); ++i) {
    model->token_to_id_[model->vocab_[i]] = i;
  }
  model->knowledge_dim_ = v.at("knowledge_dim").get<std::size_t>();
  const json& flags = v.at("flags");
  model->flags_.no_segment = flags.at("no_segment").get<bool>();
  model->flags_.no_knowledge = flags.at("no_knowledge").get<bool>();
  const json& hyper = v.at("hyper");
  model->hyper_.embed_dim = hyper.at("embed_dim").get<std::size_t>();
  model->hyper_.hidden = hyper.at("hidden").get<std::size_t>();
  model->hyper_.max_input_len = hyper.at("max_input_len").get<std::size_t>();
  model->hyper_.max_target_len = hyper.at("max_target_len").get<std::size_t>();
  model->hyper_.lr = hyper.at("lr").get<double>();
  model->hyper_.epochs = hyper.at("epochs").get<std::size_t>();
  model->hyper_.seed = hyper.at("seed").get<std::uint64_t>();
  model->enc_tok_ = mat_from_json(v.at("enc_tok"));
  model->enc_pos_ = mat_from_json(v.at("enc_pos"));
  model->seg_ = mat_from_json(v.at("seg"));
  model->know_proj_ = mat_from_json(v.at("know_proj"));
  model->ln_ = nn::LayerNorm(model->hyper_.embed_dim);
  model->ln_.gain = v.at("ln_gain").get<Vec>();
  model->ln_.offset = v.at("ln_offset").get<Vec>();
  model->dec_tok_ = mat_from_json(v.at("dec_tok"));
  model->dec_pos_ = mat_from_json(v.at("dec_pos"));
  model->u_ = mat_from_json(v.at("u"));
  model->c_ = mat_from_json(v.at("c"));
  model->b_h_ = v.at("b_h").get<Vec>();
  model->out_w_ = mat_from_json(v.at("out_w"));
  model->out_b_ = v.at("out_b").get<Vec>();
  model->curve_ = v.value("loss_curve", std::vector<double>{});
  return model;
}

std::string rewrite_sentence(const Seq2SeqBackend& model, const RewriterInput& input,
                             Diagnostics* diag) {
  bool truncated = false;
  std::string out = model.generate(input, &truncated);
  if (truncated) {
    warn_to(diag, "generation hit the length limit; output truncated");
  }
  if (out.empty()) {
    warn_to(diag, "backend produced empty output; echoing the commentary");
    return input.commentary;
  }
  return out;
}

std::string compose_news(std::span<const std::string> sentences) {
  std::string article;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) article += ' ';
    article += sentences[i];
  }
  return article;
}

std::vector<RewriterExample> build_rewriter_examples(
    std::span<const corpus::GameRecord> games,
    std::span<const oracle::MappedPair> pairs, const corpus::KnowledgeCorpus& corpus,
    const retriever::LinkerConfig& linker_cfg, const KnowledgeEmbedder& kb,
    bool lenient, Diagnostics* diag) {
  std::map<std::string, const corpus::GameRecord*> by_id;
  for (const auto& game : games) by_id[game.game_id] = &game;

  std::map<std::string, corpus::CandidateSet> candidates;
  std::map<std::string, std::unique_ptr<retriever::GazetteerNer>> taggers;

  std::vector<RewriterExample> examples;
  for (const oracle::MappedPair& pair : pairs) {
    const auto it = by_id.find(pair.game_id);
    if (it == by_id.end()) {
      throw ValidationError("pairs reference unknown game_id " + pair.game_id);
    }
    const corpus::GameRecord& game = *it->second;
    if (pair.commentary_index >= game.commentaries.size() ||
        pair.news_index >= game.news.size()) {
      throw ValidationError("pair indices out of range for game " + pair.game_id);
    }
    auto cand = candidates.find(pair.game_id);
    if (cand == candidates.end()) {
      corpus::CandidateSet set =
          corpus.game_links.count(pair.game_id) != 0
              ? candidate_knowledge(pair.game_id, corpus, lenient, diag)
              : corpus::CandidateSet{};
      cand = candidates.emplace(pair.game_id, std::move(set)).first;
      taggers.emplace(pair.game_id, std::make_unique<retriever::GazetteerNer>(
                                        cand->second, linker_cfg.case_fold));
    }
    const corpus::Commentary& commentary = game.commentaries[pair.commentary_index];
    const std::vector<retriever::MentionLink> links = retriever::retrieve_for_sentence(
        commentary.c, cand->second, linker_cfg, *taggers.at(pair.game_id));
    RewriterExample ex;
    ex.input = assemble_input(commentary.t, commentary.c, links, kb);
    ex.target = game.news[pair.news_index];
    examples.push_back(std::move(ex));
  }
  return examples;
}

RewriterTrainResult train_rewriter(std::span<const RewriterExample> examples,
                                   std::size_t knowledge_dim,
                                   const RewriterHyper& hyper, AblationFlags flags) {
  if (examples.empty()) throw ValidationError("train_rewriter: no training pairs");
  RewriterTrainResult result;
  result.model = std::make_unique<ToySeq2Seq>(ToySeq2Seq::build_vocab(examples),
                                              knowledge_dim, hyper, flags);
  result.loss_curve = result.model->train(examples);
  return result;
}

}  // namespace gamesum::rewriter
