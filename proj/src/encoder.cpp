#include "qsum/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace qsum {

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "recurrent") return EncoderKind::Recurrent;
  if (s == "convolutional") return EncoderKind::Convolutional;
  throw std::invalid_argument("unknown encoder kind: " + s +
                              " (expected recurrent|convolutional)");
}

std::string to_string(EncoderKind k) {
  return k == EncoderKind::Recurrent ? "recurrent" : "convolutional";
}

Tensor positional_embedding(int sentenceIndex, int dim) {
  if (sentenceIndex < 0) throw std::invalid_argument("positional_embedding: negative index");
  Tensor out({dim});
  for (int i = 0; i < dim; i += 2) {
    double freq = std::pow(10000.0, static_cast<double>(i) / dim);
    out.v[i] = std::sin(sentenceIndex / freq);
    if (i + 1 < dim) out.v[i + 1] = std::cos(sentenceIndex / freq);
  }
  return out;
}

LstmCell LstmCell::create(const std::string& prefix, int inputDim, int hidden,
                          ParamStore& params, std::mt19937_64& rng) {
  LstmCell cell;
  cell.hidden = hidden;
  double sx = 1.0 / std::sqrt(static_cast<double>(inputDim));
  double sh = 1.0 / std::sqrt(static_cast<double>(hidden));
  cell.Wx = params.create(prefix + ".Wx", {4 * hidden, inputDim}, sx, rng);
  cell.Wh = params.create(prefix + ".Wh", {4 * hidden, hidden}, sh, rng);
  cell.b = params.create_zeros(prefix + ".b", {4 * hidden});
  return cell;
}

std::pair<NodePtr, NodePtr> LstmCell::step(const NodePtr& x, const NodePtr& h,
                                           const NodePtr& c) const {
  NodePtr gates = add(add(matmul(Wx, x), matmul(Wh, h)), b);
  NodePtr i = sigmoid(slice(gates, 0, hidden));
  NodePtr f = sigmoid(slice(gates, hidden, hidden));
  NodePtr o = sigmoid(slice(gates, 2 * hidden, hidden));
  NodePtr g = tanh_op(slice(gates, 3 * hidden, hidden));
  NodePtr cNext = add(mul(f, c), mul(i, g));
  NodePtr hNext = mul(o, tanh_op(cNext));
  return {hNext, cNext};
}

namespace {

LstmCell bind_cell(const std::string& prefix, const ParamStore& params) {
  LstmCell cell;
  cell.Wx = params.get(prefix + ".Wx");
  cell.Wh = params.get(prefix + ".Wh");
  cell.b = params.get(prefix + ".b");
  cell.hidden = cell.Wh->value.shape[1];
  return cell;
}

}  // namespace

Encoder::Encoder(const EncoderConfig& cfg, const Vocabulary& vocab, ParamStore& params,
                 std::mt19937_64& rng)
    : cfg_(cfg), vocab_(&vocab) {
  embeddings_ = params.create("embed.words", {vocab.size(), cfg.embedDim}, 0.1, rng);
  if (cfg.kind == EncoderKind::Recurrent) {
    fw_ = LstmCell::create("enc.fw", cfg.embedDim, cfg.lstmHidden, params, rng);
    bw_ = LstmCell::create("enc.bw", cfg.embedDim, cfg.lstmHidden, params, rng);
  } else {
    for (int w : cfg.cnnWindows) {
      double s = 1.0 / std::sqrt(static_cast<double>(w * cfg.embedDim));
      convW_.push_back(params.create("enc.conv" + std::to_string(w) + ".W",
                                     {cfg.cnnFilters, w * cfg.embedDim}, s, rng));
      convB_.push_back(
          params.create_zeros("enc.conv" + std::to_string(w) + ".b", {cfg.cnnFilters}));
    }
  }
  qfw_ = LstmCell::create("q.fw", cfg.embedDim, cfg.lstmHidden, params, rng);
  qbw_ = LstmCell::create("q.bw", cfg.embedDim, cfg.lstmHidden, params, rng);
}

Encoder::Encoder(const EncoderConfig& cfg, const Vocabulary* vocab,
                 const ParamStore& params)
    : cfg_(cfg), vocab_(vocab) {
  embeddings_ = params.get("embed.words");
  if (cfg.kind == EncoderKind::Recurrent) {
    fw_ = bind_cell("enc.fw", params);
    bw_ = bind_cell("enc.bw", params);
  } else {
    for (int w : cfg.cnnWindows) {
      convW_.push_back(params.get("enc.conv" + std::to_string(w) + ".W"));
      convB_.push_back(params.get("enc.conv" + std::to_string(w) + ".b"));
    }
  }
  qfw_ = bind_cell("q.fw", params);
  qbw_ = bind_cell("q.bw", params);
}

std::vector<int> Encoder::token_ids(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab_->id(t));
  return ids;
}

std::vector<NodePtr> Encoder::word_vectors_recurrent(const std::vector<int>& ids) const {
  int n = static_cast<int>(ids.size());
  std::vector<NodePtr> fwStates(n), bwStates(n);
  NodePtr h = fw_.zero_state(), c = fw_.zero_state();
  for (int t = 0; t < n; ++t) {
    std::tie(h, c) = fw_.step(lookup(embeddings_, ids[t]), h, c);
    fwStates[t] = h;
  }
  h = bw_.zero_state();
  c = bw_.zero_state();
  for (int t = n - 1; t >= 0; --t) {
    std::tie(h, c) = bw_.step(lookup(embeddings_, ids[t]), h, c);
    bwStates[t] = h;
  }
  std::vector<NodePtr> out(n);
  for (int t = 0; t < n; ++t) out[t] = concat({bwStates[t], fwStates[t]});
  return out;
}

std::vector<NodePtr> Encoder::word_vectors_convolutional(const std::vector<int>& ids) const {
  int n = static_cast<int>(ids.size());
  std::vector<NodePtr> embeds(n);
  for (int t = 0; t < n; ++t) embeds[t] = lookup(embeddings_, ids[t]);
  NodePtr zero = constant(Tensor({cfg_.embedDim}));

  std::vector<NodePtr> out(n);
  for (int t = 0; t < n; ++t) {
    std::vector<NodePtr> perWindow;
    for (size_t wi = 0; wi < cfg_.cnnWindows.size(); ++wi) {
      int w = cfg_.cnnWindows[wi];
      int half = (w - 1) / 2;  // centered window, same-length zero padding
      std::vector<NodePtr> window;
      for (int off = -half; off <= half; ++off) {
        int idx = t + off;
        window.push_back(idx >= 0 && idx < n ? embeds[idx] : zero);
      }
      NodePtr x = window.size() == 1 ? window[0] : concat(window);
      perWindow.push_back(relu(add(matmul(convW_[wi], x), convB_[wi])));
    }
    out[t] = concat(perWindow);
  }
  return out;
}

std::vector<NodePtr> Encoder::encode_units(const Document& doc,
                                           const UnitSequence& units) const {
  std::vector<std::string> tokens = doc.source_tokens();
  if (tokens.empty()) throw std::runtime_error("encode_units: empty document");
  std::vector<int> ids = token_ids(tokens);

  // Document-level offset of each sentence.
  std::vector<int> offsets(doc.sentences.size(), 0);
  for (size_t i = 1; i < doc.sentences.size(); ++i)
    offsets[i] = offsets[i - 1] + doc.sentences[i - 1].size();

  std::vector<NodePtr> unitVecs;
  unitVecs.reserve(units.units.size());
  if (cfg_.kind == EncoderKind::Recurrent) {
    // Per-word forward/backward states; a chunk [t, t+n] is the backward
    // state at its first word joined with the forward state at its last.
    int n = static_cast<int>(ids.size());
    std::vector<NodePtr> fwStates(n), bwStates(n);
    NodePtr h = fw_.zero_state(), c = fw_.zero_state();
    for (int t = 0; t < n; ++t) {
      std::tie(h, c) = fw_.step(lookup(embeddings_, ids[t]), h, c);
      fwStates[t] = h;
    }
    h = bw_.zero_state();
    c = bw_.zero_state();
    for (int t = n - 1; t >= 0; --t) {
      std::tie(h, c) = bw_.step(lookup(embeddings_, ids[t]), h, c);
      bwStates[t] = h;
    }
    for (const auto& u : units.units) {
      int start = offsets.at(u.sentenceIndex) + u.span.start;
      int end = offsets.at(u.sentenceIndex) + u.span.end - 1;
      unitVecs.push_back(concat({bwStates.at(start), fwStates.at(end)}));
    }
  } else {
    std::vector<NodePtr> wordVecs = word_vectors_convolutional(ids);
    for (const auto& u : units.units) {
      int start = offsets.at(u.sentenceIndex) + u.span.start;
      std::vector<NodePtr> members(wordVecs.begin() + start,
                                   wordVecs.begin() + start + u.span.length());
      unitVecs.push_back(max_over_span(members));
    }
  }
  return unitVecs;
}

NodePtr Encoder::encode_question(const std::vector<std::string>& questionTokens) const {
  if (questionTokens.empty()) throw std::runtime_error("encode_question: empty question");
  std::vector<int> ids = token_ids(questionTokens);
  int n = static_cast<int>(ids.size());
  NodePtr h = qfw_.zero_state(), c = qfw_.zero_state();
  for (int t = 0; t < n; ++t)
    std::tie(h, c) = qfw_.step(lookup(embeddings_, ids[t]), h, c);
  NodePtr lastFw = h;
  h = qbw_.zero_state();
  c = qbw_.zero_state();
  for (int t = n - 1; t >= 0; --t)
    std::tie(h, c) = qbw_.step(lookup(embeddings_, ids[t]), h, c);
  return concat({lastFw, h});
}

void Encoder::load_pretrained_embeddings(
    const std::unordered_map<std::string, std::vector<double>>& vectors) {
  int d = cfg_.embedDim;
  for (int id = 0; id < vocab_->size(); ++id) {
    auto it = vectors.find(vocab_->token(id));
    if (it == vectors.end()) continue;
    if (static_cast<int>(it->second.size()) != d)
      throw std::runtime_error("pretrained embedding dimension mismatch");
    for (int j = 0; j < d; ++j)
      embeddings_->value.v[static_cast<size_t>(id) * d + j] = it->second[j];
  }
}

}  // namespace qsum
