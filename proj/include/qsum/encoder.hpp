#pragma once

#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "qsum/corpus.hpp"
#include "qsum/segmenter.hpp"
#include "qsum/tensor.hpp"

namespace qsum {

enum class EncoderKind { Recurrent, Convolutional };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string to_string(EncoderKind k);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Recurrent;
  int embedDim = 100;
  int lstmHidden = 256;  // per direction
  int cnnFilters = 128;
  std::vector<int> cnnWindows = {1, 3, 5, 7};
  int posDim = 30;

  int unit_dim() const {
    return kind == EncoderKind::Convolutional
               ? cnnFilters * static_cast<int>(cnnWindows.size())
               : 2 * lstmHidden;
  }
};

Tensor positional_embedding(int sentenceIndex, int dim = 30);

// Packed-gate LSTM cell: gate order i, f, o, g.
struct LstmCell {
  NodePtr Wx, Wh, b;
  int hidden = 0;

  static LstmCell create(const std::string& prefix, int inputDim, int hidden,
                         ParamStore& params, std::mt19937_64& rng);
  // (h, c) -> (h', c')
  std::pair<NodePtr, NodePtr> step(const NodePtr& x, const NodePtr& h,
                                   const NodePtr& c) const;
  NodePtr zero_state() const { return constant(Tensor({hidden})); }
};

// Unit and question encoders sharing one word-embedding table.
class Encoder {
 public:
  Encoder(const EncoderConfig& cfg, const Vocabulary& vocab, ParamStore& params,
          std::mt19937_64& rng);

  // Re-binds to an existing store (e.g. after checkpoint load).
  Encoder(const EncoderConfig& cfg, const Vocabulary* vocab, const ParamStore& params);

  const EncoderConfig& config() const { return cfg_; }

  std::vector<int> token_ids(const std::vector<std::string>& tokens) const;

  // One vector of size unit_dim() per extraction unit, document order.
  std::vector<NodePtr> encode_units(const Document& doc,
                                    const UnitSequence& units) const;

  NodePtr encode_question(const std::vector<std::string>& questionTokens) const;

  // Overwrites embedding rows for tokens present in the pretrained file.
  void load_pretrained_embeddings(
      const std::unordered_map<std::string, std::vector<double>>& vectors);

 private:
  std::vector<NodePtr> word_vectors_recurrent(const std::vector<int>& ids) const;
  std::vector<NodePtr> word_vectors_convolutional(const std::vector<int>& ids) const;

  EncoderConfig cfg_;
  const Vocabulary* vocab_;
  NodePtr embeddings_;
  LstmCell fw_, bw_;            // f1 document Bi-LSTM
  LstmCell qfw_, qbw_;          // f4 question Bi-LSTM
  std::vector<NodePtr> convW_;  // per window size
  std::vector<NodePtr> convB_;
};

}  // namespace qsum
