#pragma once

#include <random>
#include <vector>

#include "qsum/qagen.hpp"
#include "qsum/tensor.hpp"

namespace qsum {

struct QaModelConfig {
  int unitDim = 512;
  int hidden = 256;
  int numAnswers = 0;
};

struct EmptySelectionError : std::runtime_error {
  EmptySelectionError() : std::runtime_error("attend: no selected units") {}
};

// Answers Cloze questions from the selected units via bilinear attention and
// a fully connected output layer over the answer vocabulary.
class QaModel {
 public:
  QaModel(const QaModelConfig& cfg, ParamStore& params, std::mt19937_64& rng);
  QaModel(const QaModelConfig& cfg, const ParamStore& params);

  const QaModelConfig& config() const { return cfg_; }

  struct Attention {
    NodePtr weights;  // over selected units only, sums to 1
    NodePtr context;
    std::vector<int> selected;  // unit indices carrying the weights
  };

  // Bilinear attention restricted to units with label 1. Throws
  // EmptySelectionError when nothing is selected.
  Attention attend(const std::vector<NodePtr>& unitVectors,
                   const std::vector<int>& labels,
                   const NodePtr& questionVector) const;

  NodePtr answer_distribution(const NodePtr& contextVector,
                              const NodePtr& questionVector) const;

  // Mean negative log-likelihood of the gold answers over the pairs, with
  // question vectors supplied by the caller (one per pair).
  NodePtr qa_loss(const std::vector<NodePtr>& unitVectors,
                  const std::vector<int>& labels,
                  const std::vector<QAPair>& pairs,
                  const std::vector<NodePtr>& questionVectors) const;

  // Probability vector for one question; empty selection uses a zero context.
  NodePtr answer_probs(const std::vector<NodePtr>& unitVectors,
                       const std::vector<int>& labels,
                       const NodePtr& questionVector) const;

 private:
  QaModelConfig cfg_;
  NodePtr Walpha_, Wu_, bu_, We_;
};

}  // namespace qsum
