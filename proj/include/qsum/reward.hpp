#pragma once

#include <vector>

#include "qsum/qamodel.hpp"
#include "qsum/segmenter.hpp"

namespace qsum {

struct RewardWeights {
  double gamma = 1.0;   // adequacy weight
  double alpha = 0.5;   // fluency weight
  double beta = 1.0;    // length weight, beta = 2*alpha unless overridden
  double delta = 0.15;  // target selected-word ratio
};

struct RewardBreakdown {
  double qaCompetency = 0.0;  // R_c, <= 0
  double adequacy = 0.0;      // R_a, in [0, 1]
  double fluency = 0.0;       // R_f, <= 0
  double lengthPenalty = 0.0; // R_l, <= 0
  double total = 0.0;         // R_c + gamma*R_a + alpha*R_f + beta*R_l
};

// Clipped unigram overlap count (multiset intersection), lowercased.
double adequacy(const std::vector<std::string>& selectedTokens,
                const std::vector<std::string>& referenceTokens);

double fluency(const std::vector<int>& labels);

double length_penalty(const std::vector<int>& labels, const UnitSequence& units,
                      double delta);

// Mean log-likelihood of gold answers given the selection. Empty selections
// fall back to a uniform distribution over the answer vocabulary.
double qa_competency(const QaModel& model, const std::vector<NodePtr>& unitVectors,
                     const std::vector<int>& labels, const std::vector<QAPair>& pairs,
                     const std::vector<NodePtr>& questionVectors);

RewardBreakdown combine(double qaCompetency, double adequacy, double fluency,
                        double lengthPenalty, const RewardWeights& w);

std::vector<std::string> selected_tokens(const UnitSequence& units,
                                         const std::vector<int>& labels);

RewardBreakdown total_reward(const QaModel& model,
                             const std::vector<NodePtr>& unitVectors,
                             const std::vector<int>& labels, const UnitSequence& units,
                             const std::vector<std::string>& referenceTokens,
                             const std::vector<QAPair>& pairs,
                             const std::vector<NodePtr>& questionVectors,
                             const RewardWeights& w);

}  // namespace qsum
