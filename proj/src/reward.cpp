#include "qsum/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qsum {

double adequacy(const std::vector<std::string>& selectedTokens,
                const std::vector<std::string>& referenceTokens) {
  if (referenceTokens.empty()) throw std::invalid_argument("adequacy: empty reference");
  std::unordered_map<std::string, int> ref;
  for (const auto& t : referenceTokens) ++ref[lowercase(t)];
  int overlap = 0;
  for (const auto& t : selectedTokens) {
    auto it = ref.find(lowercase(t));
    if (it != ref.end() && it->second > 0) {
      ++overlap;
      --it->second;
    }
  }
  return static_cast<double>(overlap) / referenceTokens.size();
}

double fluency(const std::vector<int>& labels) {
  double switches = 0.0;
  for (size_t t = 1; t < labels.size(); ++t)
    switches += std::abs(labels[t] - labels[t - 1]);
  return -switches;
}

double length_penalty(const std::vector<int>& labels, const UnitSequence& units,
                      double delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("length_penalty: delta must lie in (0,1)");
  if (labels.size() != units.units.size())
    throw std::invalid_argument("length_penalty: misaligned labels");
  int selectedWords = 0;
  for (size_t t = 0; t < labels.size(); ++t)
    if (labels[t]) selectedWords += units.units[t].span.length();
  double ratio = static_cast<double>(selectedWords) / units.word_count();
  return -std::fabs(ratio - delta);
}

double qa_competency(const QaModel& model, const std::vector<NodePtr>& unitVectors,
                     const std::vector<int>& labels, const std::vector<QAPair>& pairs,
                     const std::vector<NodePtr>& questionVectors) {
  if (pairs.empty()) throw std::invalid_argument("qa_competency: zero QA pairs");
  bool anySelected = false;
  for (int l : labels) anySelected = anySelected || l == 1;
  if (!anySelected)
    return std::log(1.0 / model.config().numAnswers);

  double total = 0.0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    NodePtr probs = model.answer_probs(unitVectors, labels, questionVectors[k]);
    total += std::log(std::max(probs->value.v.at(pairs[k].answerId), 1e-12));
  }
  return total / pairs.size();
}

RewardBreakdown combine(double qaCompetency, double adequacy, double fluency,
                        double lengthPenalty, const RewardWeights& w) {
  RewardBreakdown b;
  b.qaCompetency = qaCompetency;
  b.adequacy = adequacy;
  b.fluency = fluency;
  b.lengthPenalty = lengthPenalty;
  b.total = qaCompetency + w.gamma * adequacy + w.alpha * fluency + w.beta * lengthPenalty;
  return b;
}

std::vector<std::string> selected_tokens(const UnitSequence& units,
                                         const std::vector<int>& labels) {
  std::vector<std::string> out;
  for (size_t t = 0; t < labels.size(); ++t)
    if (labels[t])
      out.insert(out.end(), units.units[t].text.begin(), units.units[t].text.end());
  return out;
}

RewardBreakdown total_reward(const QaModel& model,
                             const std::vector<NodePtr>& unitVectors,
                             const std::vector<int>& labels, const UnitSequence& units,
                             const std::vector<std::string>& referenceTokens,
                             const std::vector<QAPair>& pairs,
                             const std::vector<NodePtr>& questionVectors,
                             const RewardWeights& w) {
  double rc = qa_competency(model, unitVectors, labels, pairs, questionVectors);
  double ra = adequacy(selected_tokens(units, labels), referenceTokens);
  double rf = fluency(labels);
  double rl = length_penalty(labels, units, w.delta);
  return combine(rc, ra, rf, rl, w);
}

}  // namespace qsum
