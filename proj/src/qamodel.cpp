#include "qsum/qamodel.hpp"

#include <cmath>
#include <stdexcept>

namespace qsum {

QaModel::QaModel(const QaModelConfig& cfg, ParamStore& params, std::mt19937_64& rng)
    : cfg_(cfg) {
  if (cfg.numAnswers <= 0)
    throw std::invalid_argument("QaModel: numAnswers must be positive");
  double su = 1.0 / std::sqrt(static_cast<double>(cfg.unitDim));
  Walpha_ = params.create("qa.Walpha", {cfg.unitDim, cfg.unitDim}, su, rng);
  Wu_ = params.create("qa.Wu", {cfg.hidden, 4 * cfg.unitDim},
                      1.0 / std::sqrt(4.0 * cfg.unitDim), rng);
  bu_ = params.create_zeros("qa.bu", {cfg.hidden});
  We_ = params.create("qa.We", {cfg.numAnswers, cfg.hidden},
                      1.0 / std::sqrt(static_cast<double>(cfg.hidden)), rng);
}

QaModel::QaModel(const QaModelConfig& cfg, const ParamStore& params) : cfg_(cfg) {
  Walpha_ = params.get("qa.Walpha");
  Wu_ = params.get("qa.Wu");
  bu_ = params.get("qa.bu");
  We_ = params.get("qa.We");
}

QaModel::Attention QaModel::attend(const std::vector<NodePtr>& unitVectors,
                                   const std::vector<int>& labels,
                                   const NodePtr& questionVector) const {
  if (unitVectors.size() != labels.size())
    throw std::invalid_argument("attend: misaligned labels");
  Attention att;
  for (size_t t = 0; t < labels.size(); ++t)
    if (labels[t] == 1) att.selected.push_back(static_cast<int>(t));
  if (att.selected.empty()) throw EmptySelectionError();

  // Scores only over selected units; unselected ones are excluded outright.
  NodePtr Wq = matmul(Walpha_, questionVector);
  std::vector<NodePtr> scores;
  scores.reserve(att.selected.size());
  for (int t : att.selected) scores.push_back(sum(mul(unitVectors[t], Wq)));
  att.weights = softmax(concat(scores));

  NodePtr context;
  for (size_t i = 0; i < att.selected.size(); ++i) {
    NodePtr term = smul(unitVectors[att.selected[i]], pick(att.weights, static_cast<int>(i)));
    context = context ? add(context, term) : term;
  }
  att.context = context;
  return att;
}

NodePtr QaModel::answer_distribution(const NodePtr& contextVector,
                                     const NodePtr& questionVector) const {
  NodePtr u = concat({contextVector, questionVector,
                      abs_diff(contextVector, questionVector),
                      mul(contextVector, questionVector)});
  NodePtr hidden = relu(add(matmul(Wu_, u), bu_));
  return softmax(matmul(We_, hidden));
}

NodePtr QaModel::answer_probs(const std::vector<NodePtr>& unitVectors,
                              const std::vector<int>& labels,
                              const NodePtr& questionVector) const {
  NodePtr context;
  try {
    context = attend(unitVectors, labels, questionVector).context;
  } catch (const EmptySelectionError&) {
    context = constant(Tensor({cfg_.unitDim}));
  }
  return answer_distribution(context, questionVector);
}

NodePtr QaModel::qa_loss(const std::vector<NodePtr>& unitVectors,
                         const std::vector<int>& labels,
                         const std::vector<QAPair>& pairs,
                         const std::vector<NodePtr>& questionVectors) const {
  if (pairs.empty()) throw std::invalid_argument("qa_loss: zero QA pairs");
  if (pairs.size() != questionVectors.size())
    throw std::invalid_argument("qa_loss: misaligned question vectors");
  NodePtr loss = constant(Tensor::scalar(0.0));
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].answerId < 0 || pairs[k].answerId >= cfg_.numAnswers)
      throw std::invalid_argument("qa_loss: answer id out of vocabulary");
    NodePtr probs = answer_probs(unitVectors, labels, questionVectors[k]);
    loss = sub(loss, log_op(pick(probs, pairs[k].answerId)));
  }
  return scale(loss, 1.0 / static_cast<double>(pairs.size()));
}

}  // namespace qsum
