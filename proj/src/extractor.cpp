#include "qsum/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsum {

namespace {

double clamp_prob(double p) {
  return std::clamp(p, Extractor::kProbClamp, 1.0 - Extractor::kProbClamp);
}

}  // namespace

Extractor::Extractor(const ExtractorConfig& cfg, ParamStore& params, std::mt19937_64& rng)
    : cfg_(cfg) {
  cell_ = LstmCell::create("ext.lstm", cfg.unitDim, cfg.stateHidden, params, rng);
  int inDim = cfg.unitDim + cfg.posDim + cfg.stateHidden;
  double s = 1.0 / std::sqrt(static_cast<double>(inDim));
  Wa_ = params.create("ext.Wa", {cfg.mlpHidden, inDim}, s, rng);
  ba_ = params.create_zeros("ext.ba", {cfg.mlpHidden});
  wy_ = params.create("ext.wy", {1, cfg.mlpHidden},
                      1.0 / std::sqrt(static_cast<double>(cfg.mlpHidden)), rng);
  by_ = params.create_zeros("ext.by", {1});
}

Extractor::Extractor(const ExtractorConfig& cfg, const ParamStore& params) : cfg_(cfg) {
  cell_.Wx = params.get("ext.lstm.Wx");
  cell_.Wh = params.get("ext.lstm.Wh");
  cell_.b = params.get("ext.lstm.b");
  cell_.hidden = cell_.Wh->value.shape[1];
  Wa_ = params.get("ext.Wa");
  ba_ = params.get("ext.ba");
  wy_ = params.get("ext.wy");
  by_ = params.get("ext.by");
}

NodePtr Extractor::step_probability(NodePtr& h, NodePtr& c, int prevLabel,
                                    const NodePtr& prevUnit, const NodePtr& unit,
                                    const NodePtr& pos) const {
  // Gate: the previous unit enters the state only when it was selected.
  NodePtr gated = prevLabel == 1 ? prevUnit : constant(Tensor({cfg_.unitDim}));
  std::tie(h, c) = cell_.step(gated, h, c);
  NodePtr a = relu(add(matmul(Wa_, concat({unit, pos, h})), ba_));
  return sigmoid(add(matmul(wy_, a), by_));
}

Extractor::StepResult Extractor::step(const NodePtr& prevState, const NodePtr& prevCell,
                                      int prevLabel, const NodePtr& prevUnitVector,
                                      const NodePtr& unitVector,
                                      const NodePtr& positionVector) const {
  if (prevLabel != 0 && prevLabel != 1)
    throw std::invalid_argument("extractor step: prevLabel must be 0 or 1");
  NodePtr h = prevState, c = prevCell;
  NodePtr p = step_probability(h, c, prevLabel, prevUnitVector, unitVector, positionVector);
  return {h, c, p};
}

NodePtr Extractor::teacher_forced_nll(const std::vector<NodePtr>& unitVectors,
                                      const std::vector<NodePtr>& positionVectors,
                                      const std::vector<int>& goldLabels) const {
  if (unitVectors.size() != goldLabels.size() ||
      unitVectors.size() != positionVectors.size())
    throw std::invalid_argument("teacher_forced_nll: misaligned inputs");
  NodePtr h = cell_.zero_state(), c = cell_.zero_state();
  NodePtr zeroUnit = constant(Tensor({cfg_.unitDim}));
  NodePtr loss = constant(Tensor::scalar(0.0));
  NodePtr one = constant(Tensor::scalar(1.0));
  for (size_t t = 0; t < unitVectors.size(); ++t) {
    int prevLabel = t == 0 ? 0 : goldLabels[t - 1];
    const NodePtr& prevUnit = t == 0 ? zeroUnit : unitVectors[t - 1];
    NodePtr p = step_probability(h, c, prevLabel, prevUnit, unitVectors[t],
                                 positionVectors[t]);
    NodePtr term = goldLabels[t] == 1 ? log_op(p) : log_op(sub(one, p));
    loss = sub(loss, term);
  }
  return loss;
}

LabelSequence Extractor::decode_greedy(const std::vector<NodePtr>& unitVectors,
                                       const std::vector<NodePtr>& positionVectors) const {
  if (positionVectors.size() != unitVectors.size())
    throw std::invalid_argument("extractor: misaligned position vectors");
  LabelSequence out;
  NodePtr h = cell_.zero_state(), c = cell_.zero_state();
  NodePtr zeroUnit = constant(Tensor({cfg_.unitDim}));
  for (size_t t = 0; t < unitVectors.size(); ++t) {
    int prevLabel = t == 0 ? 0 : out.labels[t - 1];
    const NodePtr& prevUnit = t == 0 ? zeroUnit : unitVectors[t - 1];
    NodePtr p = step_probability(h, c, prevLabel, prevUnit, unitVectors[t],
                                 positionVectors[t]);
    double prob = clamp_prob(p->scalar());
    int label = prob >= 0.5 ? 1 : 0;  // tie selects the unit
    out.labels.push_back(label);
    out.perStepProbabilities.push_back(prob);
    out.logProbability += std::log(label == 1 ? prob : 1.0 - prob);
  }
  return out;
}

LabelSequence Extractor::sample(const std::vector<NodePtr>& unitVectors,
                                const std::vector<NodePtr>& positionVectors,
                                std::mt19937_64& rng) const {
  if (positionVectors.size() != unitVectors.size())
    throw std::invalid_argument("extractor: misaligned position vectors");
  LabelSequence out;
  NodePtr h = cell_.zero_state(), c = cell_.zero_state();
  NodePtr zeroUnit = constant(Tensor({cfg_.unitDim}));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (size_t t = 0; t < unitVectors.size(); ++t) {
    int prevLabel = t == 0 ? 0 : out.labels[t - 1];
    const NodePtr& prevUnit = t == 0 ? zeroUnit : unitVectors[t - 1];
    NodePtr p = step_probability(h, c, prevLabel, prevUnit, unitVectors[t],
                                 positionVectors[t]);
    double prob = clamp_prob(p->scalar());
    int label = uni(rng) < prob ? 1 : 0;
    out.labels.push_back(label);
    out.perStepProbabilities.push_back(prob);
    out.logProbability += std::log(label == 1 ? prob : 1.0 - prob);
  }
  return out;
}

std::pair<LabelSequence, NodePtr> Extractor::sample_with_log_prob(
    const std::vector<NodePtr>& unitVectors,
    const std::vector<NodePtr>& positionVectors, std::mt19937_64& rng) const {
  if (positionVectors.size() != unitVectors.size())
    throw std::invalid_argument("extractor: misaligned position vectors");
  LabelSequence out;
  NodePtr h = cell_.zero_state(), c = cell_.zero_state();
  NodePtr zeroUnit = constant(Tensor({cfg_.unitDim}));
  NodePtr one = constant(Tensor::scalar(1.0));
  NodePtr lp = constant(Tensor::scalar(0.0));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (size_t t = 0; t < unitVectors.size(); ++t) {
    int prevLabel = t == 0 ? 0 : out.labels[t - 1];
    const NodePtr& prevUnit = t == 0 ? zeroUnit : unitVectors[t - 1];
    NodePtr p = step_probability(h, c, prevLabel, prevUnit, unitVectors[t],
                                 positionVectors[t]);
    double prob = clamp_prob(p->scalar());
    int label = uni(rng) < prob ? 1 : 0;
    out.labels.push_back(label);
    out.perStepProbabilities.push_back(prob);
    out.logProbability += std::log(label == 1 ? prob : 1.0 - prob);
    lp = add(lp, label == 1 ? log_op(p) : log_op(sub(one, p)));
  }
  return {std::move(out), lp};
}

NodePtr Extractor::sequence_log_prob(const std::vector<NodePtr>& unitVectors,
                                     const std::vector<NodePtr>& positionVectors,
                                     const std::vector<int>& labels) const {
  if (labels.size() != unitVectors.size() ||
      positionVectors.size() != unitVectors.size())
    throw std::invalid_argument("sequence_log_prob: misaligned inputs");
  NodePtr h = cell_.zero_state(), c = cell_.zero_state();
  NodePtr zeroUnit = constant(Tensor({cfg_.unitDim}));
  NodePtr one = constant(Tensor::scalar(1.0));
  NodePtr lp = constant(Tensor::scalar(0.0));
  for (size_t t = 0; t < unitVectors.size(); ++t) {
    int prevLabel = t == 0 ? 0 : labels[t - 1];
    const NodePtr& prevUnit = t == 0 ? zeroUnit : unitVectors[t - 1];
    NodePtr p = step_probability(h, c, prevLabel, prevUnit, unitVectors[t],
                                 positionVectors[t]);
    lp = add(lp, labels[t] == 1 ? log_op(p) : log_op(sub(one, p)));
  }
  return lp;
}

std::vector<NodePtr> position_vectors(const UnitSequence& units, int posDim) {
  std::vector<NodePtr> out;
  out.reserve(units.units.size());
  for (const auto& u : units.units)
    out.push_back(constant(positional_embedding(u.sentenceIndex, posDim)));
  return out;
}

}  // namespace qsum
