#pragma once

#include <random>
#include <vector>

#include "qsum/encoder.hpp"
#include "qsum/tensor.hpp"

namespace qsum {

struct ExtractorConfig {
  int unitDim = 512;
  int posDim = 30;
  int stateHidden = 128;  // partial-summary LSTM
  int mlpHidden = 128;
};

struct LabelSequence {
  std::vector<int> labels;
  std::vector<double> perStepProbabilities;  // p(y_t = 1)
  double logProbability = 0.0;               // sum of chosen-action log-probs
};

// Autoregressive extractor: a unidirectional LSTM over gated previous unit
// vectors feeds an MLP that scores each unit for inclusion.
class Extractor {
 public:
  Extractor(const ExtractorConfig& cfg, ParamStore& params, std::mt19937_64& rng);
  Extractor(const ExtractorConfig& cfg, const ParamStore& params);

  const ExtractorConfig& config() const { return cfg_; }

  struct StepResult {
    NodePtr state;      // s_{t+1} inputs: (s_t, y_t * h_t)
    NodePtr cell;
    NodePtr probability;  // sigmoid selection probability, shape [1]
  };

  // One step of the recursion: advances the partial-summary state with the
  // previous decision and scores the current unit.
  StepResult step(const NodePtr& prevState, const NodePtr& prevCell, int prevLabel,
                  const NodePtr& prevUnitVector, const NodePtr& unitVector,
                  const NodePtr& positionVector) const;

  NodePtr teacher_forced_nll(const std::vector<NodePtr>& unitVectors,
                             const std::vector<NodePtr>& positionVectors,
                             const std::vector<int>& goldLabels) const;

  LabelSequence decode_greedy(const std::vector<NodePtr>& unitVectors,
                              const std::vector<NodePtr>& positionVectors) const;

  LabelSequence sample(const std::vector<NodePtr>& unitVectors,
                       const std::vector<NodePtr>& positionVectors,
                       std::mt19937_64& rng) const;

  // Sampling that also returns the sampled sequence's log-probability as a
  // graph node, sharing one forward pass.
  std::pair<LabelSequence, NodePtr> sample_with_log_prob(
      const std::vector<NodePtr>& unitVectors,
      const std::vector<NodePtr>& positionVectors, std::mt19937_64& rng) const;

  // Log-probability of a fixed label sequence, as a graph node (for REINFORCE).
  NodePtr sequence_log_prob(const std::vector<NodePtr>& unitVectors,
                            const std::vector<NodePtr>& positionVectors,
                            const std::vector<int>& labels) const;

  static constexpr double kProbClamp = 1e-7;

 private:
  NodePtr step_probability(NodePtr& h, NodePtr& c, int prevLabel,
                           const NodePtr& prevUnit, const NodePtr& unit,
                           const NodePtr& pos) const;

  ExtractorConfig cfg_;
  LstmCell cell_;
  NodePtr Wa_, ba_, wy_, by_;
};

std::vector<NodePtr> position_vectors(const UnitSequence& units, int posDim);

}  // namespace qsum
