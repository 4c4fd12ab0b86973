#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qsum/encoder.hpp"
#include "qsum/extractor.hpp"
#include "qsum/qagen.hpp"
#include "qsum/qamodel.hpp"
#include "qsum/reward.hpp"

namespace qsum {

struct TrainConfig {
  int batchSize = 128;
  int maxQaPairs = 10;  // K
  EncoderKind encoder = EncoderKind::Recurrent;
  UnitKind unit = UnitKind::Chunk;
  QaType qaType = QaType::Ner;
  double learningRate = 1e-3;
  int epochs = 20;
  int rlSteps = 2000;
  RewardWeights weights;
  int samplesPerDocument = 1;  // N in the gradient estimator
  bool baseline = true;
  double baselineDecay = 0.99;
  double gradClip = 5.0;
  uint64_t seed = 42;
  int checkpointInterval = 500;
  bool unfreezeQa = false;  // QA params frozen during RL by default
  int maxWords = 400;

  // Architecture dimensions; encoder kind above overrides encoderConfig.kind.
  EncoderConfig encoderConfig;
  int extractorStateHidden = 128;
  int extractorMlpHidden = 128;
  int qaHidden = 256;
};

// Adam with bias correction; state keyed by parameter node.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::vector<NodePtr> params, double lr = 1e-3,
                         double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  // Applies one update from accumulated grads, after global-norm clipping.
  void step(double clipNorm = 0.0);
  double learning_rate() const { return lr_; }

 private:
  std::vector<NodePtr> params_;
  std::vector<Tensor> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
};

// One document prepared for training/evaluation.
struct TrainExample {
  Document doc;  // truncated
  UnitSequence units;
  std::vector<int> goldLabels;
  std::vector<QAPair> qaPairs;
};

std::vector<TrainExample> prepare_examples(
    const std::vector<Document>& docs, const TrainConfig& cfg,
    const std::unordered_set<std::string>& stopwords, const AnswerVocabulary* answers);

// Everything the pipeline trains, bundled for checkpointing.
struct Model {
  EncoderConfig encoderConfig;
  ExtractorConfig extractorConfig;
  QaModelConfig qaConfig;
  ParamStore params;
  std::unique_ptr<Encoder> encoder;
  std::unique_ptr<Extractor> extractor;
  std::unique_ptr<QaModel> qaModel;
  int64_t step = 0;

  static Model create(const TrainConfig& cfg, const Vocabulary& vocab, int numAnswers,
                      std::mt19937_64& rng);
  void save(const std::string& path) const;
  void load(const std::string& path);

  std::vector<NodePtr> supervised_params() const;  // encoder + extractor
  std::vector<NodePtr> qa_params() const;          // question encoder + QA head
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
};

// Teacher-forced NLL training of encoder + extractor. Returns per-epoch
// mean losses; throws on NaN loss.
std::vector<EpochLog> pretrain_supervised(
    Model& model, const std::vector<TrainExample>& examples, const TrainConfig& cfg,
    const std::function<bool(int epoch, double loss)>& shouldStop = {});

// QA pretraining on gold extractive selections (GoldSumm inputs).
std::vector<EpochLog> pretrain_qa(Model& model,
                                  const std::vector<TrainExample>& examples,
                                  const TrainConfig& cfg);

struct PolicyGradientResult {
  double meanReward = 0.0;
  RewardBreakdown meanBreakdown;
  int samples = 0;
};

// Accumulates the REINFORCE gradient for one document into the parameter
// grads: mean over N samples of -(R - b) * grad log P(sample).
PolicyGradientResult policy_gradient_step(Model& model, const TrainExample& ex,
                                          const TrainConfig& cfg, double baseline,
                                          std::mt19937_64& rng);

struct RlLog {
  int step = 0;
  std::string docId;
  RewardBreakdown breakdown;
};

// REINFORCE fine-tuning; one step = one document update. Optionally appends
// reward rows to csvLog (step, doc id, R_c, R_a, R_f, R_l, total).
void train_rl(Model& model, const std::vector<TrainExample>& examples,
              const TrainConfig& cfg, std::vector<RlLog>* log = nullptr,
              const std::string& checkpointPath = "",
              const std::function<void(int step)>& onStep = {});

// Mean greedy-decode reward over the examples (no parameter updates).
RewardBreakdown evaluate_reward(const Model& model,
                                const std::vector<TrainExample>& examples,
                                const RewardWeights& weights);

double label_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& gold);

}  // namespace qsum
