#include "qsum/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsum/eval.hpp"

namespace qsum {

AdamOptimizer::AdamOptimizer(std::vector<NodePtr> params, double lr, double beta1,
                             double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p->value.shape);
    v_.emplace_back(p->value.shape);
  }
}

void AdamOptimizer::step(double clipNorm) {
  if (clipNorm > 0.0) {
    double sq = 0.0;
    for (const auto& p : params_)
      for (double g : p->grad.v) sq += g * g;
    double norm = std::sqrt(sq);
    if (norm > clipNorm) {
      double s = clipNorm / norm;
      for (auto& p : params_)
        for (auto& g : p->grad.v) g *= s;
    }
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    auto& p = *params_[i];
    for (int j = 0; j < p.value.size(); ++j) {
      double g = p.grad.v[j];
      m_[i].v[j] = beta1_ * m_[i].v[j] + (1.0 - beta1_) * g;
      v_[i].v[j] = beta2_ * v_[i].v[j] + (1.0 - beta2_) * g * g;
      double mhat = m_[i].v[j] / bc1;
      double vhat = v_[i].v[j] / bc2;
      p.value.v[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

std::vector<TrainExample> prepare_examples(
    const std::vector<Document>& docs, const TrainConfig& cfg,
    const std::unordered_set<std::string>& stopwords, const AnswerVocabulary* answers) {
  std::vector<TrainExample> out;
  for (const auto& doc : docs) {
    TrainExample ex;
    ex.doc = truncate_document(doc, cfg.maxWords);
    ex.units = build_units(ex.doc, cfg.unit);
    ex.goldLabels = heuristic_labels(ex.units, ex.doc, stopwords).labels;
    if (answers) ex.qaPairs = make_qa_pairs(ex.doc, *answers, cfg.maxQaPairs);
    out.push_back(std::move(ex));
  }
  return out;
}

Model Model::create(const TrainConfig& cfg, const Vocabulary& vocab, int numAnswers,
                    std::mt19937_64& rng) {
  Model m;
  m.encoderConfig = cfg.encoderConfig;
  m.encoderConfig.kind = cfg.encoder;
  m.extractorConfig.unitDim = m.encoderConfig.unit_dim();
  m.extractorConfig.posDim = m.encoderConfig.posDim;
  m.extractorConfig.stateHidden = cfg.extractorStateHidden;
  m.extractorConfig.mlpHidden = cfg.extractorMlpHidden;
  m.qaConfig.unitDim = m.encoderConfig.unit_dim();
  m.qaConfig.hidden = cfg.qaHidden;
  m.qaConfig.numAnswers = std::max(numAnswers, 1);
  m.encoder = std::make_unique<Encoder>(m.encoderConfig, vocab, m.params, rng);
  m.extractor = std::make_unique<Extractor>(m.extractorConfig, m.params, rng);
  m.qaModel = std::make_unique<QaModel>(m.qaConfig, m.params, rng);
  return m;
}

void Model::save(const std::string& path) const { params.save(path, step); }

void Model::load(const std::string& path) { step = params.load(path); }

namespace {

std::vector<NodePtr> by_prefix(const ParamStore& store,
                               const std::vector<std::string>& prefixes) {
  std::vector<NodePtr> out;
  for (const auto& [name, node] : store.items())
    for (const auto& p : prefixes)
      if (name.rfind(p, 0) == 0) {
        out.push_back(node);
        break;
      }
  return out;
}

void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw std::runtime_error("training diverged: " + what);
}

}  // namespace

std::vector<NodePtr> Model::supervised_params() const {
  return by_prefix(params, {"embed.", "enc.", "ext."});
}

std::vector<NodePtr> Model::qa_params() const {
  return by_prefix(params, {"q.", "qa."});
}

std::vector<EpochLog> pretrain_supervised(
    Model& model, const std::vector<TrainExample>& examples, const TrainConfig& cfg,
    const std::function<bool(int, double)>& shouldStop) {
  auto trainable = model.supervised_params();
  AdamOptimizer opt(trainable, cfg.learningRate);
  std::vector<EpochLog> logs;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epochLoss = 0.0;
    for (size_t start = 0; start < examples.size(); start += cfg.batchSize) {
      size_t end = std::min(examples.size(), start + cfg.batchSize);
      model.params.zero_grads();
      double inv = 1.0 / static_cast<double>(end - start);
      for (size_t i = start; i < end; ++i) {
        const auto& ex = examples[i];
        auto unitVecs = model.encoder->encode_units(ex.doc, ex.units);
        auto pos = position_vectors(ex.units, model.encoderConfig.posDim);
        NodePtr loss =
            model.extractor->teacher_forced_nll(unitVecs, pos, ex.goldLabels);
        require_finite(loss->scalar(), "NLL is not finite (doc " + ex.doc.id + ")");
        epochLoss += loss->scalar();
        backward(scale(loss, inv));
      }
      opt.step(cfg.gradClip);
      ++model.step;
    }
    logs.push_back({epoch, epochLoss / examples.size()});
    if (shouldStop && shouldStop(epoch, logs.back().loss)) break;
  }
  return logs;
}

std::vector<EpochLog> pretrain_qa(Model& model,
                                  const std::vector<TrainExample>& examples,
                                  const TrainConfig& cfg) {
  auto trainable = model.qa_params();
  AdamOptimizer opt(trainable, cfg.learningRate);
  std::vector<EpochLog> logs;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epochLoss = 0.0;
    int counted = 0;
    for (size_t start = 0; start < examples.size(); start += cfg.batchSize) {
      size_t end = std::min(examples.size(), start + cfg.batchSize);
      model.params.zero_grads();
      int inBatch = 0;
      for (size_t i = start; i < end; ++i)
        if (!examples[i].qaPairs.empty()) ++inBatch;
      if (inBatch == 0) continue;
      for (size_t i = start; i < end; ++i) {
        const auto& ex = examples[i];
        if (ex.qaPairs.empty()) continue;
        auto unitVecs = model.encoder->encode_units(ex.doc, ex.units);
        auto labels = gold_summary_labels(ex.units, ex.doc);
        std::vector<NodePtr> qVecs;
        for (const auto& p : ex.qaPairs)
          qVecs.push_back(model.encoder->encode_question(p.questionTokens));
        NodePtr loss = model.qaModel->qa_loss(unitVecs, labels, ex.qaPairs, qVecs);
        require_finite(loss->scalar(), "QA loss is not finite (doc " + ex.doc.id + ")");
        epochLoss += loss->scalar();
        ++counted;
        backward(scale(loss, 1.0 / inBatch));
      }
      opt.step(cfg.gradClip);
    }
    logs.push_back({epoch, counted ? epochLoss / counted : 0.0});
  }
  return logs;
}

PolicyGradientResult policy_gradient_step(Model& model, const TrainExample& ex,
                                          const TrainConfig& cfg, double baseline,
                                          std::mt19937_64& rng) {
  if (ex.qaPairs.empty())
    throw std::invalid_argument("policy_gradient_step: document " + ex.doc.id +
                                " has no QA pairs");
  auto unitVecs = model.encoder->encode_units(ex.doc, ex.units);
  auto pos = position_vectors(ex.units, model.encoderConfig.posDim);
  std::vector<NodePtr> qVecs;
  for (const auto& p : ex.qaPairs)
    qVecs.push_back(model.encoder->encode_question(p.questionTokens));
  std::vector<std::string> reference = ex.doc.abstract_tokens();

  PolicyGradientResult res;
  int n = cfg.samplesPerDocument;
  for (int s = 0; s < n; ++s) {
    auto [sample, logProb] =
        model.extractor->sample_with_log_prob(unitVecs, pos, rng);
    RewardBreakdown rb = total_reward(*model.qaModel, unitVecs, sample.labels,
                                      ex.units, reference, ex.qaPairs, qVecs,
                                      cfg.weights);
    require_finite(rb.total, "reward is not finite (doc " + ex.doc.id + ")");
    // Minimizing -(R - b) * log P pushes up the likelihood of high-reward samples.
    backward(scale(logProb, -(rb.total - baseline) / n));
    res.meanReward += rb.total / n;
    res.meanBreakdown.qaCompetency += rb.qaCompetency / n;
    res.meanBreakdown.adequacy += rb.adequacy / n;
    res.meanBreakdown.fluency += rb.fluency / n;
    res.meanBreakdown.lengthPenalty += rb.lengthPenalty / n;
    res.meanBreakdown.total += rb.total / n;
    ++res.samples;
  }
  return res;
}

void train_rl(Model& model, const std::vector<TrainExample>& examples,
              const TrainConfig& cfg, std::vector<RlLog>* log,
              const std::string& checkpointPath,
              const std::function<void(int)>& onStep) {
  std::vector<const TrainExample*> usable;
  for (const auto& ex : examples)
    if (!ex.qaPairs.empty()) usable.push_back(&ex);
  if (usable.empty()) throw std::runtime_error("train_rl: no documents with QA pairs");

  auto trainable = model.supervised_params();
  if (cfg.unfreezeQa) {
    auto qa = model.qa_params();
    trainable.insert(trainable.end(), qa.begin(), qa.end());
  }
  AdamOptimizer opt(trainable, cfg.learningRate);
  std::mt19937_64 rng(cfg.seed);

  double baseline = 0.0;
  bool baselineInit = false;
  for (int s = 0; s < cfg.rlSteps; ++s) {
    const TrainExample& ex = *usable[s % usable.size()];
    model.params.zero_grads();
    double b = cfg.baseline && baselineInit ? baseline : 0.0;
    PolicyGradientResult res = policy_gradient_step(model, ex, cfg, b, rng);
    opt.step(cfg.gradClip);
    ++model.step;
    if (cfg.baseline) {
      if (!baselineInit) {
        baseline = res.meanReward;
        baselineInit = true;
      } else {
        baseline = cfg.baselineDecay * baseline +
                   (1.0 - cfg.baselineDecay) * res.meanReward;
      }
    }
    if (log) log->push_back({s, ex.doc.id, res.meanBreakdown});
    if (onStep) onStep(s);
    if (!checkpointPath.empty() && cfg.checkpointInterval > 0 &&
        (s + 1) % cfg.checkpointInterval == 0)
      model.save(checkpointPath);
  }
  if (!checkpointPath.empty()) model.save(checkpointPath);
}

RewardBreakdown evaluate_reward(const Model& model,
                                const std::vector<TrainExample>& examples,
                                const RewardWeights& weights) {
  RewardBreakdown mean;
  int counted = 0;
  for (const auto& ex : examples) {
    if (ex.qaPairs.empty()) continue;
    auto unitVecs = model.encoder->encode_units(ex.doc, ex.units);
    auto pos = position_vectors(ex.units, model.encoderConfig.posDim);
    LabelSequence decoded = model.extractor->decode_greedy(unitVecs, pos);
    std::vector<NodePtr> qVecs;
    for (const auto& p : ex.qaPairs)
      qVecs.push_back(model.encoder->encode_question(p.questionTokens));
    RewardBreakdown rb =
        total_reward(*model.qaModel, unitVecs, decoded.labels, ex.units,
                     ex.doc.abstract_tokens(), ex.qaPairs, qVecs, weights);
    mean.qaCompetency += rb.qaCompetency;
    mean.adequacy += rb.adequacy;
    mean.fluency += rb.fluency;
    mean.lengthPenalty += rb.lengthPenalty;
    mean.total += rb.total;
    ++counted;
  }
  if (counted > 0) {
    mean.qaCompetency /= counted;
    mean.adequacy /= counted;
    mean.fluency /= counted;
    mean.lengthPenalty /= counted;
    mean.total /= counted;
  }
  return mean;
}

double label_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("label_f1: corpus size mismatch");
  long long tp = 0, fp = 0, fn = 0;
  for (size_t d = 0; d < predicted.size(); ++d) {
    if (predicted[d].size() != gold[d].size())
      throw std::invalid_argument("label_f1: sequence length mismatch");
    for (size_t t = 0; t < predicted[d].size(); ++t) {
      if (predicted[d][t] == 1 && gold[d][t] == 1) ++tp;
      if (predicted[d][t] == 1 && gold[d][t] == 0) ++fp;
      if (predicted[d][t] == 0 && gold[d][t] == 1) ++fn;
    }
  }
  double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

}  // namespace qsum
