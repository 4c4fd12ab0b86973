// Command-line front end for the QA-rewarded extractive summarizer.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <random>

#include "qsum/corpus.hpp"
#include "qsum/encoder.hpp"
#include "qsum/eval.hpp"
#include "qsum/extractor.hpp"
#include "qsum/qagen.hpp"
#include "qsum/qamodel.hpp"
#include "qsum/render.hpp"
#include "qsum/reward.hpp"
#include "qsum/segmenter.hpp"
#include "qsum/tensor.hpp"
#include "qsum/trainer.hpp"

using nlohmann::json;
using namespace qsum;

namespace {

struct CommonOpts {
  std::string input;
  std::string stopwords;
  std::string unit = "chunk";
  std::string encoder = "recurrent";
  std::string qaType = "ner";
  int maxWords = 400;
  int k = 10;
  int batch = 128;
  int minAnswerFreq = 5;
  int vocabMinFreq = 1;
  double delta = 0.15;
  uint64_t seed = 42;
  int workers = 1;
};

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--input", o.input, "corpus JSONL file")->required();
  cmd->add_option("--max-words", o.maxWords, "article truncation length");
  cmd->add_option("--unit", o.unit, "extraction unit: word|chunk");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--workers", o.workers, "parallel workers for per-document stages");
}

TrainConfig make_config(const CommonOpts& o) {
  TrainConfig cfg;
  cfg.batchSize = o.batch;
  cfg.maxQaPairs = o.k;
  cfg.encoder = encoder_kind_from_string(o.encoder);
  cfg.unit = o.unit == "word" ? UnitKind::Word : UnitKind::Chunk;
  cfg.qaType = qa_type_from_string(o.qaType);
  cfg.weights.delta = o.delta;
  cfg.seed = o.seed;
  cfg.maxWords = o.maxWords;
  if (o.unit != "word" && o.unit != "chunk")
    throw CLI::ValidationError("--unit", "expected word|chunk");
  return cfg;
}

std::unordered_set<std::string> stopwords_or_empty(const std::string& path) {
  if (path.empty()) return {};
  return load_stopwords(path);
}

// Architecture metadata written next to each checkpoint so later commands
// can rebuild the same model against the same corpus.
void save_meta(const std::string& ckptPath, const TrainConfig& cfg, int vocabMinFreq,
               int minAnswerFreq) {
  json j;
  j["encoder"] = to_string(cfg.encoder);
  j["unit"] = cfg.unit == UnitKind::Word ? "word" : "chunk";
  j["qa_type"] = to_string(cfg.qaType);
  j["max_words"] = cfg.maxWords;
  j["k"] = cfg.maxQaPairs;
  j["vocab_min_freq"] = vocabMinFreq;
  j["answer_min_freq"] = minAnswerFreq;
  std::ofstream out(ckptPath + ".meta.json");
  out << j.dump(2) << "\n";
}

void load_meta(const std::string& ckptPath, TrainConfig& cfg, int& vocabMinFreq,
               int& minAnswerFreq) {
  std::ifstream in(ckptPath + ".meta.json");
  if (!in) throw std::runtime_error("missing checkpoint metadata: " + ckptPath +
                                    ".meta.json");
  json j;
  in >> j;
  cfg.encoder = encoder_kind_from_string(j.at("encoder").get<std::string>());
  cfg.unit = j.at("unit").get<std::string>() == "word" ? UnitKind::Word : UnitKind::Chunk;
  cfg.qaType = qa_type_from_string(j.at("qa_type").get<std::string>());
  cfg.maxWords = j.at("max_words").get<int>();
  cfg.maxQaPairs = j.at("k").get<int>();
  vocabMinFreq = j.at("vocab_min_freq").get<int>();
  minAnswerFreq = j.at("answer_min_freq").get<int>();
}

struct LoadedModel {
  std::vector<Document> docs;
  Vocabulary vocab;
  AnswerVocabulary answers{QaType::Ner};
  std::vector<TrainExample> examples;
  Model model;
};

LoadedModel load_for_checkpoint(const std::string& corpusPath,
                                const std::string& ckptPath,
                                const std::string& stopwordPath, TrainConfig& cfg) {
  int vocabMinFreq = 1, answerMinFreq = 5;
  load_meta(ckptPath, cfg, vocabMinFreq, answerMinFreq);
  LoadedModel lm;
  lm.docs = load_corpus(corpusPath);
  lm.vocab = build_vocab(lm.docs, vocabMinFreq);
  lm.answers = build_answer_vocab(lm.docs, cfg.qaType, answerMinFreq);
  lm.examples = prepare_examples(lm.docs, cfg, stopwords_or_empty(stopwordPath),
                                 &lm.answers);
  std::mt19937_64 rng(cfg.seed);
  lm.model = Model::create(cfg, lm.vocab, lm.answers.size(), rng);
  lm.model.load(ckptPath);
  return lm;
}

int cmd_preprocess(const CommonOpts& o, const std::string& output) {
  TrainConfig cfg = make_config(o);
  auto docs = load_corpus(o.input);
  auto stop = stopwords_or_empty(o.stopwords);

  std::vector<TrainExample> examples(docs.size());
  int workers = std::max(1, o.workers);
  std::vector<std::future<void>> futs;
  std::atomic<size_t> next{0};
  for (int w = 0; w < workers; ++w)
    futs.push_back(std::async(std::launch::async, [&] {
      for (size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) {
        TrainExample ex;
        ex.doc = truncate_document(docs[i], cfg.maxWords);
        ex.units = build_units(ex.doc, cfg.unit);
        ex.goldLabels = heuristic_labels(ex.units, ex.doc, stop).labels;
        examples[i] = std::move(ex);
      }
    }));
  for (auto& f : futs) f.get();

  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  for (const auto& ex : examples) {
    json j;
    j["id"] = ex.doc.id;
    json units = json::array();
    for (const auto& u : ex.units.units)
      units.push_back({{"sentence", u.sentenceIndex},
                       {"start", u.span.start},
                       {"end", u.span.end}});
    j["units"] = units;
    j["labels"] = ex.goldLabels;
    out << j.dump() << "\n";
  }
  std::cerr << "preprocess: wrote " << examples.size() << " documents to " << output
            << "\n";
  return 0;
}

int cmd_qagen(const CommonOpts& o, const std::string& output) {
  auto docs = load_corpus(o.input);
  QaType type = qa_type_from_string(o.qaType);
  AnswerVocabulary answers = build_answer_vocab(docs, type, o.minAnswerFreq);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  size_t total = 0;
  for (const auto& doc : docs) {
    Document trunc = truncate_document(doc, o.maxWords);
    auto pairs = make_qa_pairs(trunc, answers, o.k);
    json j;
    j["id"] = doc.id;
    json qa = json::array();
    for (const auto& p : pairs)
      qa.push_back({{"question", p.questionTokens},
                    {"answer", p.answerSurface},
                    {"type", to_string(p.type)},
                    {"abstract_sentence", p.abstractSentenceIndex}});
    j["qa"] = qa;
    out << j.dump() << "\n";
    total += pairs.size();
  }
  std::cerr << "qagen: " << total << " pairs over " << docs.size() << " documents ("
            << answers.size() << " answers)\n";
  return 0;
}

int cmd_pretrain(const CommonOpts& o, const std::string& ckpt, int epochs, double lr,
                 int qaEpochs, const std::string& embeddingsPath) {
  TrainConfig cfg = make_config(o);
  cfg.epochs = epochs;
  cfg.learningRate = lr;

  auto docs = load_corpus(o.input);
  Vocabulary vocab = build_vocab(docs, o.vocabMinFreq);
  AnswerVocabulary answers = build_answer_vocab(docs, cfg.qaType, o.minAnswerFreq);
  auto examples = prepare_examples(docs, cfg, stopwords_or_empty(o.stopwords), &answers);

  std::mt19937_64 rng(cfg.seed);
  Model model = Model::create(cfg, vocab, answers.size(), rng);
  if (!embeddingsPath.empty())
    model.encoder->load_pretrained_embeddings(
        load_embeddings(embeddingsPath, model.encoderConfig.embedDim));

  auto logs = pretrain_supervised(model, examples, cfg);
  for (const auto& l : logs)
    std::cerr << "pretrain epoch " << l.epoch << " nll " << l.loss << "\n";

  if (qaEpochs > 0) {
    TrainConfig qaCfg = cfg;
    qaCfg.epochs = qaEpochs;
    auto qLogs = pretrain_qa(model, examples, qaCfg);
    for (const auto& l : qLogs)
      std::cerr << "qa-pretrain epoch " << l.epoch << " loss " << l.loss << "\n";
  }

  model.save(ckpt);
  save_meta(ckpt, cfg, o.vocabMinFreq, o.minAnswerFreq);
  std::cerr << "pretrain: checkpoint written to " << ckpt << "\n";
  return 0;
}

int cmd_train_rl(const CommonOpts& o, const std::string& inCkpt,
                 const std::string& outCkpt, int steps, double lr, int nSamples,
                 bool noBaseline, bool unfreezeQa, double gamma, double alpha,
                 double beta, bool betaSet, const std::string& logCsv) {
  TrainConfig cfg = make_config(o);
  LoadedModel lm = load_for_checkpoint(o.input, inCkpt, o.stopwords, cfg);
  cfg.rlSteps = steps;
  cfg.learningRate = lr;
  cfg.samplesPerDocument = nSamples;
  cfg.baseline = !noBaseline;
  cfg.unfreezeQa = unfreezeQa;
  cfg.weights.gamma = gamma;
  cfg.weights.alpha = alpha;
  cfg.weights.beta = betaSet ? beta : 2.0 * alpha;
  cfg.weights.delta = o.delta;
  cfg.seed = o.seed;

  std::vector<RlLog> log;
  train_rl(lm.model, lm.examples, cfg, &log, outCkpt);
  save_meta(outCkpt, cfg, o.vocabMinFreq, o.minAnswerFreq);

  if (!logCsv.empty()) {
    std::ofstream csv(logCsv);
    csv << "step,doc_id,r_c,r_a,r_f,r_l,total\n";
    for (const auto& row : log)
      csv << row.step << "," << row.docId << "," << row.breakdown.qaCompetency << ","
          << row.breakdown.adequacy << "," << row.breakdown.fluency << ","
          << row.breakdown.lengthPenalty << "," << row.breakdown.total << "\n";
  }
  RewardBreakdown final = evaluate_reward(lm.model, lm.examples, cfg.weights);
  std::cerr << "train-rl: final mean greedy reward " << final.total << "\n";
  return 0;
}

int cmd_summarize(const CommonOpts& o, const std::string& ckpt,
                  const std::string& docId, const std::string& format,
                  const std::string& output, bool asJson) {
  TrainConfig cfg = make_config(o);
  LoadedModel lm = load_for_checkpoint(o.input, ckpt, o.stopwords, cfg);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw std::runtime_error("cannot write " + output);
    out = &file;
  }

  for (const auto& ex : lm.examples) {
    if (!docId.empty() && ex.doc.id != docId) continue;
    auto unitVecs = lm.model.encoder->encode_units(ex.doc, ex.units);
    auto pos = position_vectors(ex.units, lm.model.encoderConfig.posDim);
    LabelSequence decoded = lm.model.extractor->decode_greedy(unitVecs, pos);
    RenderedSummary rendered = render_summary(ex.doc, ex.units, decoded.labels);
    if (asJson) {
      json j;
      j["id"] = ex.doc.id;
      j["labels"] = decoded.labels;
      json spans = json::array();
      for (size_t t = 0; t < decoded.labels.size(); ++t)
        if (decoded.labels[t])
          spans.push_back({{"sentence", ex.units.units[t].sentenceIndex},
                           {"start", ex.units.units[t].span.start},
                           {"end", ex.units.units[t].span.end}});
      j["selected_spans"] = spans;
      j["html"] = rendered.html;
      *out << j.dump() << "\n";
    } else if (format == "html") {
      *out << "<p>" << rendered.html << "</p>\n";
    } else {
      *out << "=== " << ex.doc.id << " ===\n" << rendered.plain << "\n";
    }
  }
  return 0;
}

int cmd_eval_rouge(const CommonOpts& o, const std::string& ckpt,
                   const std::string& modeStr, bool lead3, bool asJson) {
  TrainConfig cfg = make_config(o);
  LoadedModel lm = load_for_checkpoint(o.input, ckpt, o.stopwords, cfg);
  RougeMode mode = modeStr == "75bytes" ? RougeMode::RecallAt75Bytes
                                        : RougeMode::FullLengthF1;

  double r1 = 0, r2 = 0, rl = 0;
  int n = 0;
  for (const auto& ex : lm.examples) {
    std::vector<int> labels;
    if (lead3) {
      labels = lead_baseline(ex.units, 3);
    } else {
      auto unitVecs = lm.model.encoder->encode_units(ex.doc, ex.units);
      auto pos = position_vectors(ex.units, lm.model.encoderConfig.posDim);
      labels = lm.model.extractor->decode_greedy(unitVecs, pos).labels;
    }
    auto sys = selected_tokens(ex.units, labels);
    auto ref = ex.doc.abstract_tokens();
    auto pickScore = [&](RougeVariant v) {
      RougeScore s = rouge(sys, ref, v, mode);
      return mode == RougeMode::RecallAt75Bytes ? s.recall : s.f1;
    };
    r1 += pickScore(RougeVariant::R1);
    r2 += pickScore(RougeVariant::R2);
    rl += pickScore(RougeVariant::RL);
    ++n;
  }
  if (n > 0) {
    r1 /= n;
    r2 /= n;
    rl /= n;
  }
  std::string system = lead3 ? "Lead-3" : "QASumm";
  if (asJson) {
    json j{{"system", system}, {"mode", modeStr},
           {"r1", r1},         {"r2", r2},
           {"rl", rl},         {"documents", n}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << std::fixed << std::setprecision(2);
    std::cout << "System    R-1    R-2    R-L\n";
    std::cout << system << "  " << 100 * r1 << "  " << 100 * r2 << "  " << 100 * rl
              << "\n";
  }
  return 0;
}

int cmd_eval_qa(const CommonOpts& o, const std::string& ckpt,
                const std::string& modeStr, bool asJson) {
  TrainConfig cfg = make_config(o);
  LoadedModel lm = load_for_checkpoint(o.input, ckpt, o.stopwords, cfg);

  std::vector<QaEvalExample> split;
  for (const auto& ex : lm.examples)
    split.push_back({&ex.doc, &ex.units, ex.qaPairs});

  std::vector<QaInputMode> modes;
  if (modeStr == "all") {
    modes = {QaInputMode::NoText, QaInputMode::SystemSumm, QaInputMode::GoldSumm,
             QaInputMode::FullText};
  } else {
    modes = {qa_input_mode_from_string(modeStr)};
  }

  json rows = json::array();
  if (!asJson) std::cout << "Mode         Accuracy  Questions\n";
  for (QaInputMode m : modes) {
    QaEvalReport r = qa_accuracy(m, split, *lm.model.encoder, *lm.model.extractor,
                                 *lm.model.qaModel);
    if (asJson) {
      rows.push_back({{"mode", to_string(m)},
                      {"qa_type", to_string(r.qaType)},
                      {"accuracy", r.accuracy},
                      {"questions", r.questions}});
    } else {
      std::cout << std::left << std::setw(12) << to_string(m) << " " << std::fixed
                << std::setprecision(1) << std::setw(8) << r.accuracy << "  "
                << r.questions << "\n";
    }
  }
  if (asJson) std::cout << rows.dump() << "\n";
  return 0;
}

int cmd_grad_check(uint64_t seed) {
  std::mt19937_64 rng(seed);

  // Small shared setup: tiny vocab, one 3-sentence document.
  Document doc;
  doc.id = "gradcheck";
  for (int s = 0; s < 3; ++s) {
    Sentence sent;
    for (int w = 0; w < 4; ++w)
      sent.tokens.push_back("w" + std::to_string((s * 4 + w) % 7));
    doc.sentences.push_back(sent);
  }
  Sentence abs;
  abs.tokens = {"w1", "w2", "w3"};
  doc.abstract.push_back(abs);
  Vocabulary vocab = build_vocab({doc}, 1);

  double worst = 0.0;
  for (EncoderKind kind : {EncoderKind::Recurrent, EncoderKind::Convolutional}) {
    EncoderConfig ecfg;
    ecfg.kind = kind;
    ecfg.embedDim = 8;
    ecfg.lstmHidden = 6;
    ecfg.cnnFilters = 3;
    ecfg.posDim = 6;
    ParamStore params;
    std::mt19937_64 prng(seed);
    Encoder encoder(ecfg, vocab, params, prng);
    ExtractorConfig xcfg;
    xcfg.unitDim = ecfg.unit_dim();
    xcfg.posDim = ecfg.posDim;
    xcfg.stateHidden = 5;
    xcfg.mlpHidden = 5;
    Extractor extractor(xcfg, params, prng);
    QaModelConfig qcfg;
    qcfg.unitDim = ecfg.unit_dim();
    qcfg.hidden = 5;
    qcfg.numAnswers = 4;
    QaModel qa(qcfg, params, prng);

    UnitSequence units = build_units(doc, UnitKind::Word);
    std::vector<int> gold(units.size(), 0);
    gold[1] = gold[2] = 1;

    auto build = [&] {
      auto vecs = encoder.encode_units(doc, units);
      auto pos = position_vectors(units, ecfg.posDim);
      NodePtr nll = extractor.teacher_forced_nll(vecs, pos, gold);
      NodePtr q = encoder.encode_question({"w1", Vocabulary::blank_token(), "w3"});
      std::vector<int> labels(units.size(), 0);
      labels[0] = labels[3] = 1;
      NodePtr probs = qa.answer_probs(vecs, labels, q);
      return add(nll, scale(log_op(pick(probs, 1)), -1.0));
    };
    double err = finite_difference_check(build, params.nodes(), 1e-5, 6, &rng);
    std::cout << "grad-check " << to_string(kind) << ": max relative error " << err
              << "\n";
    worst = std::max(worst, err);
  }
  std::cout << (worst < 1e-4 ? "grad-check PASS" : "grad-check FAIL") << " (max "
            << worst << ")\n";
  return worst < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QA-rewarded extractive summarizer"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string output, ckpt, inCkpt, outCkpt, docId, format = "text",
              rougeMode = "full", qaMode = "all", logCsv, embeddingsPath;
  int epochs = 50, qaEpochs = 20, steps = 2000, nSamples = 1;
  double lr = 1e-3, gamma = 1.0, alpha = 0.5, beta = 1.0;
  bool noBaseline = false, unfreezeQa = false, lead3 = false, asJson = false;

  auto* pre = app.add_subcommand("preprocess", "derive units and heuristic labels");
  add_data_flags(pre, o);
  pre->add_option("--stopwords", o.stopwords, "stopword list, one token per line");
  pre->add_option("--output", output, "units/labels JSONL")->required();

  auto* qg = app.add_subcommand("qagen", "build Cloze QA pairs");
  add_data_flags(qg, o);
  qg->add_option("--qa-type", o.qaType, "root|subjobj|ner");
  qg->add_option("--k", o.k, "max QA pairs per document");
  qg->add_option("--min-answer-freq", o.minAnswerFreq, "answer pruning threshold");
  qg->add_option("--output", output, "QA pairs JSONL")->required();

  auto* pt = app.add_subcommand("pretrain", "supervised pretraining");
  add_data_flags(pt, o);
  pt->add_option("--stopwords", o.stopwords, "stopword list");
  pt->add_option("--encoder", o.encoder, "recurrent|convolutional");
  pt->add_option("--qa-type", o.qaType, "root|subjobj|ner");
  pt->add_option("--k", o.k, "max QA pairs per document");
  pt->add_option("--batch", o.batch, "mini-batch size");
  pt->add_option("--epochs", epochs, "supervised epochs");
  pt->add_option("--qa-epochs", qaEpochs, "QA pretraining epochs on gold summaries");
  pt->add_option("--lr", lr, "learning rate");
  pt->add_option("--embeddings", embeddingsPath, "pretrained word embeddings");
  pt->add_option("--vocab-min-freq", o.vocabMinFreq, "vocabulary frequency cutoff");
  pt->add_option("--min-answer-freq", o.minAnswerFreq, "answer pruning threshold");
  pt->add_option("--checkpoint", ckpt, "output checkpoint path")->required();

  auto* rl = app.add_subcommand("train-rl", "REINFORCE fine-tuning");
  add_data_flags(rl, o);
  rl->add_option("--stopwords", o.stopwords, "stopword list");
  rl->add_option("--checkpoint", inCkpt, "pretrained checkpoint")->required();
  rl->add_option("--out", outCkpt, "output checkpoint path")->required();
  rl->add_option("--steps", steps, "RL steps (one document update each)");
  rl->add_option("--lr", lr, "learning rate");
  rl->add_option("--n-samples", nSamples, "samples per document per step");
  rl->add_option("--gamma", gamma, "adequacy weight");
  rl->add_option("--alpha", alpha, "fluency weight");
  auto* betaOpt = rl->add_option("--beta", beta, "length weight (default 2*alpha)");
  rl->add_option("--delta", o.delta, "target selected-word ratio");
  rl->add_flag("--no-baseline", noBaseline, "disable the moving-average baseline");
  rl->add_flag("--unfreeze-qa", unfreezeQa, "let RL update QA parameters");
  rl->add_option("--log", logCsv, "reward log CSV");

  auto* sm = app.add_subcommand("summarize", "decode and render summaries");
  add_data_flags(sm, o);
  sm->add_option("--stopwords", o.stopwords, "stopword list");
  sm->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  sm->add_option("--doc-id", docId, "restrict to one document");
  sm->add_option("--format", format, "text|html");
  sm->add_option("--output", output, "write to file instead of stdout");
  sm->add_flag("--json", asJson, "machine-readable output");

  auto* er = app.add_subcommand("eval-rouge", "ROUGE scores for decoded summaries");
  add_data_flags(er, o);
  er->add_option("--stopwords", o.stopwords, "stopword list");
  er->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  er->add_option("--mode", rougeMode, "full|75bytes");
  er->add_flag("--lead3", lead3, "score the Lead-3 baseline instead");
  er->add_flag("--json", asJson, "machine-readable output");

  auto* eq = app.add_subcommand("eval-qa", "QA accuracy by input mode");
  add_data_flags(eq, o);
  eq->add_option("--stopwords", o.stopwords, "stopword list");
  eq->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  eq->add_option("--mode", qaMode, "notext|systemsumm|goldsumm|fulltext|all");
  eq->add_flag("--json", asJson, "machine-readable output");

  auto* gc = app.add_subcommand("grad-check", "finite-difference gradient suite");
  gc->add_option("--seed", o.seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return cmd_preprocess(o, output);
    if (qg->parsed()) return cmd_qagen(o, output);
    if (pt->parsed()) return cmd_pretrain(o, ckpt, epochs, lr, qaEpochs, embeddingsPath);
    if (rl->parsed())
      return cmd_train_rl(o, inCkpt, outCkpt, steps, lr, nSamples, noBaseline,
                          unfreezeQa, gamma, alpha, beta, betaOpt->count() > 0, logCsv);
    if (sm->parsed()) return cmd_summarize(o, ckpt, docId, format, output, asJson);
    if (er->parsed()) return cmd_eval_rouge(o, ckpt, rougeMode, lead3, asJson);
    if (eq->parsed()) return cmd_eval_qa(o, ckpt, qaMode, asJson);
    if (gc->parsed()) return cmd_grad_check(o.seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
