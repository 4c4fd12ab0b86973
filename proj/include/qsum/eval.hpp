#pragma once

#include <string>
#include <vector>

#include "qsum/encoder.hpp"
#include "qsum/extractor.hpp"
#include "qsum/qagen.hpp"
#include "qsum/qamodel.hpp"
#include "qsum/segmenter.hpp"

namespace qsum {

enum class RougeVariant { R1, R2, RL };
enum class RougeMode { FullLengthF1, RecallAt75Bytes };

struct RougeScore {
  RougeVariant variant = RougeVariant::R1;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore rouge(const std::vector<std::string>& systemTokens,
                 const std::vector<std::string>& referenceTokens,
                 RougeVariant variant, RougeMode mode = RougeMode::FullLengthF1);

// Source words (document order, per occurrence) whose lowercased form
// appears anywhere in the abstract.
std::vector<std::string> gold_summary(const Document& doc);

// Labels selecting every unit of the first n sentences.
std::vector<int> lead_baseline(const UnitSequence& units, int nSentences = 3);

// Labels selecting units that share >= 1 word with the abstract.
std::vector<int> gold_summary_labels(const UnitSequence& units, const Document& doc);

enum class QaInputMode { NoText, SystemSumm, GoldSumm, FullText };

QaInputMode qa_input_mode_from_string(const std::string& s);
std::string to_string(QaInputMode m);

struct QaEvalReport {
  QaInputMode mode = QaInputMode::GoldSumm;
  QaType qaType = QaType::Ner;
  double accuracy = 0.0;  // percent correct
  int questions = 0;
};

struct QaEvalExample {
  const Document* doc;
  const UnitSequence* units;
  std::vector<QAPair> pairs;
};

QaEvalReport qa_accuracy(QaInputMode mode, const std::vector<QaEvalExample>& split,
                         const Encoder& encoder, const Extractor& extractor,
                         const QaModel& qaModel);

}  // namespace qsum
