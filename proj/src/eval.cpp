#include "qsum/eval.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qsum {

namespace {

std::vector<std::string> lc_tokens(const std::vector<std::string>& toks) {
  std::vector<std::string> out(toks.size());
  for (size_t i = 0; i < toks.size(); ++i) out[i] = lowercase(toks[i]);
  return out;
}

// Keeps whole tokens while the accumulated byte length (tokens + single
// separating spaces) stays within the budget.
std::vector<std::string> truncate_bytes(const std::vector<std::string>& toks,
                                        size_t budget) {
  std::vector<std::string> out;
  size_t used = 0;
  for (const auto& t : toks) {
    size_t cost = t.size() + (out.empty() ? 0 : 1);
    if (used + cost > budget) break;
    out.push_back(t);
    used += cost;
  }
  return out;
}

double ngram_overlap(const std::vector<std::string>& sys,
                     const std::vector<std::string>& ref, int n, int& sysCount,
                     int& refCount) {
  auto grams = [n](const std::vector<std::string>& toks) {
    std::map<std::vector<std::string>, int> out;
    for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i)
      ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
    return out;
  };
  auto sg = grams(sys);
  auto rg = grams(ref);
  sysCount = 0;
  refCount = 0;
  for (const auto& [g, c] : sg) sysCount += c;
  for (const auto& [g, c] : rg) refCount += c;
  int overlap = 0;
  for (const auto& [g, c] : sg) {
    auto it = rg.find(g);
    if (it != rg.end()) overlap += std::min(c, it->second);
  }
  return overlap;
}

int lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

RougeScore rouge(const std::vector<std::string>& systemTokens,
                 const std::vector<std::string>& referenceTokens,
                 RougeVariant variant, RougeMode mode) {
  if (referenceTokens.empty()) throw std::invalid_argument("rouge: empty reference");
  std::vector<std::string> sys = lc_tokens(systemTokens);
  std::vector<std::string> ref = lc_tokens(referenceTokens);
  if (mode == RougeMode::RecallAt75Bytes) {
    sys = truncate_bytes(sys, 75);
    ref = truncate_bytes(ref, 75);
  }

  double matched = 0.0;
  int sysCount = 0, refCount = 0;
  switch (variant) {
    case RougeVariant::R1:
      matched = ngram_overlap(sys, ref, 1, sysCount, refCount);
      break;
    case RougeVariant::R2:
      matched = ngram_overlap(sys, ref, 2, sysCount, refCount);
      break;
    case RougeVariant::RL:
      matched = lcs_length(sys, ref);
      sysCount = static_cast<int>(sys.size());
      refCount = static_cast<int>(ref.size());
      break;
  }

  RougeScore score;
  score.variant = variant;
  score.precision = sysCount > 0 ? matched / sysCount : 0.0;
  score.recall = refCount > 0 ? matched / refCount : 0.0;
  score.f1 = score.precision + score.recall > 0.0
                 ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                 : 0.0;
  return score;
}

std::vector<std::string> gold_summary(const Document& doc) {
  std::unordered_set<std::string> abstractTypes;
  for (const auto& t : doc.abstract_tokens()) abstractTypes.insert(lowercase(t));
  std::vector<std::string> out;
  for (const auto& t : doc.source_tokens())
    if (abstractTypes.count(lowercase(t))) out.push_back(t);
  return out;
}

std::vector<int> lead_baseline(const UnitSequence& units, int nSentences) {
  std::vector<int> labels(units.units.size(), 0);
  for (size_t t = 0; t < units.units.size(); ++t)
    if (units.units[t].sentenceIndex < nSentences) labels[t] = 1;
  return labels;
}

std::vector<int> gold_summary_labels(const UnitSequence& units, const Document& doc) {
  std::unordered_set<std::string> abstractTypes;
  for (const auto& t : doc.abstract_tokens()) abstractTypes.insert(lowercase(t));
  std::vector<int> labels(units.units.size(), 0);
  for (size_t t = 0; t < units.units.size(); ++t)
    for (const auto& w : units.units[t].text)
      if (abstractTypes.count(lowercase(w))) {
        labels[t] = 1;
        break;
      }
  return labels;
}

QaInputMode qa_input_mode_from_string(const std::string& s) {
  if (s == "notext") return QaInputMode::NoText;
  if (s == "systemsumm") return QaInputMode::SystemSumm;
  if (s == "goldsumm") return QaInputMode::GoldSumm;
  if (s == "fulltext") return QaInputMode::FullText;
  throw std::invalid_argument("unknown qa input mode: " + s +
                              " (expected notext|systemsumm|goldsumm|fulltext)");
}

std::string to_string(QaInputMode m) {
  switch (m) {
    case QaInputMode::NoText: return "notext";
    case QaInputMode::SystemSumm: return "systemsumm";
    case QaInputMode::GoldSumm: return "goldsumm";
    case QaInputMode::FullText: return "fulltext";
  }
  return "?";
}

QaEvalReport qa_accuracy(QaInputMode mode, const std::vector<QaEvalExample>& split,
                         const Encoder& encoder, const Extractor& extractor,
                         const QaModel& qaModel) {
  QaEvalReport report;
  report.mode = mode;
  int correct = 0, total = 0;
  for (const auto& ex : split) {
    if (ex.pairs.empty()) continue;
    report.qaType = ex.pairs.front().type;
    std::vector<NodePtr> unitVecs = encoder.encode_units(*ex.doc, *ex.units);

    std::vector<int> labels;
    switch (mode) {
      case QaInputMode::NoText:
        labels.assign(ex.units->units.size(), 0);  // zero context downstream
        break;
      case QaInputMode::FullText:
        labels.assign(ex.units->units.size(), 1);
        break;
      case QaInputMode::GoldSumm:
        labels = gold_summary_labels(*ex.units, *ex.doc);
        break;
      case QaInputMode::SystemSumm: {
        auto pos = position_vectors(*ex.units, encoder.config().posDim);
        labels = extractor.decode_greedy(unitVecs, pos).labels;
        break;
      }
    }

    for (const auto& pair : ex.pairs) {
      NodePtr q = encoder.encode_question(pair.questionTokens);
      NodePtr probs = qaModel.answer_probs(unitVecs, labels, q);
      int argmax = static_cast<int>(
          std::max_element(probs->value.v.begin(), probs->value.v.end()) -
          probs->value.v.begin());
      if (argmax == pair.answerId) ++correct;
      ++total;
    }
  }
  report.questions = total;
  report.accuracy = total > 0 ? 100.0 * correct / total : 0.0;
  return report;
}

}  // namespace qsum
