#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qsum/corpus.hpp"

namespace qsum {

enum class QaType { Root, SubjObj, Ner };

std::string to_string(QaType t);
QaType qa_type_from_string(const std::string& s);

struct QAPair {
  std::vector<std::string> questionTokens;  // abstract sentence with BLANK
  std::string answerSurface;                // full span text, human readable
  int answerId = -1;
  int abstractSentenceIndex = 0;
  QaType type = QaType::Ner;
};

class AnswerVocabulary {
 public:
  explicit AnswerVocabulary(QaType type) : type_(type) {}
  QaType type() const { return type_; }
  int add(const std::string& lcAnswer);
  int id(const std::string& lcAnswer) const;  // -1 when absent
  int size() const { return static_cast<int>(answers_.size()); }
  const std::string& answer(int id) const { return answers_.at(id); }

 private:
  QaType type_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> answers_;
};

// An answer candidate: the blanked token position plus the surface covering
// its span (single token except NER, where the span may be multi-token).
struct AnswerCandidate {
  int position = 0;      // token index of the blank
  int spanEnd = 0;       // exclusive
  std::string surface;   // lowercased span text used for vocabulary matching
};

// Throws when the sentence lacks the annotation layer the type needs.
std::vector<AnswerCandidate> extract_answer_candidates(const Sentence& sentence,
                                                       QaType type);

// Counts candidate surfaces over all abstracts; retains count >= minFreq.
AnswerVocabulary build_answer_vocab(const std::vector<Document>& docs, QaType type,
                                    int minFreq = 5);

// Round-robin over abstract sentences up to the K budget.
std::vector<QAPair> make_qa_pairs(const Document& doc, const AnswerVocabulary& vocab,
                                  int k = 10);

}  // namespace qsum
