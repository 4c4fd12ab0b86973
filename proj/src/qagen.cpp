#include "qsum/qagen.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsum {

std::string to_string(QaType t) {
  switch (t) {
    case QaType::Root: return "root";
    case QaType::SubjObj: return "subjobj";
    case QaType::Ner: return "ner";
  }
  return "?";
}

QaType qa_type_from_string(const std::string& s) {
  if (s == "root") return QaType::Root;
  if (s == "subjobj") return QaType::SubjObj;
  if (s == "ner") return QaType::Ner;
  throw std::invalid_argument("unknown qa type: " + s + " (expected root|subjobj|ner)");
}

int AnswerVocabulary::add(const std::string& lcAnswer) {
  auto it = ids_.find(lcAnswer);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(answers_.size());
  ids_.emplace(lcAnswer, id);
  answers_.push_back(lcAnswer);
  return id;
}

int AnswerVocabulary::id(const std::string& lcAnswer) const {
  auto it = ids_.find(lcAnswer);
  return it == ids_.end() ? -1 : it->second;
}

std::vector<AnswerCandidate> extract_answer_candidates(const Sentence& sentence,
                                                       QaType type) {
  std::vector<AnswerCandidate> out;
  auto span_surface = [&](int start, int end) {
    std::string s;
    for (int i = start; i < end; ++i) {
      if (i > start) s += ' ';
      s += lowercase(sentence.tokens[i]);
    }
    return s;
  };
  switch (type) {
    case QaType::Ner: {
      if (!sentence.ner)
        throw std::runtime_error("sentence lacks required annotation layer: ner");
      for (const auto& e : *sentence.ner)
        out.push_back({e.start, e.end, span_surface(e.start, e.end)});
      break;
    }
    case QaType::Root: {
      if (!sentence.deps)
        throw std::runtime_error("sentence lacks required annotation layer: deps");
      for (const auto& a : *sentence.deps)
        if (a.head < 0)
          out.push_back({a.dependent, a.dependent + 1,
                         span_surface(a.dependent, a.dependent + 1)});
      break;
    }
    case QaType::SubjObj: {
      if (!sentence.deps)
        throw std::runtime_error("sentence lacks required annotation layer: deps");
      for (const auto& a : *sentence.deps)
        if (a.relation == "nsubj" || a.relation == "csubj" || a.relation == "obj" ||
            a.relation == "iobj")
          out.push_back({a.dependent, a.dependent + 1,
                         span_surface(a.dependent, a.dependent + 1)});
      break;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const AnswerCandidate& a, const AnswerCandidate& b) {
              return a.position < b.position;
            });
  return out;
}

AnswerVocabulary build_answer_vocab(const std::vector<Document>& docs, QaType type,
                                    int minFreq) {
  std::unordered_map<std::string, int> freq;
  std::vector<std::string> order;
  for (const auto& d : docs)
    for (const auto& s : d.abstract)
      for (const auto& c : extract_answer_candidates(s, type))
        if (freq[c.surface]++ == 0) order.push_back(c.surface);

  AnswerVocabulary vocab(type);
  for (const auto& a : order)
    if (freq[a] >= minFreq) vocab.add(a);
  if (vocab.size() == 0)
    throw std::runtime_error("answer vocabulary is empty for qa type " + to_string(type));
  return vocab;
}

std::vector<QAPair> make_qa_pairs(const Document& doc, const AnswerVocabulary& vocab,
                                  int k) {
  // Per-sentence pools of surviving candidates, in position order.
  std::vector<std::vector<QAPair>> pools(doc.abstract.size());
  for (size_t si = 0; si < doc.abstract.size(); ++si) {
    const Sentence& s = doc.abstract[si];
    for (const auto& c : extract_answer_candidates(s, vocab.type())) {
      int id = vocab.id(c.surface);
      if (id < 0) continue;
      QAPair p;
      p.type = vocab.type();
      p.abstractSentenceIndex = static_cast<int>(si);
      p.answerSurface = c.surface;
      p.answerId = id;
      for (int i = 0; i < s.size(); ++i) {
        if (i == c.position) {
          p.questionTokens.push_back(Vocabulary::blank_token());
          i = c.spanEnd - 1;  // whole span collapses into one blank
        } else {
          p.questionTokens.push_back(s.tokens[i]);
        }
      }
      pools[si].push_back(std::move(p));
    }
  }

  // Round-robin across sentences so every sentence with a surviving
  // candidate contributes before any sentence gets a second pair.
  std::vector<QAPair> out;
  std::vector<size_t> next(pools.size(), 0);
  bool progress = true;
  while (static_cast<int>(out.size()) < k && progress) {
    progress = false;
    for (size_t si = 0; si < pools.size() && static_cast<int>(out.size()) < k; ++si) {
      if (next[si] < pools[si].size()) {
        out.push_back(pools[si][next[si]++]);
        progress = true;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const QAPair& a, const QAPair& b) {
    return a.abstractSentenceIndex < b.abstractSentenceIndex;
  });
  return out;
}

}  // namespace qsum
