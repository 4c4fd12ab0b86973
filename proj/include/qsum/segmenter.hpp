#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "qsum/corpus.hpp"

namespace qsum {

enum class UnitKind { Word, Chunk };

struct WordSpan {
  int start = 0;
  int end = 0;  // exclusive
  int length() const { return end - start; }
};

struct ExtractionUnit {
  int sentenceIndex = 0;
  WordSpan span;
  std::vector<std::string> text;
};

struct UnitSequence {
  std::string documentId;
  UnitKind kind = UnitKind::Word;
  std::vector<ExtractionUnit> units;

  int size() const { return static_cast<int>(units.size()); }
  int word_count() const;
};

struct GoldLabels {
  std::vector<int> labels;  // aligned to UnitSequence
};

// Bracketed constituent tree.
struct ParseNode {
  std::string label;
  std::vector<ParseNode> children;
  std::string token;  // leaf only
  bool is_leaf() const { return children.empty(); }
};

ParseNode parse_tree(const std::string& bracketed);
std::vector<std::string> tree_leaves(const ParseNode& root);

// Top-down split: a node governing <= maxWords leaves becomes one span.
std::vector<WordSpan> chunk_sentence(const std::string& bracketed,
                                     const std::vector<std::string>& tokens,
                                     int maxWords = 5);

// Sentences without a parse fall back to word units in chunk mode.
UnitSequence build_units(const Document& doc, UnitKind kind);

GoldLabels heuristic_labels(const UnitSequence& units, const Document& doc,
                            const std::unordered_set<std::string>& stopwords);

// Word-level positive rule, exposed for chunk aggregation and testing:
// token i of a sentence is positive iff it appears in the abstract and an
// adjacent in-sentence token does too, the pair not being two stopwords.
std::vector<std::vector<int>> heuristic_word_labels(
    const Document& doc, const std::unordered_set<std::string>& stopwords);

}  // namespace qsum
