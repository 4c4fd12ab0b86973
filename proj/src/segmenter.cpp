#include "qsum/segmenter.hpp"

#include <cctype>
#include <stdexcept>

namespace qsum {

namespace {

struct TreeParser {
  const std::string& s;
  size_t pos = 0;

  explicit TreeParser(const std::string& str) : s(str) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  std::string read_atom() {
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '(' && s[pos] != ')')
      ++pos;
    if (pos == start) throw std::runtime_error("malformed parse tree: empty atom at " +
                                               std::to_string(pos));
    return s.substr(start, pos - start);
  }

  ParseNode parse_node() {
    skip_ws();
    if (pos >= s.size() || s[pos] != '(')
      throw std::runtime_error("malformed parse tree: expected '(' at " + std::to_string(pos));
    ++pos;
    skip_ws();
    ParseNode node;
    node.label = read_atom();
    skip_ws();
    while (pos < s.size() && s[pos] != ')') {
      if (s[pos] == '(') {
        node.children.push_back(parse_node());
      } else {
        ParseNode leaf;
        leaf.token = read_atom();
        node.children.push_back(std::move(leaf));
      }
      skip_ws();
    }
    if (pos >= s.size()) throw std::runtime_error("malformed parse tree: unbalanced brackets");
    ++pos;  // ')'
    if (node.children.empty())
      throw std::runtime_error("malformed parse tree: node '" + node.label + "' has no children");
    return node;
  }
};

void collect_leaves(const ParseNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.token);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

int leaf_count(const ParseNode& n) {
  if (n.is_leaf()) return 1;
  int c = 0;
  for (const auto& ch : n.children) c += leaf_count(ch);
  return c;
}

void split_top_down(const ParseNode& n, int offset, int maxWords,
                    std::vector<WordSpan>& out) {
  int n_leaves = leaf_count(n);
  if (n_leaves <= maxWords) {
    out.push_back({offset, offset + n_leaves});
    return;
  }
  int off = offset;
  for (const auto& c : n.children) {
    split_top_down(c, off, maxWords, out);
    off += leaf_count(c);
  }
}

}  // namespace

ParseNode parse_tree(const std::string& bracketed) {
  TreeParser p(bracketed);
  ParseNode root = p.parse_node();
  p.skip_ws();
  if (p.pos != bracketed.size())
    throw std::runtime_error("malformed parse tree: trailing content at " +
                             std::to_string(p.pos));
  return root;
}

std::vector<std::string> tree_leaves(const ParseNode& root) {
  std::vector<std::string> out;
  collect_leaves(root, out);
  return out;
}

std::vector<WordSpan> chunk_sentence(const std::string& bracketed,
                                     const std::vector<std::string>& tokens,
                                     int maxWords) {
  ParseNode root = parse_tree(bracketed);
  std::vector<std::string> leaves = tree_leaves(root);
  if (leaves != tokens)
    throw std::runtime_error("parse tree leaves do not match sentence tokens (" +
                             std::to_string(leaves.size()) + " leaves vs " +
                             std::to_string(tokens.size()) + " tokens)");
  std::vector<WordSpan> spans;
  split_top_down(root, 0, maxWords, spans);
  return spans;
}

int UnitSequence::word_count() const {
  int n = 0;
  for (const auto& u : units) n += u.span.length();
  return n;
}

UnitSequence build_units(const Document& doc, UnitKind kind) {
  UnitSequence seq;
  seq.documentId = doc.id;
  seq.kind = kind;
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence& s = doc.sentences[si];
    std::vector<WordSpan> spans;
    if (kind == UnitKind::Chunk && s.parse) {
      spans = chunk_sentence(*s.parse, s.tokens);
    } else {
      for (int i = 0; i < s.size(); ++i) spans.push_back({i, i + 1});
    }
    for (const auto& sp : spans) {
      ExtractionUnit u;
      u.sentenceIndex = static_cast<int>(si);
      u.span = sp;
      u.text.assign(s.tokens.begin() + sp.start, s.tokens.begin() + sp.end);
      seq.units.push_back(std::move(u));
    }
  }
  return seq;
}

std::vector<std::vector<int>> heuristic_word_labels(
    const Document& doc, const std::unordered_set<std::string>& stopwords) {
  std::unordered_set<std::string> abstractTypes;
  for (const auto& t : doc.abstract_tokens()) abstractTypes.insert(lowercase(t));

  std::vector<std::vector<int>> out;
  for (const auto& s : doc.sentences) {
    std::vector<std::string> lc(s.tokens.size());
    for (size_t i = 0; i < s.tokens.size(); ++i) lc[i] = lowercase(s.tokens[i]);
    std::vector<int> labels(s.tokens.size(), 0);
    auto in_abstract = [&](int i) { return abstractTypes.count(lc[i]) > 0; };
    auto pair_ok = [&](int i, int j) {
      // the pair counts unless both members are stopwords
      return !(stopwords.count(lc[i]) && stopwords.count(lc[j]));
    };
    for (int i = 0; i < s.size(); ++i) {
      if (!in_abstract(i)) continue;
      bool left = i > 0 && in_abstract(i - 1) && pair_ok(i - 1, i);
      bool right = i + 1 < s.size() && in_abstract(i + 1) && pair_ok(i, i + 1);
      labels[i] = (left || right) ? 1 : 0;
    }
    out.push_back(std::move(labels));
  }
  return out;
}

GoldLabels heuristic_labels(const UnitSequence& units, const Document& doc,
                            const std::unordered_set<std::string>& stopwords) {
  auto wordLabels = heuristic_word_labels(doc, stopwords);
  GoldLabels gold;
  gold.labels.reserve(units.units.size());
  for (const auto& u : units.units) {
    const auto& sent = wordLabels.at(u.sentenceIndex);
    int lab = 0;
    for (int i = u.span.start; i < u.span.end; ++i)
      if (sent.at(i)) lab = 1;
    gold.labels.push_back(lab);
  }
  return gold;
}

}  // namespace qsum
