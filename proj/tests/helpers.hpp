#pragma once

// Shared fixtures for the test binaries: synthetic corpora, random parse
// trees, and independent oracles for the labeling heuristic.

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "qsum/corpus.hpp"
#include "qsum/segmenter.hpp"

namespace qsum::testing {

inline Sentence make_sentence(std::vector<std::string> tokens) {
  Sentence s;
  s.tokens = std::move(tokens);
  return s;
}

inline std::vector<std::string> split_ws(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// --- Random bracketed parse trees -----------------------------------------

struct RandomTree {
  std::string bracketed;
  std::vector<std::string> tokens;
};

// Builds a random binary-ish tree over `n` leaves named w0..w{n-1}.
inline std::string random_tree_rec(int lo, int hi, std::mt19937_64& rng,
                                   std::vector<std::string>& tokens) {
  if (hi - lo == 1) {
    std::string tok = "w" + std::to_string(lo);
    tokens.push_back(tok);
    return "(T " + tok + ")";
  }
  std::uniform_int_distribution<int> kidCount(2, std::min(4, hi - lo));
  int kids = kidCount(rng);
  // Split [lo, hi) into `kids` non-empty contiguous pieces.
  std::vector<int> cuts = {lo, hi};
  std::uniform_int_distribution<int> cutAt(lo + 1, hi - 1);
  while (static_cast<int>(cuts.size()) < kids + 1) {
    int c = cutAt(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::string out = "(N";
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    out += " " + random_tree_rec(cuts[i], cuts[i + 1], rng, tokens);
  return out + ")";
}

inline RandomTree random_tree(int nLeaves, std::mt19937_64& rng) {
  RandomTree t;
  t.bracketed = random_tree_rec(0, nLeaves, rng, t.tokens);
  return t;
}

// --- Brute-force reimplementation of the labeling heuristic ----------------
// Independent of the library version: builds an abstract-token set and walks
// every adjacent pair directly.

inline std::vector<std::vector<int>> oracle_word_labels(
    const Document& doc, const std::unordered_set<std::string>& stop) {
  std::unordered_set<std::string> abs;
  for (const auto& s : doc.abstract)
    for (const auto& t : s.tokens) abs.insert(lowercase(t));
  std::vector<std::vector<int>> out;
  for (const auto& s : doc.sentences) {
    std::vector<int> row(s.tokens.size(), 0);
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      std::string w = lowercase(s.tokens[i]);
      if (!abs.count(w)) continue;
      for (int d : {-1, 1}) {
        long j = static_cast<long>(i) + d;
        if (j < 0 || j >= static_cast<long>(s.tokens.size())) continue;
        std::string u = lowercase(s.tokens[j]);
        if (!abs.count(u)) continue;
        if (stop.count(w) && stop.count(u)) continue;
        row[i] = 1;
        break;
      }
    }
    out.push_back(row);
  }
  return out;
}

// --- Toy corpus for training-level tests -----------------------------------
// Eight documents, four recurring entity names, shared question templates so
// the answer is only recoverable from document context (not the question).

inline Document toy_document(int i) {
  static const std::vector<std::string> names = {"alice", "bob", "carol", "dave"};
  static const std::vector<std::string> places = {"rome",  "paris", "oslo",
                                                  "cairo", "lima",  "kyoto",
                                                  "quito", "delhi"};
  const std::string& e = names[i % 4];
  const std::string& p = places[i % 8];

  Document d;
  d.id = "toy-" + std::to_string(i);
  d.sentences.push_back(make_sentence({e, "visited", "the", "market", "during", p}));
  d.sentences.push_back(make_sentence({"the", "trip", "pleased", e, "greatly"}));
  d.sentences.push_back(
      make_sentence({"locals", "saw", e, "near", "the", "gate", "in", p}));

  Sentence a0 = make_sentence({e, "visited", "the", "market"});
  a0.ner = std::vector<EntitySpan>{{0, 1, "PER"}};
  Sentence a1 = make_sentence({"the", "trip", "pleased", e});
  a1.ner = std::vector<EntitySpan>{{3, 4, "PER"}};
  Sentence a2 = make_sentence({e, "stood", "near", "the", "gate"});
  a2.ner = std::vector<EntitySpan>{{0, 1, "PER"}};
  d.abstract = {a0, a1, a2};
  return d;
}

inline std::vector<Document> toy_corpus(int n = 8) {
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) docs.push_back(toy_document(i));
  return docs;
}

inline std::unordered_set<std::string> toy_stopwords() {
  return {"the", "a", "of", "in", "near", "during"};
}

}  // namespace qsum::testing
