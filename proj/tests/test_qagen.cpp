#include "doctest.h"
#include "helpers.hpp"
#include "qsum/qagen.hpp"

using namespace qsum;
using namespace qsum::testing;

namespace {

Sentence ner_sentence(std::vector<std::string> toks,
                      std::vector<EntitySpan> spans) {
  Sentence s = make_sentence(std::move(toks));
  s.ner = std::move(spans);
  return s;
}

Sentence dep_sentence(std::vector<std::string> toks,
                      std::vector<DependencyArc> arcs) {
  Sentence s = make_sentence(std::move(toks));
  s.deps = std::move(arcs);
  return s;
}

}  // namespace

TEST_CASE("candidate extraction per question type") {
  // "mary greeted john warmly", root = greeted, nsubj = mary, dobj = john.
  Sentence s = dep_sentence({"mary", "greeted", "john", "warmly"},
                            {{-1, 1, "root"},
                             {1, 0, "nsubj"},
                             {1, 2, "obj"},
                             {1, 3, "advmod"}});
  s.ner = std::vector<EntitySpan>{{0, 1, "PER"}, {2, 3, "PER"}};

  auto roots = extract_answer_candidates(s, QaType::Root);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].position == 1);
  CHECK(roots[0].surface == "greeted");

  auto so = extract_answer_candidates(s, QaType::SubjObj);
  REQUIRE(so.size() == 2);
  CHECK(so[0].surface == "mary");
  CHECK(so[1].surface == "john");

  auto ner = extract_answer_candidates(s, QaType::Ner);
  REQUIRE(ner.size() == 2);
  CHECK(ner[0].position == 0);
  CHECK(ner[0].spanEnd == 1);
}

TEST_CASE("missing annotation layers are an error, not silence") {
  Sentence bare = make_sentence({"just", "tokens"});
  CHECK_THROWS(extract_answer_candidates(bare, QaType::Ner));
  CHECK_THROWS(extract_answer_candidates(bare, QaType::Root));
  CHECK_THROWS(extract_answer_candidates(bare, QaType::SubjObj));
}

TEST_CASE("multi-token entity spans collapse to one blank") {
  Sentence s = ner_sentence({"president", "john", "f", "kennedy", "spoke"},
                            {{1, 4, "PER"}});
  Document d;
  d.id = "m";
  d.sentences = {make_sentence({"kennedy", "spoke"})};
  d.abstract = {s};

  AnswerVocabulary vocab(QaType::Ner);
  vocab.add("john f kennedy");
  auto pairs = make_qa_pairs(d, vocab, 10);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].questionTokens ==
        std::vector<std::string>{"president", Vocabulary::blank_token(), "spoke"});
  CHECK(pairs[0].answerSurface == "john f kennedy");
  CHECK(pairs[0].answerId == 0);
  CHECK(pairs[0].type == QaType::Ner);
}

TEST_CASE("answer vocabulary keeps only frequent surfaces") {
  std::vector<Document> docs;
  for (int i = 0; i < 6; ++i) {
    Document d;
    d.id = "v" + std::to_string(i);
    d.sentences = {make_sentence({"x"})};
    // "paris" appears in every abstract; "oslo" only in the first.
    std::vector<EntitySpan> spans = {{0, 1, "LOC"}};
    if (i == 0) spans.push_back({2, 3, "LOC"});
    d.abstract = {ner_sentence({"paris", "and", "oslo"}, spans)};
    docs.push_back(d);
  }
  AnswerVocabulary v = build_answer_vocab(docs, QaType::Ner, 5);
  CHECK(v.size() == 1);
  CHECK(v.id("paris") == 0);
  CHECK(v.id("oslo") == -1);

  CHECK_THROWS(build_answer_vocab(docs, QaType::Ner, 100));  // nothing survives
}

TEST_CASE("round-robin budget over abstract sentences") {
  // 3 abstract sentences with 4 candidates each; K = 10 must yield 4/3/3.
  Document d;
  d.id = "rr";
  d.sentences = {make_sentence({"x"})};
  AnswerVocabulary vocab(QaType::Ner);
  for (int s = 0; s < 3; ++s) {
    std::vector<std::string> toks;
    std::vector<EntitySpan> spans;
    for (int c = 0; c < 4; ++c) {
      toks.push_back("e" + std::to_string(s) + std::to_string(c));
      toks.push_back("w");
      spans.push_back({2 * c, 2 * c + 1, "PER"});
      vocab.add(toks[2 * c]);
    }
    d.abstract.push_back(ner_sentence(toks, spans));
  }

  auto pairs = make_qa_pairs(d, vocab, 10);
  REQUIRE(pairs.size() == 10);
  int perSentence[3] = {0, 0, 0};
  for (const auto& p : pairs) perSentence[p.abstractSentenceIndex]++;
  CHECK(perSentence[0] == 4);
  CHECK(perSentence[1] == 3);
  CHECK(perSentence[2] == 3);
  // Output is grouped by abstract sentence, candidates in position order.
  CHECK(pairs[0].abstractSentenceIndex == 0);
  CHECK(pairs[0].answerSurface == "e00");
  CHECK(pairs[1].answerSurface == "e01");
}

TEST_CASE("pairs reconstruct the abstract sentence around the blank") {
  auto docs = toy_corpus();
  AnswerVocabulary vocab = build_answer_vocab(docs, QaType::Ner, 5);
  CHECK(vocab.size() == 4);  // the four recurring names

  for (const auto& d : docs) {
    auto pairs = make_qa_pairs(d, vocab, 10);
    REQUIRE(pairs.size() == 3);
    for (const auto& p : pairs) {
      const Sentence& src = d.abstract[p.abstractSentenceIndex];
      // Substituting the answer back for the blank recovers the sentence.
      std::vector<std::string> rebuilt;
      for (const auto& t : p.questionTokens) {
        if (t == Vocabulary::blank_token())
          for (const auto& a : split_ws(p.answerSurface)) rebuilt.push_back(a);
        else
          rebuilt.push_back(t);
      }
      std::vector<std::string> lowered;
      for (const auto& t : src.tokens) lowered.push_back(lowercase(t));
      CHECK(rebuilt == lowered);
      // Closed world: every emitted answer is in the vocabulary.
      CHECK(p.answerId >= 0);
      CHECK(vocab.answer(p.answerId) == p.answerSurface);
    }
  }

  // Determinism: two runs agree exactly.
  auto a = make_qa_pairs(docs[0], vocab, 10);
  auto b = make_qa_pairs(docs[0], vocab, 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].questionTokens == b[i].questionTokens);
    CHECK(a[i].answerId == b[i].answerId);
  }
}

TEST_CASE("type names round-trip") {
  for (QaType t : {QaType::Root, QaType::SubjObj, QaType::Ner})
    CHECK(qa_type_from_string(to_string(t)) == t);
  CHECK_THROWS(qa_type_from_string("bogus"));
}
