#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qsum/reward.hpp"

using namespace qsum;
using namespace qsum::testing;

namespace {

UnitSequence word_units(const std::vector<std::vector<std::string>>& sentences) {
  UnitSequence seq;
  seq.kind = UnitKind::Word;
  for (size_t s = 0; s < sentences.size(); ++s)
    for (size_t w = 0; w < sentences[s].size(); ++w) {
      ExtractionUnit u;
      u.sentenceIndex = static_cast<int>(s);
      u.span = {static_cast<int>(w), static_cast<int>(w) + 1};
      u.text = {sentences[s][w]};
      seq.units.push_back(u);
    }
  return seq;
}

}  // namespace

TEST_CASE("hand-computed reward components") {
  // Fluency counts label switches, negated.
  CHECK(fluency({0, 1, 1, 0, 1}) == doctest::Approx(-3.0));
  CHECK(fluency({0, 0, 0}) == doctest::Approx(0.0));
  CHECK(fluency({1, 1, 1}) == doctest::Approx(0.0));
  CHECK(fluency({1, 0, 1, 0}) == doctest::Approx(-3.0));
  CHECK(fluency({}) == doctest::Approx(0.0));

  // Length penalty: 3 of 10 words selected, target ratio 0.15.
  UnitSequence ten = word_units({{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}});
  std::vector<int> sel3 = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  CHECK(length_penalty(sel3, ten, 0.15) == doctest::Approx(-0.15));
  // Exactly on target: no penalty.
  std::vector<int> sel15 = {1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(length_penalty(sel15, ten, 0.10) == doctest::Approx(0.0));

  // Adequacy: clipped unigram overlap over reference length.
  CHECK(adequacy({"cat", "sat", "mat"}, {"the", "cat", "sat"}) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(adequacy({}, {"the", "cat"}) == doctest::Approx(0.0));
  CHECK(adequacy({"the", "the", "the"}, {"the", "cat"}) ==
        doctest::Approx(0.5));  // clipping: "the" counts once
  CHECK(adequacy({"The", "CAT"}, {"the", "cat"}) == doctest::Approx(1.0));
  CHECK_THROWS(adequacy({"x"}, {}));  // empty reference is meaningless

  // Combination with gamma=1, alpha=0.5, beta=1.
  RewardWeights w;
  w.gamma = 1.0;
  w.alpha = 0.5;
  w.beta = 1.0;
  RewardBreakdown rb = combine(-0.6931, 2.0 / 3.0, -3.0, -0.15, w);
  CHECK(rb.total == doctest::Approx(-1.6764).epsilon(1e-4));
  CHECK(rb.qaCompetency == doctest::Approx(-0.6931));
  CHECK(rb.adequacy == doctest::Approx(2.0 / 3.0));
  CHECK(rb.fluency == doctest::Approx(-3.0));
  CHECK(rb.lengthPenalty == doctest::Approx(-0.15));
}

TEST_CASE("reward bounds and monotonicity") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    int n = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<int> labels(n);
    for (auto& y : labels) y = bit(rng);

    // Fluency is always in [-(n), 0] and zero iff the labels are constant.
    double f = fluency(labels);
    CHECK(f <= 0.0);
    CHECK(f >= -static_cast<double>(n));
    bool constant = std::all_of(labels.begin(), labels.end(),
                                [&](int y) { return y == labels[0]; });
    if (constant) CHECK(f == 0.0);

    // Merging two selected islands never lowers fluency.
    std::vector<int> merged = labels;
    for (int i = 1; i + 1 < n; ++i)
      if (merged[i - 1] == 1 && merged[i + 1] == 1) merged[i] = 1;
    CHECK(fluency(merged) >= f);
  }

  // Adding a reference word to the selection never lowers adequacy.
  std::vector<std::string> ref = {"alpha", "beta", "gamma"};
  std::vector<std::string> sel = {"alpha"};
  double a1 = adequacy(sel, ref);
  sel.push_back("beta");
  double a2 = adequacy(sel, ref);
  CHECK(a2 >= a1);
  CHECK(a2 <= 1.0);
  // Off-reference words change nothing.
  sel.push_back("zeta");
  CHECK(adequacy(sel, ref) == doctest::Approx(a2));
}

TEST_CASE("total is linear in the component weights") {
  RewardWeights w;
  w.gamma = 2.0;
  w.alpha = 0.25;
  w.beta = 3.0;
  RewardBreakdown rb = combine(-1.0, 0.5, -2.0, -0.1, w);
  CHECK(rb.total == doctest::Approx(-1.0 + 2.0 * 0.5 + 0.25 * -2.0 + 3.0 * -0.1));

  RewardWeights zero;
  zero.gamma = zero.alpha = zero.beta = 0.0;
  CHECK(combine(-1.0, 0.9, -5.0, -0.3, zero).total == doctest::Approx(-1.0));
}

TEST_CASE("selected tokens follow the unit spans") {
  UnitSequence seq = word_units({{"a", "b"}, {"c", "d", "e"}});
  auto toks = selected_tokens(seq, {1, 0, 0, 1, 1});
  CHECK(toks == std::vector<std::string>{"a", "d", "e"});
  CHECK(selected_tokens(seq, {0, 0, 0, 0, 0}).empty());
}

TEST_CASE("empty selection falls back to a uniform answer guess") {
  QaModelConfig cfg;
  cfg.unitDim = 6;
  cfg.hidden = 4;
  cfg.numAnswers = 20;
  ParamStore params;
  std::mt19937_64 rng(7);
  QaModel model(cfg, params, rng);

  std::vector<NodePtr> units = {constant(Tensor({6})), constant(Tensor({6}))};
  QAPair p;
  p.questionTokens = {"__blank__"};
  p.answerId = 3;
  std::vector<NodePtr> qVecs = {constant(Tensor({6}))};

  double rc = qa_competency(model, units, {0, 0}, {p}, qVecs);
  CHECK(rc == doctest::Approx(std::log(1.0 / 20.0)).epsilon(1e-9));
  CHECK(rc == doctest::Approx(-2.9957).epsilon(1e-3));

  // With a selection, competency is the mean log-probability of the answers.
  Tensor u({6}, {0.3, -0.2, 0.9, 0.1, -0.5, 0.4});
  units[0] = constant(u);
  double rc2 = qa_competency(model, units, {1, 0}, {p}, qVecs);
  auto probs = model.answer_probs(units, {1, 0}, qVecs[0]);
  CHECK(rc2 == doctest::Approx(std::log(probs->value.v[3])).epsilon(1e-9));
  CHECK(rc2 <= 0.0);
}

TEST_CASE("total_reward wires the four components together") {
  QaModelConfig cfg;
  cfg.unitDim = 6;
  cfg.hidden = 4;
  cfg.numAnswers = 5;
  ParamStore params;
  std::mt19937_64 rng(8);
  QaModel model(cfg, params, rng);

  UnitSequence seq = word_units({{"alice", "visited", "rome", "today"}});
  std::vector<NodePtr> units;
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 4; ++i) {
    Tensor t({6});
    for (auto& x : t.v) x = d(rng);
    units.push_back(constant(t));
  }
  QAPair p;
  p.questionTokens = {"__blank__", "visited", "rome"};
  p.answerId = 2;
  std::vector<NodePtr> qVecs = {constant(Tensor({6}, {1, 0, 0, 1, 0, 0}))};
  std::vector<std::string> ref = {"alice", "visited", "rome"};
  std::vector<int> labels = {1, 1, 0, 0};

  RewardWeights w;
  RewardBreakdown rb = total_reward(model, units, labels, seq, ref, {p}, qVecs, w);
  CHECK(rb.adequacy == doctest::Approx(2.0 / 3.0));
  CHECK(rb.fluency == doctest::Approx(-1.0));
  CHECK(rb.lengthPenalty == doctest::Approx(-(0.5 - 0.15)));
  CHECK(rb.qaCompetency ==
        doctest::Approx(qa_competency(model, units, labels, {p}, qVecs)));
  CHECK(rb.total == doctest::Approx(rb.qaCompetency + w.gamma * rb.adequacy +
                                    w.alpha * rb.fluency + w.beta * rb.lengthPenalty));
}
