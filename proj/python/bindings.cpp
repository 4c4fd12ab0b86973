#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsum/corpus.hpp"
#include "qsum/encoder.hpp"
#include "qsum/eval.hpp"
#include "qsum/qagen.hpp"
#include "qsum/reward.hpp"
#include "qsum/segmenter.hpp"

namespace py = pybind11;
using namespace qsum;

namespace {

Sentence make_sentence(const std::vector<std::string>& tokens,
                       const std::optional<std::string>& parse) {
  Sentence s;
  s.tokens = tokens;
  s.parse = parse;
  return s;
}

Document make_document(const std::string& id,
                       const std::vector<std::vector<std::string>>& sentences,
                       const std::vector<std::vector<std::string>>& abstract) {
  Document d;
  d.id = id;
  for (const auto& toks : sentences) d.sentences.push_back(make_sentence(toks, {}));
  for (const auto& toks : abstract) d.abstract.push_back(make_sentence(toks, {}));
  return d;
}

}  // namespace

PYBIND11_MODULE(_qsum, m) {
  m.doc() = "QA-rewarded extractive summarization core";

  m.def(
      "chunk_sentence",
      [](const std::string& parse, const std::vector<std::string>& tokens,
         int maxWords) {
        std::vector<std::pair<int, int>> out;
        for (const auto& sp : chunk_sentence(parse, tokens, maxWords))
          out.emplace_back(sp.start, sp.end);
        return out;
      },
      py::arg("parse"), py::arg("tokens"), py::arg("max_words") = 5,
      "Top-down constituent-tree chunk spans (start, end).");

  m.def(
      "heuristic_labels",
      [](const std::vector<std::vector<std::string>>& sentences,
         const std::vector<std::vector<std::string>>& abstract,
         const std::vector<std::string>& stopwords) {
        Document d = make_document("doc", sentences, abstract);
        std::unordered_set<std::string> stop(stopwords.begin(), stopwords.end());
        UnitSequence units = build_units(d, UnitKind::Word);
        return heuristic_labels(units, d, stop).labels;
      },
      py::arg("sentences"), py::arg("abstract"),
      py::arg("stopwords") = std::vector<std::string>{},
      "Word-level summary-worthiness labels derived from the abstract.");

  m.def(
      "rouge",
      [](const std::vector<std::string>& sys, const std::vector<std::string>& ref,
         const std::string& variant, const std::string& mode) {
        RougeVariant v = variant == "1"   ? RougeVariant::R1
                         : variant == "2" ? RougeVariant::R2
                                          : RougeVariant::RL;
        RougeMode md = mode == "75bytes" ? RougeMode::RecallAt75Bytes
                                         : RougeMode::FullLengthF1;
        RougeScore s = rouge(sys, ref, v, md);
        return py::dict(py::arg("precision") = s.precision, py::arg("recall") = s.recall,
                        py::arg("f1") = s.f1);
      },
      py::arg("system"), py::arg("reference"), py::arg("variant") = "1",
      py::arg("mode") = "full");

  m.def("adequacy", &adequacy, py::arg("selected"), py::arg("reference"));
  m.def("fluency", &fluency, py::arg("labels"));
  m.def(
      "positional_embedding",
      [](int index, int dim) { return positional_embedding(index, dim).v; },
      py::arg("sentence_index"), py::arg("dim") = 30);

  m.def(
      "gold_summary",
      [](const std::vector<std::vector<std::string>>& sentences,
         const std::vector<std::vector<std::string>>& abstract) {
        return gold_summary(make_document("doc", sentences, abstract));
      },
      py::arg("sentences"), py::arg("abstract"));
}
