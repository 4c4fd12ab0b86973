#include "qsum/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsum {

using nlohmann::json;

namespace {

Sentence parse_sentence(const json& j, int lineNo, const char* where) {
  Sentence s;
  if (!j.contains("tokens") || !j["tokens"].is_array() || j["tokens"].empty())
    throw std::runtime_error("line " + std::to_string(lineNo) + ": " + where +
                             " sentence missing non-empty tokens");
  for (const auto& t : j["tokens"]) s.tokens.push_back(t.get<std::string>());
  if (j.contains("parse") && !j["parse"].is_null())
    s.parse = j["parse"].get<std::string>();
  if (j.contains("deps") && !j["deps"].is_null()) {
    std::vector<DependencyArc> arcs;
    int roots = 0;
    for (const auto& a : j["deps"]) {
      DependencyArc arc;
      arc.head = a.at("head").get<int>();
      arc.dependent = a.at("dep").get<int>();
      arc.relation = a.at("rel").get<std::string>();
      if (arc.dependent < 0 || arc.dependent >= s.size() || arc.head >= s.size())
        throw std::runtime_error("line " + std::to_string(lineNo) +
                                 ": dependency index out of token range");
      if (arc.head < 0) ++roots;
      arcs.push_back(arc);
    }
    if (roots != 1)
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": dependency parse must have exactly one root arc");
    s.deps = std::move(arcs);
  }
  if (j.contains("ner") && !j["ner"].is_null()) {
    std::vector<EntitySpan> spans;
    for (const auto& e : j["ner"]) {
      EntitySpan span;
      span.start = e.at("start").get<int>();
      span.end = e.at("end").get<int>();
      span.tag = e.at("tag").get<std::string>();
      if (span.start < 0 || span.end > s.size() || span.start >= span.end)
        throw std::runtime_error("line " + std::to_string(lineNo) +
                                 ": entity span [" + std::to_string(span.start) + "," +
                                 std::to_string(span.end) + ") outside token range");
      spans.push_back(span);
    }
    s.ner = std::move(spans);
  }
  return s;
}

json sentence_to_json(const Sentence& s) {
  json j;
  j["tokens"] = s.tokens;
  if (s.parse) j["parse"] = *s.parse;
  if (s.deps) {
    json arr = json::array();
    for (const auto& a : *s.deps)
      arr.push_back({{"head", a.head}, {"dep", a.dependent}, {"rel", a.relation}});
    j["deps"] = arr;
  }
  if (s.ner) {
    json arr = json::array();
    for (const auto& e : *s.ner)
      arr.push_back({{"start", e.start}, {"end", e.end}, {"tag", e.tag}});
    j["ner"] = arr;
  }
  return j;
}

}  // namespace

int Document::source_word_count() const {
  int n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::string> Document::source_tokens() const {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

std::vector<std::string> Document::abstract_tokens() const {
  std::vector<std::string> out;
  for (const auto& s : abstract) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Vocabulary::Vocabulary() {
  add("__unk__");
  add(blank_token());
}

int Vocabulary::add(const std::string& tok) {
  auto it = token_to_id_.find(tok);
  if (it != token_to_id_.end()) return it->second;
  int id = static_cast<int>(id_to_token_.size());
  token_to_id_.emplace(tok, id);
  id_to_token_.push_back(tok);
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(lowercase(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(lowercase(token)) > 0;
}

std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<Document> docs;
  std::string line;
  int lineNo = 0;
  std::unordered_set<std::string> seenIds;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": malformed record: " + e.what());
    }
    Document d;
    if (!j.contains("id"))
      throw std::runtime_error("line " + std::to_string(lineNo) + ": missing field 'id'");
    d.id = j["id"].get<std::string>();
    if (!seenIds.insert(d.id).second)
      throw std::runtime_error("line " + std::to_string(lineNo) + ": duplicate id " + d.id);
    if (!j.contains("sentences") || j["sentences"].empty())
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": document needs at least one source sentence");
    if (!j.contains("abstract") || j["abstract"].empty())
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": document needs at least one abstract sentence");
    for (const auto& s : j["sentences"]) d.sentences.push_back(parse_sentence(s, lineNo, "source"));
    for (const auto& s : j["abstract"]) d.abstract.push_back(parse_sentence(s, lineNo, "abstract"));
    docs.push_back(std::move(d));
  }
  return docs;
}

void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const auto& d : docs) {
    json j;
    j["id"] = d.id;
    json src = json::array(), abs = json::array();
    for (const auto& s : d.sentences) src.push_back(sentence_to_json(s));
    for (const auto& s : d.abstract) abs.push_back(sentence_to_json(s));
    j["sentences"] = src;
    j["abstract"] = abs;
    out << j.dump() << "\n";
  }
}

Vocabulary build_vocab(const std::vector<Document>& docs, int minFreq) {
  if (minFreq < 1) throw std::invalid_argument("build_vocab: minFreq must be >= 1");
  std::unordered_map<std::string, int> freq;
  std::vector<std::string> order;  // first-appearance order, for stable ids
  auto count = [&](const std::vector<Sentence>& sents) {
    for (const auto& s : sents)
      for (const auto& t : s.tokens) {
        std::string lc = lowercase(t);
        if (freq[lc]++ == 0) order.push_back(lc);
      }
  };
  for (const auto& d : docs) {
    count(d.sentences);
    count(d.abstract);
  }
  Vocabulary vocab;
  for (const auto& tok : order)
    if (freq[tok] >= minFreq) vocab.add(tok);
  return vocab;
}

Document truncate_document(const Document& doc, int maxWords) {
  if (maxWords <= 0) throw std::invalid_argument("truncate_document: maxWords must be > 0");
  Document out;
  out.id = doc.id;
  out.abstract = doc.abstract;
  int used = 0;
  for (const auto& s : doc.sentences) {
    if (used + s.size() <= maxWords) {
      out.sentences.push_back(s);
      used += s.size();
    } else {
      break;
    }
  }
  if (out.sentences.empty()) {
    // First sentence alone exceeds the budget: cut mid-sentence, drop annotations.
    Sentence cut;
    const Sentence& first = doc.sentences.at(0);
    cut.tokens.assign(first.tokens.begin(), first.tokens.begin() + maxWords);
    out.sentences.push_back(std::move(cut));
  }
  return out;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  std::unordered_set<std::string> out;
  std::string tok;
  while (in >> tok) out.insert(lowercase(tok));
  return out;
}

std::unordered_map<std::string, std::vector<double>> load_embeddings(
    const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::unordered_map<std::string, std::vector<double>> out;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string tok;
    is >> tok;
    std::vector<double> vec(dim);
    for (auto& x : vec)
      if (!(is >> x))
        throw std::runtime_error("embedding line " + std::to_string(lineNo) +
                                 ": expected " + std::to_string(dim) + " values");
    out[lowercase(tok)] = std::move(vec);
  }
  return out;
}

}  // namespace qsum
