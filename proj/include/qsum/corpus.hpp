#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qsum {

struct DependencyArc {
  int head = -1;  // -1 marks the root arc
  int dependent = 0;
  std::string relation;
};

struct EntitySpan {
  int start = 0;
  int end = 0;  // exclusive
  std::string tag;  // PER, LOC, ORG, MISC
};

struct Sentence {
  std::vector<std::string> tokens;
  std::optional<std::string> parse;  // bracketed constituent tree
  std::optional<std::vector<DependencyArc>> deps;
  std::optional<std::vector<EntitySpan>> ner;

  int size() const { return static_cast<int>(tokens.size()); }
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Sentence> abstract;

  int source_word_count() const;
  std::vector<std::string> source_tokens() const;
  std::vector<std::string> abstract_tokens() const;
};

std::string lowercase(const std::string& s);

// Vocabulary over lowercased tokens. Ids dense from 0; UNK and BLANK fixed.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBlank = 1;
  static const char* blank_token() { return "__blank__"; }

  Vocabulary();
  int id(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::string& token(int id) const { return id_to_token_.at(id); }
  int add(const std::string& lowercasedToken);

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

std::vector<Document> load_corpus(const std::string& path);
void save_corpus(const std::vector<Document>& docs, const std::string& path);

Vocabulary build_vocab(const std::vector<Document>& docs, int minFreq);

Document truncate_document(const Document& doc, int maxWords = 400);

std::unordered_set<std::string> load_stopwords(const std::string& path);

// Optional pretrained embeddings: token followed by `dim` reals per line.
std::unordered_map<std::string, std::vector<double>> load_embeddings(
    const std::string& path, int dim);

}  // namespace qsum
