#include "qsum/render.hpp"

#include <stdexcept>

namespace qsum {

namespace {

constexpr const char* kBoldOn = "\x1b[1m";
constexpr const char* kBoldOff = "\x1b[0m";

std::string erase_all(std::string s, const std::string& needle) {
  size_t pos;
  while ((pos = s.find(needle)) != std::string::npos) s.erase(pos, needle.size());
  return s;
}

}  // namespace

RenderedSummary render_summary(const Document& doc, const UnitSequence& units,
                               const std::vector<int>& labels) {
  if (labels.size() != units.units.size())
    throw std::invalid_argument("render_summary: misaligned labels");

  // Per-token selection mask, by sentence.
  std::vector<std::vector<int>> selected;
  for (const auto& s : doc.sentences) selected.emplace_back(s.size(), 0);
  for (size_t t = 0; t < labels.size(); ++t)
    if (labels[t])
      for (int i = units.units[t].span.start; i < units.units[t].span.end; ++i)
        selected[units.units[t].sentenceIndex][i] = 1;

  RenderedSummary out;
  out.labels = labels;
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    const auto& toks = doc.sentences[si].tokens;
    if (si) {
      out.plain += '\n';
      out.html += '\n';
    }
    bool open = false;
    for (size_t i = 0; i < toks.size(); ++i) {
      bool sel = selected[si][i] != 0;
      if (sel && !open) {
        out.plain += kBoldOn;
        out.html += "<mark>";
        open = true;
      } else if (!sel && open) {
        out.plain += kBoldOff;
        out.html += "</mark>";
        open = false;
      }
      out.plain += toks[i];
      out.html += toks[i];
      if (i + 1 < toks.size()) {
        out.plain += ' ';
        out.html += ' ';
      }
    }
    if (open) {
      out.plain += kBoldOff;
      out.html += "</mark>";
    }
  }
  return out;
}

std::string strip_ansi(const std::string& s) {
  return erase_all(erase_all(s, kBoldOn), kBoldOff);
}

std::string strip_html_marks(const std::string& s) {
  return erase_all(erase_all(s, "<mark>"), "</mark>");
}

}  // namespace qsum
