#pragma once

#include <string>
#include <vector>

#include "qsum/segmenter.hpp"

namespace qsum {

struct RenderedSummary {
  std::string plain;  // ANSI bold over selected spans
  std::string html;   // <mark> over selected spans
  std::vector<int> labels;
};

// Source text is tokens joined by single spaces, one sentence per line.
// Stripping the emphasis markers reproduces that text exactly.
RenderedSummary render_summary(const Document& doc, const UnitSequence& units,
                               const std::vector<int>& labels);

std::string strip_ansi(const std::string& s);
std::string strip_html_marks(const std::string& s);

}  // namespace qsum
