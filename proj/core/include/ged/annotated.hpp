#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ged/corpus.hpp"

namespace ged {

// Inline edit markup: plain text interleaved with <del>..</del> spans (text
// present in the original, removed by the correction) and <ins>..</ins>
// spans (text added by the correction).
enum class SpanKind { kPlain, kDelete, kInsert };

struct AnnotatedSegment {
  SpanKind kind = SpanKind::kPlain;
  std::string text;
  std::size_t offset = 0;  // character offset of the text in the source line

  bool operator==(const AnnotatedSegment&) const = default;
};

struct AnnotatedSpanSentence {
  std::vector<AnnotatedSegment> segments;

  // Throws FormatError (position = character offset) on nested, unclosed or
  // unmatched tags.
  static AnnotatedSpanSentence parse(std::string_view line);
};

// Keeps delete-span tokens labeled incorrect, drops insert-span tokens and
// labels everything else correct. Markup boundaries are token boundaries.
LabeledSentence convert_annotated(const AnnotatedSpanSentence& annotated);

}  // namespace ged
