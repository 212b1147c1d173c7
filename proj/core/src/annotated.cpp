#include "ged/annotated.hpp"

#include "ged/error.hpp"

namespace ged {

namespace {

constexpr std::string_view kDelOpen = "<del>";
constexpr std::string_view kDelClose = "</del>";
constexpr std::string_view kInsOpen = "<ins>";
constexpr std::string_view kInsClose = "</ins>";

}  // namespace

AnnotatedSpanSentence AnnotatedSpanSentence::parse(std::string_view line) {
  AnnotatedSpanSentence out;
  SpanKind current = SpanKind::kPlain;
  std::size_t open_at = 0;
  std::size_t seg_start = 0;
  std::string text;

  auto flush = [&](std::size_t end) {
    if (!text.empty() || current != SpanKind::kPlain) {
      out.segments.push_back(AnnotatedSegment{current, text, seg_start});
    }
    text.clear();
    seg_start = end;
  };

  std::size_t i = 0;
  while (i < line.size()) {
    std::string_view rest = line.substr(i);
    const bool del_open = rest.starts_with(kDelOpen);
    const bool ins_open = rest.starts_with(kInsOpen);
    const bool del_close = rest.starts_with(kDelClose);
    const bool ins_close = rest.starts_with(kInsClose);

    if (del_open || ins_open) {
      if (current != SpanKind::kPlain) {
        throw FormatError("annotation", i,
                          "nested span (outer span opened at offset " +
                              std::to_string(open_at) + ")");
      }
      flush(i);
      current = del_open ? SpanKind::kDelete : SpanKind::kInsert;
      open_at = i;
      i += kDelOpen.size();
      seg_start = i;
    } else if (del_close || ins_close) {
      const SpanKind closing = del_close ? SpanKind::kDelete : SpanKind::kInsert;
      if (current != closing) {
        throw FormatError("annotation", i, "closing tag without matching open tag");
      }
      flush(i);
      current = SpanKind::kPlain;
      i += kDelClose.size();
      seg_start = i;
    } else {
      text.push_back(line[i]);
      ++i;
    }
  }
  if (current != SpanKind::kPlain) {
    throw FormatError("annotation", open_at, "unclosed span");
  }
  flush(line.size());
  return out;
}

LabeledSentence convert_annotated(const AnnotatedSpanSentence& annotated) {
  LabeledSentence out;
  for (const auto& seg : annotated.segments) {
    if (seg.kind == SpanKind::kInsert) continue;
    const std::uint8_t label = seg.kind == SpanKind::kDelete ? kIncorrect : kCorrect;
    for (auto& token : split_tokens(seg.text)) {
      out.tokens.push_back(std::move(token));
      out.labels.push_back(label);
    }
  }
  return out;
}

}  // namespace ged
