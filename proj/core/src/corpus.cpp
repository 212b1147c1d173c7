#include "ged/corpus.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "ged/error.hpp"

namespace ged {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Digits with optional 3-digit comma groups ("12,000"); returns characters
// consumed or 0.
std::size_t match_integer_part(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == 0) return 0;
  if (i <= 3) {
    std::size_t j = i;
    bool grouped = false;
    while (j + 4 <= s.size() && s[j] == ',' && is_digit(s[j + 1]) &&
           is_digit(s[j + 2]) && is_digit(s[j + 3]) &&
           (j + 4 == s.size() || !is_digit(s[j + 4]))) {
      j += 4;
      grouped = true;
    }
    if (grouped) return j;
  }
  return i;
}

}  // namespace

std::size_t LabeledSentence::error_count() const {
  std::size_t n = 0;
  for (auto l : labels) n += (l == kIncorrect);
  return n;
}

void LabeledSentence::validate() const {
  if (tokens.size() != labels.size()) {
    throw Error("labeled sentence has " + std::to_string(tokens.size()) +
                " tokens but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw Error("empty token at position " + std::to_string(i));
    if (labels[i] != kCorrect && labels[i] != kIncorrect) {
      throw Error("label outside {0,1} at position " + std::to_string(i));
    }
  }
}

LabeledSentence LabeledSentence::all_correct(Tokens tokens) {
  LabeledSentence out;
  out.labels.assign(tokens.size(), kCorrect);
  out.tokens = std::move(tokens);
  return out;
}

Tokens split_tokens(std::string_view line) {
  Tokens out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> NormalizationRules::default_reject_patterns() {
  return {
      // inline math and LaTeX environments
      R"(\$|\\[(\[]|\\begin\{|\\end\{|\\frac)",
      // numeric citation brackets: [3], [4, 7], [2-5]
      R"(\[\s*\d+(\s*[,;\-]\s*\d+)*\s*\])",
      // author citations
      R"(\bet al\b)",
  };
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kEmpty: return "empty";
    case RejectReason::kFormulaOrReference: return "formula-or-reference";
    case RejectReason::kNoFinalPeriod: return "no-final-period";
    case RejectReason::kTooShort: return "too-short";
    case RejectReason::kTooLong: return "too-long";
  }
  return "unknown";
}

bool is_numeric_token(std::string_view token) {
  std::string_view s = token;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  if (!s.empty() && s.back() == '%') s.remove_suffix(1);
  if (s.empty()) return false;

  std::size_t i = match_integer_part(s);
  if (i < s.size() && s[i] == '.') {
    std::size_t j = i + 1;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j == i + 1) return false;  // "12." is not a decimal
    i = j;
  } else if (i == 0) {
    return false;
  }
  return i == s.size();
}

std::string strip_parenthesized(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  int depth = 0;
  for (char c : raw) {
    if (c == '(') {
      ++depth;
      // keep token boundaries intact: "a(b)c" -> "a c"
      if (depth == 1) out.push_back(' ');
    } else if (c == ')') {
      if (depth > 0) --depth;
      if (depth == 0) out.push_back(' ');
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

Normalizer::Normalizer(NormalizationRules rules) : rules_(std::move(rules)) {
  if (rules_.min_length > rules_.max_length) {
    throw Error("normalization rules: min_length exceeds max_length");
  }
  reject_.reserve(rules_.reject_patterns.size());
  for (const auto& pattern : rules_.reject_patterns) {
    try {
      reject_.emplace_back(pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw Error("invalid reject pattern '" + pattern + "': " + e.what());
    }
  }
}

NormalizeOutcome Normalizer::operator()(std::string_view raw) const {
  for (std::size_t i = 0; i < reject_.size(); ++i) {
    if (std::regex_search(raw.begin(), raw.end(), reject_[i])) {
      return Rejection{RejectReason::kFormulaOrReference,
                       "matches reject pattern " + rules_.reject_patterns[i]};
    }
  }

  Tokens tokens = rules_.strip_parentheses ? split_tokens(strip_parenthesized(raw))
                                           : split_tokens(raw);
  if (rules_.replace_numbers) {
    for (auto& t : tokens) {
      if (is_numeric_token(t)) t = std::string(kNumToken);
    }
  }

  if (tokens.empty()) return Rejection{RejectReason::kEmpty, "no tokens"};
  if (tokens.back() != rules_.final_token) {
    return Rejection{RejectReason::kNoFinalPeriod,
                     "last token is '" + tokens.back() + "'"};
  }
  if (tokens.size() < rules_.min_length) {
    return Rejection{RejectReason::kTooShort,
                     std::to_string(tokens.size()) + " tokens"};
  }
  if (tokens.size() > rules_.max_length) {
    return Rejection{RejectReason::kTooLong,
                     std::to_string(tokens.size()) + " tokens"};
  }
  return Sentence{std::move(tokens)};
}

NormalizeOutcome normalize_sentence(std::string_view raw,
                                    const NormalizationRules& rules) {
  return Normalizer(rules)(raw);
}

std::vector<Sentence> read_sentences(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    Tokens tokens = split_tokens(line);
    if (!tokens.empty()) out.push_back(Sentence{std::move(tokens)});
  }
  return out;
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_sentences(in);
}

void write_sentences(std::ostream& out, std::span<const Sentence> sentences) {
  for (const auto& s : sentences) out << join_tokens(s.tokens) << '\n';
}

CorpusStats corpus_stats(std::span<const LabeledSentence> sentences) {
  if (sentences.empty()) throw Error("corpus_stats: empty stream");
  CorpusStats stats;
  std::unordered_set<std::string> distinct;
  for (const auto& s : sentences) {
    ++stats.sentences;
    stats.tokens += s.size();
    stats.incorrect_tokens += s.error_count();
    distinct.insert(s.tokens.begin(), s.tokens.end());
  }
  stats.vocabulary_size = distinct.size();
  stats.incorrect_percentage =
      stats.tokens == 0 ? 0.0
                        : 100.0 * static_cast<double>(stats.incorrect_tokens) /
                              static_cast<double>(stats.tokens);
  return stats;
}

}  // namespace ged
