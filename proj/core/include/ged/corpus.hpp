#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ged {

using Tokens = std::vector<std::string>;

inline constexpr std::uint8_t kIncorrect = 0;
inline constexpr std::uint8_t kCorrect = 1;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kNumToken = "<num>";

struct Sentence {
  Tokens tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

// Tokens with per-token grammaticality: 1 = correct, 0 = incorrect.
struct LabeledSentence {
  Tokens tokens;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return tokens.size(); }
  std::size_t error_count() const;

  // Throws ged::Error if lengths differ, a token is empty, or a label is
  // outside {0, 1}.
  void validate() const;

  static LabeledSentence all_correct(Tokens tokens);

  bool operator==(const LabeledSentence&) const = default;
};

// Splits on ASCII whitespace; never yields empty tokens.
Tokens split_tokens(std::string_view line);
std::string join_tokens(std::span<const std::string> tokens);

// --- preprocessing --------------------------------------------------------

struct NormalizationRules {
  std::size_t min_length = 6;  // inclusive
  std::size_t max_length = 50;  // inclusive
  std::string final_token = ".";
  bool strip_parentheses = true;
  bool replace_numbers = true;
  // Lines matching any of these (ECMAScript syntax) are rejected before any
  // other processing: formulae and references.
  std::vector<std::string> reject_patterns = default_reject_patterns();

  static std::vector<std::string> default_reject_patterns();
};

enum class RejectReason {
  kEmpty,
  kFormulaOrReference,
  kNoFinalPeriod,
  kTooShort,
  kTooLong,
};

std::string_view to_string(RejectReason reason);

struct Rejection {
  RejectReason reason;
  std::string detail;
};

using NormalizeOutcome = std::variant<Sentence, Rejection>;

// True for integers and decimals, optionally signed, comma-grouped or with a
// percent suffix: "1995", "-3.5", "12,000", "40%".
bool is_numeric_token(std::string_view token);

// Removes parenthesised spans (nested, with contents) and stray ')'
// characters from a raw line.
std::string strip_parenthesized(std::string_view raw);

class Normalizer {
 public:
  explicit Normalizer(NormalizationRules rules = {});

  NormalizeOutcome operator()(std::string_view raw) const;
  const NormalizationRules& rules() const { return rules_; }

 private:
  NormalizationRules rules_;
  std::vector<std::regex> reject_;
};

NormalizeOutcome normalize_sentence(std::string_view raw,
                                    const NormalizationRules& rules = {});

// --- raw corpus I/O -------------------------------------------------------

// One sentence per line, whitespace-tokenized. Blank lines are skipped.
std::vector<Sentence> read_sentences(std::istream& in);
std::vector<Sentence> read_sentences(const std::filesystem::path& path);
void write_sentences(std::ostream& out, std::span<const Sentence> sentences);

// --- statistics -----------------------------------------------------------

struct CorpusStats {
  std::uint64_t tokens = 0;
  std::uint64_t sentences = 0;
  std::uint64_t incorrect_tokens = 0;
  double incorrect_percentage = 0.0;
  std::size_t vocabulary_size = 0;  // distinct surface tokens
};

// Throws ged::Error on an empty stream.
CorpusStats corpus_stats(std::span<const LabeledSentence> sentences);

}  // namespace ged
