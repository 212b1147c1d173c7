#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ged {

// Coarse part-of-speech groups over the Penn Treebank tagset.
enum class PosGroup { kConj, kDet, kPron, kPrep, kWh, kNoun, kVerb, kAdj, kAdv, kOther };

inline constexpr PosGroup kAllPosGroups[] = {
    PosGroup::kConj, PosGroup::kDet,  PosGroup::kPron, PosGroup::kPrep, PosGroup::kWh,
    PosGroup::kNoun, PosGroup::kVerb, PosGroup::kAdj,  PosGroup::kAdv,  PosGroup::kOther};

std::string_view to_string(PosGroup group);  // "CONJ", "DET", ...
std::optional<PosGroup> parse_pos_group(std::string_view name);

// Total over all strings; unknown tags map to kOther.
PosGroup classify_tag(std::string_view tag);

bool is_known_tag(std::string_view tag);

struct TaggedToken {
  std::string surface;
  std::string tag;  // a Penn Treebank tag or "UNK"

  bool operator==(const TaggedToken&) const = default;
};

using TaggedSentence = std::vector<TaggedToken>;

// Porter (1980) suffix stripping, steps 1a through 5b, on a lowercase word.
std::string porter_stem(std::string_view word);

// Lowercase ASCII copy.
std::string to_lower(std::string_view s);

// Rule-based lemma for nouns and verbs: irregular forms from the bundled
// exception tables first, then suffix rules. Throws std::invalid_argument for
// any other group.
std::string lemmatize(std::string_view word, PosGroup group);

// (inflected form, lemma) pairs the lemmatizer consults before its rules.
std::span<const std::pair<std::string_view, std::string_view>> irregular_verbs();
std::span<const std::pair<std::string_view, std::string_view>> irregular_nouns();

// One `token<TAB>TAG` per line, blank lines between sentences. Tags outside
// the Penn Treebank set become "UNK". Throws FormatError with the line number.
std::vector<TaggedSentence> parse_tagged_corpus(std::istream& in,
                                                const std::string& source = "<tagged>");
std::vector<TaggedSentence> parse_tagged_corpus(const std::filesystem::path& path);

}  // namespace ged
