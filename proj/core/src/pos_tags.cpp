#include "ged/lingpipe.hpp"

#include <algorithm>
#include <array>

namespace ged {

namespace {

struct TagGroup {
  std::string_view tag;
  PosGroup group;
};

constexpr std::array<TagGroup, 34> kGroupedTags = {{
    {"CC", PosGroup::kConj},
    {"DT", PosGroup::kDet},   {"PDT", PosGroup::kDet},
    {"PRP", PosGroup::kPron}, {"PRP$", PosGroup::kPron},
    {"IN", PosGroup::kPrep},  {"TO", PosGroup::kPrep},   {"RP", PosGroup::kPrep},
    {"WDT", PosGroup::kWh},   {"WP", PosGroup::kWh},     {"WP$", PosGroup::kWh},
    {"WRB", PosGroup::kWh},
    {"NN", PosGroup::kNoun},  {"NNP", PosGroup::kNoun},  {"NNPS", PosGroup::kNoun},
    {"NNS", PosGroup::kNoun},
    {"VB", PosGroup::kVerb},  {"VBD", PosGroup::kVerb},  {"VBG", PosGroup::kVerb},
    {"VBN", PosGroup::kVerb}, {"VBP", PosGroup::kVerb},  {"VBZ", PosGroup::kVerb},
    {"JJ", PosGroup::kAdj},   {"JJR", PosGroup::kAdj},   {"JJS", PosGroup::kAdj},
    {"RB", PosGroup::kAdv},   {"RBR", PosGroup::kAdv},   {"RBS", PosGroup::kAdv},
    // remaining open tags of the tagset that fall into no group
    {"CD", PosGroup::kOther}, {"EX", PosGroup::kOther},  {"FW", PosGroup::kOther},
    {"LS", PosGroup::kOther}, {"MD", PosGroup::kOther},  {"POS", PosGroup::kOther},
}};

constexpr std::array<std::string_view, 14> kOtherTags = {
    "SYM", "UH", "$", "#", "``", "''", "-LRB-", "-RRB-", ",", ".", ":", "(", ")", "HYPH"};

constexpr std::array<std::string_view, 10> kGroupNames = {
    "CONJ", "DET", "PRON", "PREP", "WH", "NOUN", "VERB", "ADJ", "ADV", "OTHER"};

}  // namespace

std::string_view to_string(PosGroup group) {
  return kGroupNames[static_cast<std::size_t>(group)];
}

std::optional<PosGroup> parse_pos_group(std::string_view name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == name) return static_cast<PosGroup>(i);
  }
  return std::nullopt;
}

PosGroup classify_tag(std::string_view tag) {
  for (const auto& entry : kGroupedTags) {
    if (entry.tag == tag) return entry.group;
  }
  return PosGroup::kOther;
}

bool is_known_tag(std::string_view tag) {
  return std::any_of(kGroupedTags.begin(), kGroupedTags.end(),
                     [&](const TagGroup& e) { return e.tag == tag; }) ||
         std::find(kOtherTags.begin(), kOtherTags.end(), tag) != kOtherTags.end();
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace ged
