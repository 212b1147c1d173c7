#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "ged/error.hpp"
#include "ged/noisegen.hpp"

namespace ged {

namespace {

bool is_closed_class(PosGroup g) {
  return g == PosGroup::kConj || g == PosGroup::kDet || g == PosGroup::kPron ||
         g == PosGroup::kPrep || g == PosGroup::kWh;
}

std::string_view kind_name(KeyKind kind) {
  switch (kind) {
    case KeyKind::kGroup: return "group";
    case KeyKind::kLemma: return "lemma";
    case KeyKind::kStem: return "stem";
  }
  return "?";
}

constexpr std::string_view kDictionaryHeader = "[dictionary]";

}  // namespace

SubstitutionKey SubstitutionKey::group(PosGroup group) {
  if (!is_closed_class(group)) {
    throw Error("group key requires CONJ, DET, PRON, PREP or WH, got " +
                std::string(ged::to_string(group)));
  }
  return SubstitutionKey(KeyKind::kGroup, group, "");
}

SubstitutionKey SubstitutionKey::lemma(PosGroup group, std::string lemma) {
  if (group != PosGroup::kNoun && group != PosGroup::kVerb) {
    throw Error("lemma key requires NOUN or VERB");
  }
  if (lemma.empty()) throw Error("lemma key with empty lemma");
  return SubstitutionKey(KeyKind::kLemma, group, std::move(lemma));
}

SubstitutionKey SubstitutionKey::stem(PosGroup group, std::string stem) {
  if (group != PosGroup::kAdj && group != PosGroup::kAdv) {
    throw Error("stem key requires ADJ or ADV");
  }
  if (stem.empty()) throw Error("stem key with empty stem");
  return SubstitutionKey(KeyKind::kStem, group, std::move(stem));
}

std::string SubstitutionKey::to_string() const {
  std::string out(kind_name(kind_));
  out += ':';
  out += ged::to_string(group_);
  if (kind_ != KeyKind::kGroup) {
    out += ':';
    out += base_;
  }
  return out;
}

SubstitutionKey SubstitutionKey::parse(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) throw Error("bad substitution key '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, first);
  std::string_view rest = text.substr(first + 1);
  const auto second = rest.find(':');
  const std::string_view group_name = rest.substr(0, second);
  const auto group = parse_pos_group(group_name);
  if (!group) throw Error("bad group in substitution key '" + std::string(text) + "'");
  if (kind == "group") {
    if (second != std::string_view::npos) throw Error("group key takes no base: '" + std::string(text) + "'");
    return SubstitutionKey::group(*group);
  }
  if (second == std::string_view::npos) throw Error("missing base in key '" + std::string(text) + "'");
  std::string base(rest.substr(second + 1));
  if (kind == "lemma") return SubstitutionKey::lemma(*group, std::move(base));
  if (kind == "stem") return SubstitutionKey::stem(*group, std::move(base));
  throw Error("unknown key kind in '" + std::string(text) + "'");
}

std::optional<SubstitutionKey> substitution_key_for(std::string_view token,
                                                    std::string_view tag) {
  const PosGroup group = classify_tag(tag);
  switch (group) {
    case PosGroup::kConj:
    case PosGroup::kDet:
    case PosGroup::kPron:
    case PosGroup::kPrep:
    case PosGroup::kWh:
      return SubstitutionKey::group(group);
    case PosGroup::kNoun:
    case PosGroup::kVerb:
      return SubstitutionKey::lemma(group, lemmatize(token, group));
    case PosGroup::kAdj:
    case PosGroup::kAdv:
      return SubstitutionKey::stem(group, porter_stem(to_lower(token)));
    case PosGroup::kOther:
      break;
  }
  return std::nullopt;
}

void SubstitutionTableBuilder::add(const TaggedToken& token) {
  dictionary_.insert(token.surface);
  if (auto key = substitution_key_for(token.surface, token.tag)) {
    sets_[*key].insert(token.surface);
  }
}

void SubstitutionTableBuilder::add(const TaggedSentence& sentence) {
  for (const auto& t : sentence) add(t);
}

void SubstitutionTableBuilder::merge(const SubstitutionTableBuilder& other) {
  for (const auto& [key, members] : other.sets_) sets_[key].insert(members.begin(), members.end());
  dictionary_.insert(other.dictionary_.begin(), other.dictionary_.end());
}

SubstitutionTable SubstitutionTableBuilder::build() const {
  SubstitutionTable table;
  for (const auto& [key, members] : sets_) {
    table.sets_.emplace(key, std::vector<std::string>(members.begin(), members.end()));
  }
  table.dictionary_.assign(dictionary_.begin(), dictionary_.end());
  table.index();
  return table;
}

void SubstitutionTable::index() {
  membership_.clear();
  for (const auto& [key, members] : sets_) {
    for (const auto& m : members) membership_[m].push_back(key);
  }
}

std::span<const std::string> SubstitutionTable::members(const SubstitutionKey& key) const {
  auto it = sets_.find(key);
  if (it == sets_.end()) return {};
  return it->second;
}

std::span<const SubstitutionKey> SubstitutionTable::keys_of(const std::string& token) const {
  auto it = membership_.find(token);
  if (it == membership_.end()) return {};
  return it->second;
}

std::size_t SubstitutionTable::set_count(PosGroup group) const {
  return static_cast<std::size_t>(std::count_if(
      sets_.begin(), sets_.end(), [&](const auto& e) { return e.first.pos_group() == group; }));
}

void SubstitutionTable::check_invariants() const {
  for (const auto& [key, members] : sets_) {
    if (members.empty()) throw Error("empty set " + key.to_string());
    if (!std::is_sorted(members.begin(), members.end()) ||
        std::adjacent_find(members.begin(), members.end()) != members.end()) {
      throw Error("set " + key.to_string() + " is not sorted and unique");
    }
    for (const auto& m : members) {
      auto keys = keys_of(m);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw Error("'" + m + "' missing from membership of " + key.to_string());
      }
      if (!std::binary_search(dictionary_.begin(), dictionary_.end(), m)) {
        throw Error("'" + m + "' in " + key.to_string() + " but not in dictionary");
      }
    }
  }
  for (const auto& [token, keys] : membership_) {
    for (const auto& key : keys) {
      auto members_of = members(key);
      if (!std::binary_search(members_of.begin(), members_of.end(), token)) {
        throw Error("membership lists '" + token + "' under " + key.to_string() +
                    " but the set lacks it");
      }
    }
  }
}

void SubstitutionTable::save(std::ostream& out) const {
  for (const auto& [key, members] : sets_) {
    out << key.to_string() << '\t';
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out << ' ';
      out << members[i];
    }
    out << '\n';
  }
  out << kDictionaryHeader << '\n';
  for (const auto& t : dictionary_) out << t << '\n';
}

void SubstitutionTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  save(out);
}

SubstitutionTable SubstitutionTable::load(std::istream& in, const std::string& source) {
  SubstitutionTable table;
  std::string line;
  std::size_t line_no = 0;
  bool in_dictionary = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!in_dictionary && line == kDictionaryHeader) {
      in_dictionary = true;
      continue;
    }
    if (in_dictionary) {
      if (split_tokens(line).size() != 1) {
        throw FormatError(source, line_no, "expected one dictionary token per line");
      }
      table.dictionary_.push_back(line);
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(source, line_no, "expected key<TAB>members");
    try {
      auto key = SubstitutionKey::parse(std::string_view(line).substr(0, tab));
      auto members = split_tokens(std::string_view(line).substr(tab + 1));
      if (members.empty()) throw Error("set without members");
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      if (!table.sets_.emplace(std::move(key), std::move(members)).second) {
        throw Error("duplicate key");
      }
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(source, line_no, e.what());
    }
  }
  if (!in_dictionary) throw FormatError(source, line_no, "missing [dictionary] section");
  std::sort(table.dictionary_.begin(), table.dictionary_.end());
  table.dictionary_.erase(std::unique(table.dictionary_.begin(), table.dictionary_.end()),
                          table.dictionary_.end());
  table.index();
  try {
    table.check_invariants();
  } catch (const Error& e) {
    throw FormatError(source, line_no, e.what());
  }
  return table;
}

SubstitutionTable SubstitutionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load(in, path.string());
}

SubstitutionTable build_substitution_table(std::span<const TaggedSentence> tagged) {
  SubstitutionTableBuilder builder;
  for (const auto& sentence : tagged) builder.add(sentence);
  return builder.build();
}

}  // namespace ged
