#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ged/corpus.hpp"
#include "ged/lingpipe.hpp"
#include "ged/rng.hpp"

namespace ged {

enum class KeyKind { kGroup, kLemma, kStem };

// Identifies one substitution set: a closed-class group, a (NOUN|VERB, lemma)
// pair, or an (ADJ|ADV, stem) pair.
class SubstitutionKey {
 public:
  static SubstitutionKey group(PosGroup group);
  static SubstitutionKey lemma(PosGroup group, std::string lemma);
  static SubstitutionKey stem(PosGroup group, std::string stem);

  // "group:DET", "lemma:VERB:build", "stem:ADV:suitabl"
  std::string to_string() const;
  static SubstitutionKey parse(std::string_view text);

  KeyKind kind() const { return kind_; }
  PosGroup pos_group() const { return group_; }
  const std::string& base() const { return base_; }

  auto operator<=>(const SubstitutionKey&) const = default;

 private:
  SubstitutionKey(KeyKind kind, PosGroup group, std::string base)
      : kind_(kind), group_(group), base_(std::move(base)) {}

  KeyKind kind_;
  PosGroup group_;
  std::string base_;
};

// Key for a (token, tag) pair, or nullopt when the tag's group feeds only the
// dictionary.
std::optional<SubstitutionKey> substitution_key_for(std::string_view token,
                                                    std::string_view tag);

class SubstitutionTable;

// Accumulates (token, tag) pairs; shards built independently can be merged
// in any order with the same result.
class SubstitutionTableBuilder {
 public:
  void add(const TaggedToken& token);
  void add(const TaggedSentence& sentence);
  void merge(const SubstitutionTableBuilder& other);
  SubstitutionTable build() const;

 private:
  std::map<SubstitutionKey, std::set<std::string>> sets_;
  std::set<std::string> dictionary_;
};

class SubstitutionTable {
 public:
  SubstitutionTable() = default;

  using SetMap = std::map<SubstitutionKey, std::vector<std::string>>;

  const SetMap& sets() const { return sets_; }
  // Members of a set, sorted; empty if the key is unknown.
  std::span<const std::string> members(const SubstitutionKey& key) const;
  // Keys of every set containing the token, sorted.
  std::span<const SubstitutionKey> keys_of(const std::string& token) const;
  // Distinct tokens of the tagged corpus, sorted.
  std::span<const std::string> dictionary() const { return dictionary_; }

  bool empty() const { return sets_.empty() && dictionary_.empty(); }
  std::size_t set_count(PosGroup group) const;

  // Throws ged::Error if a membership/dictionary invariant is broken.
  void check_invariants() const;

  // One line per set, `key<TAB>member member ...` in key order, then a
  // `[dictionary]` line followed by one dictionary token per line.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static SubstitutionTable load(std::istream& in, const std::string& source = "<table>");
  static SubstitutionTable load(const std::filesystem::path& path);

  bool operator==(const SubstitutionTable& other) const {
    return sets_ == other.sets_ && dictionary_ == other.dictionary_;
  }

 private:
  friend class SubstitutionTableBuilder;
  void index();

  SetMap sets_;
  std::unordered_map<std::string, std::vector<SubstitutionKey>> membership_;
  std::vector<std::string> dictionary_;
};

SubstitutionTable build_substitution_table(std::span<const TaggedSentence> tagged);

// --- error injection ------------------------------------------------------

enum class NoiseMode { kUniform, kLinguistic };

std::string_view to_string(NoiseMode mode);

struct NoiseConfig {
  NoiseMode mode = NoiseMode::kLinguistic;
  std::uint64_t seed = 0;
  // Linguistic mode only: restricts substitutions to sets of these groups.
  std::optional<std::set<PosGroup>> group_filter;
};

// Picks a random position and replaces its token from a multi-member set that
// contains it (chosen uniformly among such sets), or from the dictionary when
// no such set exists. The replaced position is labeled incorrect.
// Throws ged::Error if the dictionary has fewer than two tokens.
LabeledSentence inject_error_linguistic(const Sentence& sentence,
                                        const SubstitutionTable& table, Rng& rng);

// Replaces a random position with a different vocabulary token. Reserved
// markers are never drawn. Throws ged::Error when fewer than two drawable
// tokens exist.
LabeledSentence inject_error_uniform(const Sentence& sentence,
                                     std::span<const std::string> vocab_tokens, Rng& rng);

struct GenerationResult {
  std::vector<LabeledSentence> sentences;
  std::size_t skipped = 0;  // sentences left all-correct by the group filter
};

// One error per sentence. Sentence i draws from Rng::derive(seed, i), so the
// output does not depend on processing order. `table` is required in
// linguistic mode, `vocab_tokens` in uniform mode.
GenerationResult generate_training_set(std::span<const Sentence> corpus,
                                       const SubstitutionTable* table,
                                       std::span<const std::string> vocab_tokens,
                                       const NoiseConfig& config);

}  // namespace ged
