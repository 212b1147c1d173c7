#include <algorithm>

#include "ged/error.hpp"
#include "ged/noisegen.hpp"
#include "ged/vocabulary.hpp"

namespace ged {

namespace {

using GroupFilter = std::set<PosGroup>;

// Sets containing `w` that may supply a replacement: at least two members and,
// when a filter is given, a key group inside it.
std::vector<const SubstitutionKey*> eligible_keys(const std::string& w,
                                                  const SubstitutionTable& table,
                                                  const GroupFilter* filter) {
  std::vector<const SubstitutionKey*> out;
  for (const auto& key : table.keys_of(w)) {
    if (table.members(key).size() < 2) continue;
    if (filter && !filter->count(key.pos_group())) continue;
    out.push_back(&key);
  }
  return out;
}

std::string draw_different(std::span<const std::string> pool, const std::string& w, Rng& rng) {
  while (true) {
    const std::string& candidate = pool[rng.uniform_index(pool.size())];
    if (candidate != w) return candidate;
  }
}

LabeledSentence replace_at(const Sentence& sentence, std::size_t position,
                           std::string replacement) {
  LabeledSentence out = LabeledSentence::all_correct(sentence.tokens);
  out.tokens[position] = std::move(replacement);
  out.labels[position] = kIncorrect;
  return out;
}

LabeledSentence substitute_linguistic(const Sentence& sentence, std::size_t position,
                                      const std::vector<const SubstitutionKey*>& keys,
                                      const SubstitutionTable& table, Rng& rng) {
  const std::string& w = sentence.tokens[position];
  if (keys.empty()) return replace_at(sentence, position, draw_different(table.dictionary(), w, rng));
  const SubstitutionKey& key = *keys[rng.uniform_index(keys.size())];
  return replace_at(sentence, position, draw_different(table.members(key), w, rng));
}

void require_dictionary(const SubstitutionTable& table) {
  if (table.dictionary().size() <= 1) {
    throw Error("linguistic noise needs a dictionary of at least two tokens");
  }
}

std::size_t drawable_count(std::span<const std::string> vocab_tokens) {
  if (vocab_tokens.size() >= Vocabulary::kReservedCount + 2) {
    return vocab_tokens.size() - Vocabulary::kReservedCount;  // lower bound is enough
  }
  return static_cast<std::size_t>(std::count_if(
      vocab_tokens.begin(), vocab_tokens.end(),
      [](const std::string& t) { return !Vocabulary::is_reserved(t); }));
}

LabeledSentence uniform_unchecked(const Sentence& sentence,
                                  std::span<const std::string> vocab_tokens, Rng& rng) {
  const std::size_t position = rng.uniform_index(sentence.size());
  const std::string& w = sentence.tokens[position];
  while (true) {
    const std::string& candidate = vocab_tokens[rng.uniform_index(vocab_tokens.size())];
    if (candidate != w && !Vocabulary::is_reserved(candidate)) {
      return replace_at(sentence, position, candidate);
    }
  }
}

}  // namespace

std::string_view to_string(NoiseMode mode) {
  return mode == NoiseMode::kUniform ? "uniform" : "ling";
}

LabeledSentence inject_error_linguistic(const Sentence& sentence,
                                        const SubstitutionTable& table, Rng& rng) {
  if (sentence.tokens.empty()) throw Error("cannot inject an error into an empty sentence");
  require_dictionary(table);
  const std::size_t position = rng.uniform_index(sentence.size());
  const auto keys = eligible_keys(sentence.tokens[position], table, nullptr);
  return substitute_linguistic(sentence, position, keys, table, rng);
}

LabeledSentence inject_error_uniform(const Sentence& sentence,
                                     std::span<const std::string> vocab_tokens, Rng& rng) {
  if (sentence.tokens.empty()) throw Error("cannot inject an error into an empty sentence");
  if (drawable_count(vocab_tokens) < 2) {
    throw Error("uniform noise needs at least two non-reserved vocabulary tokens");
  }
  return uniform_unchecked(sentence, vocab_tokens, rng);
}

GenerationResult generate_training_set(std::span<const Sentence> corpus,
                                       const SubstitutionTable* table,
                                       std::span<const std::string> vocab_tokens,
                                       const NoiseConfig& config) {
  GenerationResult result;
  result.sentences.reserve(corpus.size());

  if (config.group_filter && config.group_filter->empty()) {
    throw Error("group filter must not be empty");
  }

  if (config.mode == NoiseMode::kUniform) {
    if (config.group_filter) throw Error("group filter applies to linguistic mode only");
    if (drawable_count(vocab_tokens) < 2) {
      throw Error("uniform noise needs at least two non-reserved vocabulary tokens");
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].tokens.empty()) throw Error("empty sentence at index " + std::to_string(i));
      Rng rng = Rng::derive(config.seed, i);
      result.sentences.push_back(uniform_unchecked(corpus[i], vocab_tokens, rng));
    }
    return result;
  }

  if (!table) throw Error("linguistic noise requires a substitution table");
  require_dictionary(*table);
  const GroupFilter* filter = config.group_filter ? &*config.group_filter : nullptr;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Sentence& sentence = corpus[i];
    if (sentence.tokens.empty()) throw Error("empty sentence at index " + std::to_string(i));
    Rng rng = Rng::derive(config.seed, i);

    if (!filter) {
      const std::size_t position = rng.uniform_index(sentence.size());
      const auto keys = eligible_keys(sentence.tokens[position], *table, nullptr);
      result.sentences.push_back(substitute_linguistic(sentence, position, keys, *table, rng));
      continue;
    }

    bool done = false;
    for (std::size_t attempt = 0; attempt < sentence.size() && !done; ++attempt) {
      const std::size_t position = rng.uniform_index(sentence.size());
      const auto keys = eligible_keys(sentence.tokens[position], *table, filter);
      if (keys.empty()) continue;
      result.sentences.push_back(substitute_linguistic(sentence, position, keys, *table, rng));
      done = true;
    }
    if (!done) {
      result.sentences.push_back(LabeledSentence::all_correct(sentence.tokens));
      ++result.skipped;
    }
  }
  return result;
}

}  // namespace ged
