#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ged/corpus.hpp"

namespace ged {

using TokenId = std::int32_t;

// Token frequencies. Counts from disjoint shards can be merged in any order.
class TokenCounts {
 public:
  void add(std::span<const std::string> tokens);
  void add(const Sentence& sentence) { add(sentence.tokens); }
  void merge(const TokenCounts& other);

  std::uint64_t count(const std::string& token) const;
  std::size_t distinct() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }
  const std::unordered_map<std::string, std::uint64_t>& counts() const {
    return counts_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

class Vocabulary {
 public:
  static constexpr TokenId kPadId = 0;
  static constexpr TokenId kUnkId = 1;
  static constexpr TokenId kNumId = 2;
  static constexpr std::size_t kReservedCount = 3;

  // Reserved markers only.
  Vocabulary();

  // Tokens with count >= min_frequency, ordered by descending frequency with
  // lexicographic tie-breaks, after the reserved markers.
  static Vocabulary from_counts(const TokenCounts& counts,
                                std::uint64_t min_frequency);

  // Token list in id order; the first entries must be the reserved markers.
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::uint64_t min_frequency = 1);

  TokenId id(std::string_view token) const;  // kUnkId when absent
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  std::uint64_t min_frequency() const { return min_frequency_; }
  static bool is_reserved(TokenId id) {
    return id >= 0 && static_cast<std::size_t>(id) < kReservedCount;
  }
  static bool is_reserved(std::string_view token);

  std::span<const std::string> tokens() const { return tokens_; }
  // Tokens excluding the reserved markers.
  std::span<const std::string> content_tokens() const {
    return std::span<const std::string>(tokens_).subspan(kReservedCount);
  }

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  std::vector<TokenId> encode(const Sentence& s) const { return encode(s.tokens); }

  // One token per line, line number = id.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(std::istream& in, const std::string& source = "<vocab>");
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::uint64_t min_frequency_ = 1;
};

// Throws ged::Error on an empty corpus or min_frequency == 0.
Vocabulary build_vocabulary(std::span<const Sentence> corpus,
                            std::uint64_t min_frequency);

}  // namespace ged
