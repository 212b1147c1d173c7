#include "ged/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "ged/error.hpp"

namespace ged {

void TokenCounts::add(std::span<const std::string> tokens) {
  for (const auto& t : tokens) ++counts_[t];
  total_ += tokens.size();
}

void TokenCounts::merge(const TokenCounts& other) {
  for (const auto& [token, n] : other.counts_) counts_[token] += n;
  total_ += other.total_;
}

std::uint64_t TokenCounts::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

Vocabulary::Vocabulary() {
  tokens_ = {std::string(kPadToken), std::string(kUnkToken), std::string(kNumToken)};
  index();
}

bool Vocabulary::is_reserved(std::string_view token) {
  return token == kPadToken || token == kUnkToken || token == kNumToken;
}

Vocabulary Vocabulary::from_counts(const TokenCounts& counts,
                                   std::uint64_t min_frequency) {
  if (min_frequency == 0) throw Error("min_frequency must be at least 1");
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [token, n] : counts.counts()) {
    if (n >= min_frequency && !is_reserved(token)) kept.emplace_back(token, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  vocab.min_frequency_ = min_frequency;
  for (auto& entry : kept) vocab.tokens_.push_back(std::move(entry.first));
  vocab.index();
  return vocab;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::uint64_t min_frequency) {
  const Vocabulary reserved;
  if (tokens.size() < kReservedCount ||
      !std::equal(reserved.tokens_.begin(), reserved.tokens_.end(), tokens.begin())) {
    throw Error("vocabulary must start with the reserved markers <pad> <unk> <num>");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.min_frequency_ = min_frequency;
  vocab.index();
  return vocab;
}

void Vocabulary::index() {
  ids_.clear();
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error("empty token in vocabulary at id " + std::to_string(i));
    auto [it, inserted] = ids_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  save(out);
}

Vocabulary Vocabulary::load(std::istream& in, const std::string& source) {
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || split_tokens(line).size() != 1 || split_tokens(line)[0] != line) {
      throw FormatError(source, line_no, "expected exactly one token per line");
    }
    tokens.push_back(line);
  }
  try {
    return from_tokens(std::move(tokens));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(source, line_no, e.what());
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load(in, path.string());
}

Vocabulary build_vocabulary(std::span<const Sentence> corpus,
                            std::uint64_t min_frequency) {
  if (corpus.empty()) throw Error("build_vocabulary: empty corpus");
  TokenCounts counts;
  for (const auto& s : corpus) counts.add(s);
  return Vocabulary::from_counts(counts, min_frequency);
}

}  // namespace ged
