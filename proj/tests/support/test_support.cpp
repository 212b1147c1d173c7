#include "test_support.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "ged/rng.hpp"

#ifndef GED_FIXTURE_DIR
#error "GED_FIXTURE_DIR must be defined"
#endif

namespace ged::testing {

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(GED_FIXTURE_DIR) / name;
}

TempDir::TempDir(const std::string& prefix) {
  static std::uint64_t counter = 0;
  Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(prefix)) ^
          static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = std::filesystem::temp_directory_path() /
                     (prefix + "-" + std::to_string(rng.next() % 1000000000) + "-" +
                      std::to_string(++counter));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

namespace {

template <std::size_t N>
const std::string_view& pick(Rng& rng, const std::array<std::string_view, N>& items) {
  return items[rng.uniform_index(N)];
}

constexpr std::array<std::string_view, 5> kSingularDets = {"a", "this", "that", "every", "each"};
constexpr std::array<std::string_view, 5> kPluralDets = {"these", "those", "two", "many", "several"};
constexpr std::array<std::string_view, 12> kAdjectives = {
    "ugly", "old", "small", "big", "red", "quiet", "strange", "young", "happy", "tall", "angry",
    "little"};
constexpr std::array<std::pair<std::string_view, std::string_view>, 10> kNouns = {{
    {"bird", "birds"}, {"dog", "dogs"}, {"man", "men"}, {"cat", "cats"}, {"house", "houses"},
    {"child", "children"}, {"tree", "trees"}, {"student", "students"}, {"box", "boxes"},
    {"city", "cities"}}};
constexpr std::array<std::string_view, 6> kVerbs = {"arrived", "appeared", "vanished",
                                                    "slept",   "waited",   "returned"};
constexpr std::array<std::string_view, 6> kAdverbs = {"yesterday", "today", "quickly",
                                                      "again",     "early", "later"};

bool starts_with_vowel(std::string_view w) {
  return !w.empty() && std::string_view("aeiou").find(w[0]) != std::string_view::npos;
}

}  // namespace

std::vector<LabeledSentence> agreement_corpus(std::size_t count, std::uint64_t seed,
                                              const AgreementGrammar& grammar) {
  std::vector<LabeledSentence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::derive(seed, i);
    const bool plural = rng.uniform_index(2) == 1;
    const std::size_t k =
        grammar.min_adjectives + rng.uniform_index(grammar.max_adjectives - grammar.min_adjectives + 1);
    Tokens tokens;
    std::string det(plural ? pick(rng, kPluralDets) : pick(rng, kSingularDets));
    std::vector<std::string> adjs;
    for (std::size_t a = 0; a < k; ++a) adjs.emplace_back(pick(rng, kAdjectives));
    if (det == "a" && starts_with_vowel(adjs.front())) det = "an";
    tokens.push_back(det);
    tokens.insert(tokens.end(), adjs.begin(), adjs.end());

    const auto& noun = kNouns[rng.uniform_index(kNouns.size())];
    const bool corrupt = rng.uniform01() < grammar.error_rate;
    const bool noun_plural = corrupt ? !plural : plural;
    tokens.emplace_back(noun_plural ? noun.second : noun.first);
    tokens.emplace_back(pick(rng, kVerbs));
    tokens.emplace_back(pick(rng, kAdverbs));
    tokens.emplace_back(".");

    LabeledSentence s = LabeledSentence::all_correct(std::move(tokens));
    if (corrupt) s.labels[1 + k] = kIncorrect;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct Entry {
  std::string_view surface;
  std::string_view tag;
};

constexpr std::array<Entry, 66> kLexicon = {{
    {"the", "DT"},       {"a", "DT"},          {"an", "DT"},         {"this", "DT"},
    {"these", "DT"},     {"that", "DT"},       {"all", "PDT"},       {"of", "IN"},
    {"in", "IN"},        {"on", "IN"},         {"at", "IN"},         {"by", "IN"},
    {"for", "IN"},       {"to", "TO"},         {"up", "RP"},         {"and", "CC"},
    {"or", "CC"},        {"but", "CC"},        {"he", "PRP"},        {"they", "PRP"},
    {"his", "PRP$"},     {"their", "PRP$"},    {"which", "WDT"},     {"who", "WP"},
    {"when", "WRB"},     {"build", "VB"},      {"builds", "VBZ"},    {"built", "VBD"},
    {"building", "VBG"}, {"go", "VB"},         {"goes", "VBZ"},      {"went", "VBD"},
    {"gone", "VBN"},     {"is", "VBZ"},        {"are", "VBP"},       {"was", "VBD"},
    {"were", "VBD"},     {"study", "VB"},      {"studies", "VBZ"},   {"studied", "VBD"},
    {"egg", "NN"},       {"eggs", "NNS"},      {"model", "NN"},      {"models", "NNS"},
    {"child", "NN"},     {"children", "NNS"},  {"building", "NN"},   {"buildings", "NNS"},
    {"information", "NN"}, {"Paris", "NNP"},   {"suitable", "JJ"},   {"good", "JJ"},
    {"better", "JJR"},   {"quick", "JJ"},      {"suitably", "RB"},   {"quickly", "RB"},
    {"very", "RB"},      {"often", "RB"},      {"nearly", "RB"},     {"near", "JJ"},
    {"<num>", "CD"},     {",", ","},           {"must", "MD"},       {"there", "EX"},
    {"research", "NN"},  {"oh", "UH"},
}};

}  // namespace

std::vector<TaggedSentence> synthetic_tagged_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<TaggedSentence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::derive(seed, i);
    const std::size_t length = 8 + rng.uniform_index(20);
    TaggedSentence s;
    for (std::size_t t = 0; t + 1 < length; ++t) {
      const Entry& e = kLexicon[rng.uniform_index(kLexicon.size())];
      s.push_back({std::string(e.surface), std::string(e.tag)});
    }
    s.push_back({".", "."});
    out.push_back(std::move(s));
  }
  return out;
}

Sentence surface(const TaggedSentence& tagged) {
  Sentence s;
  for (const auto& t : tagged) s.tokens.push_back(t.surface);
  return s;
}

}  // namespace ged::testing
