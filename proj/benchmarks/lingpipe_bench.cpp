#include <benchmark/benchmark.h>

#include "ged/lingpipe.hpp"
#include "ged/noisegen.hpp"

namespace {

const std::vector<std::string> kWords = {
    "running",  "generalizations", "oscillators", "hopefully", "relational", "conditional",
    "suitably", "agreement",       "sensibility", "buildings", "caresses",   "motoring",
    "probate",  "controlling",     "electrical",  "formality", "adjustable", "effective"};

void BM_PorterStem(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& w : kWords) benchmark::DoNotOptimize(ged::porter_stem(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kWords.size()));
}
BENCHMARK(BM_PorterStem);

void BM_LemmatizeVerb(benchmark::State& state) {
  const std::vector<std::string> verbs = {"built", "was", "studied", "stopping", "computed",
                                          "watches", "agreed", "hoping", "goes", "taken"};
  for (auto _ : state) {
    for (const auto& w : verbs) benchmark::DoNotOptimize(ged::lemmatize(w, ged::PosGroup::kVerb));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(verbs.size()));
}
BENCHMARK(BM_LemmatizeVerb);

ged::SubstitutionTable demo_table() {
  ged::TaggedSentence s = {{"the", "DT"},   {"a", "DT"},      {"an", "DT"},     {"this", "DT"},
                           {"build", "VB"}, {"built", "VBD"}, {"builds", "VBZ"}, {"in", "IN"},
                           {"on", "IN"},    {"of", "IN"},     {"egg", "NN"},    {"eggs", "NNS"},
                           {"quick", "JJ"}, {"quickly", "RB"}, {".", "."}};
  return ged::build_substitution_table(std::vector<ged::TaggedSentence>{s});
}

void BM_InjectLinguistic(benchmark::State& state) {
  const auto table = demo_table();
  const ged::Sentence s{ged::split_tokens("the eggs built in a quick nest of this tree .")};
  ged::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(ged::inject_error_linguistic(s, table, rng));
}
BENCHMARK(BM_InjectLinguistic);

}  // namespace
