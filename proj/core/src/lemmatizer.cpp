#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ged/lingpipe.hpp"

namespace ged {

namespace {

// Each line: lemma followed by its irregular forms. The lemma itself is
// recorded as a form of itself, which protects bases such as "sing" or
// "need" from the suffix rules.
constexpr std::string_view kIrregularVerbs = R"(
be am is are was were been being
have has had having
do does did done doing
go goes went gone going
arise arose arisen
awake awoke awoken
bear bore borne born
beat beaten
become became
begin began begun
behold beheld
bend bent
bet
bid
bind bound
bite bit bitten
bleed bled
blow blew blown
break broke broken
breed bred
bring brought
broadcast
build built
burn burnt
burst
buy bought
cast
catch caught
choose chose chosen
cling clung
come came
cost
creep crept
cut
deal dealt
dig dug
dive dove
draw drew drawn
dream dreamt
drink drank drunk
drive drove driven
dwell dwelt
eat ate eaten
fall fell fallen
feed fed
feel felt
fight fought
find found
fit
flee fled
fling flung
fly flew flown flies
forbid forbade forbidden
forecast
foresee foresaw foreseen
forget forgot forgotten
forgive forgave forgiven
forgo forwent forgone
forsake forsook forsaken
freeze froze frozen
get got gotten
give gave given
grind ground
grow grew grown
hang hung
hear heard
hew hewn
hide hid hidden
hit
hold held
hurt
input
keep kept
kneel knelt
know knew known
lay laid
lead led
lean leant
leap leapt
learn learnt
leave left
lend lent
let
lie lain lies lying lied
light lit
lose lost
make made
mean meant
meet met
mislay mislaid
mislead misled
misread
mistake mistook mistaken
misunderstand misunderstood
mow mown
offset
outdo outdid outdone
output
overcome overcame
overhear overheard
override overrode overridden
overrun overran
oversee oversaw overseen
overtake overtook overtaken
overthrow overthrew overthrown
partake partook partaken
pay paid
prepay prepaid
prove proven
put
quit
read
rebuild rebuilt
redo redid redone redoes
repay repaid
resell resold
retell retold
rethink rethought
rewrite rewrote rewritten
rid
ride rode ridden
ring rang rung
rise rose risen
run ran
say said
see saw seen
seek sought
sell sold
send sent
set
sew sewn
shake shook shaken
shear shorn
shed
shine shone
shoot shot
show shown
shrink shrank shrunk
shut
sing sang sung
sink sank sunk
sit sat
slay slew slain
sleep slept
slide slid
sling slung
slit
smell smelt
smite smote smitten
sow sown
speak spoke spoken
speed sped
spell spelt
spend spent
spill spilt
spin spun
spit spat
split
spoil spoilt
spread
spring sprang sprung
stand stood
steal stole stolen
stick stuck
sting stung
stink stank stunk
stride strode stridden
strike struck stricken
string strung
strive strove striven
swear swore sworn
sweep swept
swell swollen
swim swam swum
swing swung
take took taken
teach taught
tear tore torn
tell told
think thought
thrive throve thriven
throw threw thrown
thrust
tread trod trodden
undergo underwent undergone undergoes
understand understood
undertake undertook undertaken
undo undid undone undoes
unwind unwound
uphold upheld
upset
wake woke woken
wear wore worn
weave wove woven
weep wept
wet
win won
wind wound
withdraw withdrew withdrawn
withhold withheld
withstand withstood
wring wrung
write wrote written
die died dies dying
tie tied ties tying
add added adding adds
use used uses using
focus focused focuses focusing
create created creates creating
explore explored explores exploring
ignore ignored ignores ignoring
store stored stores storing
score scored scores scoring
restore restored restores restoring
need needed needs needing
proceed
exceed
succeed
)";

constexpr std::string_view kIrregularNouns = R"(
man men
woman women
child children
foot feet
tooth teeth
goose geese
mouse mice
louse lice
ox oxen
person people
die dice
penny pence
datum data
criterion criteria
phenomenon phenomena
analysis analyses
hypothesis hypotheses
thesis theses
basis
crisis crises
diagnosis diagnoses
parenthesis parentheses
synthesis syntheses
emphasis emphases
axis axes
matrix matrices
index indices
vertex vertices
appendix appendices
corpus corpora
genus genera
formula formulae
antenna antennae
alumnus alumni
stimulus stimuli
radius radii
nucleus nuclei
fungus fungi
cactus cacti
syllabus syllabi
locus loci
curriculum curricula
medium media
memorandum memoranda
stratum strata
bacterium bacteria
spectrum spectra
maximum maxima
minimum minima
optimum optima
quantum quanta
erratum errata
schema schemata
knife knives
wife wives
life lives
leaf leaves
half halves
self selves
shelf shelves
wolf wolves
calf calves
loaf loaves
thief thieves
sheaf sheaves
elf elves
potato potatoes
tomato tomatoes
hero heroes
echo echoes
veto vetoes
quiz quizzes
bus buses
gas gases
lens lenses
virus viruses
status statuses
bonus bonuses
census censuses
campus campuses
consensus
focus
apparatus
chaos
ethos
atlas atlases
canvas canvases
iris irises
sheep
fish
deer
series
species
news
means
aircraft
offspring
mathematics
physics
linguistics
statistics
economics
politics
ethics
)";

using Table = std::vector<std::pair<std::string_view, std::string_view>>;

struct LemmaTable {
  Table pairs;
  std::unordered_map<std::string_view, std::string_view> index;

  std::string_view find(std::string_view form) const {
    auto it = index.find(form);
    return it == index.end() ? std::string_view() : it->second;
  }
};

LemmaTable build_table(std::string_view source) {
  std::vector<std::vector<std::string_view>> lines;
  std::size_t pos = 0;
  while (pos < source.size()) {
    std::size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(pos, end - pos);
    pos = end + 1;
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ') ++i;
      if (i > start) words.push_back(line.substr(start, i - start));
    }
    if (!words.empty()) lines.push_back(std::move(words));
  }

  LemmaTable table;
  auto record = [&](std::string_view form, std::string_view lemma) {
    if (table.index.emplace(form, lemma).second) table.pairs.emplace_back(form, lemma);
  };
  // lemmas first, so a form that is also a listed lemma keeps itself
  for (const auto& words : lines) record(words[0], words[0]);
  for (const auto& words : lines) {
    for (std::size_t i = 1; i < words.size(); ++i) record(words[i], words[0]);
  }
  return table;
}

const LemmaTable& verb_table() {
  static const LemmaTable table = build_table(kIrregularVerbs);
  return table;
}

const LemmaTable& noun_table() {
  static const LemmaTable table = build_table(kIrregularNouns);
  return table;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool has_vowel(std::string_view s) {
  for (char c : s) {
    if (is_vowel(c) || c == 'y') return true;
  }
  return false;
}

bool is_consonant_char(char c) { return c >= 'a' && c <= 'z' && !is_vowel(c); }

// consonant-vowel-consonant ending, last not w/x/y
bool ends_cvc(std::string_view s) {
  const auto n = s.size();
  if (n < 3) return false;
  return is_consonant_char(s[n - 3]) && is_vowel(s[n - 2]) && is_consonant_char(s[n - 1]) &&
         s[n - 1] != 'w' && s[n - 1] != 'x' && s[n - 1] != 'y';
}

int vowel_groups(std::string_view s) {
  int groups = 0;
  bool prev = false;
  for (char c : s) {
    const bool v = is_vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  return groups;
}

// Restores the base after "-ed"/"-ing" removal: undoubles final consonants
// and puts back a silent "e" where the stem shape calls for one.
std::string restore_verb_stem(std::string stem) {
  const auto n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant_char(stem[n - 1])) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  std::string_view s(stem);
  auto needs_e = [&]() {
    if (s.ends_with("bl") || s.ends_with("iz") || s.ends_with("yz")) return true;
    if (s.ends_with("at") && n >= 3 &&
        (!is_vowel(s[n - 3]) || s[n - 3] == 'u' || s[n - 3] == 'i')) {
      return true;
    }
    if (s.ends_with("ut") && vowel_groups(s) > 1) return true;
    if (s.ends_with("os") && n >= 4) return true;
    if (s.ends_with("v") || s.ends_with("u") || s.ends_with("c")) return true;
    if (s.ends_with("ir") && n > 3) return true;
    if (n >= 3 && s.ends_with("ur") && is_consonant_char(s[n - 3])) return true;
    if (n >= 3 && s.ends_with("ar") && is_consonant_char(s[n - 3]) && vowel_groups(s) > 1) {
      return true;
    }
    if (n >= 3 && s.back() == 's') {
      const char before = s[n - 2];
      if (is_vowel(before) && is_vowel(s[n - 3])) return true;
      if (before == 'n' || before == 'r' || before == 'p' || before == 'l') return true;
    }
    return vowel_groups(s) == 1 && ends_cvc(s);
  };
  if (needs_e()) stem.push_back('e');
  return stem;
}

std::string lemmatize_verb(const std::string& w) {
  std::string_view s(w);
  const auto n = s.size();
  if (n <= 3) return w;

  if (s.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (s.ends_with("sses") || s.ends_with("xes") || s.ends_with("zzes") ||
      s.ends_with("ches") || s.ends_with("shes") || s.ends_with("oes")) {
    return w.substr(0, n - 2);
  }
  if (s.ends_with("ing")) {
    std::string_view stem = s.substr(0, n - 3);
    if (stem.size() >= 2 && has_vowel(stem)) return restore_verb_stem(std::string(stem));
    return w;
  }
  if (s.ends_with("eed")) {
    if (n <= 4 || s.ends_with("ceed")) return w;
    return w.substr(0, n - 1);
  }
  if (s.ends_with("ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (s.ends_with("ed")) {
    std::string_view stem = s.substr(0, n - 2);
    if (stem.size() >= 2 && has_vowel(stem)) return restore_verb_stem(std::string(stem));
    return w;
  }
  if (s.ends_with("ss") || s.ends_with("us") || s.ends_with("is")) return w;
  if (s.ends_with("s")) return w.substr(0, n - 1);
  return w;
}

std::string lemmatize_noun(const std::string& w) {
  std::string_view s(w);
  const auto n = s.size();
  if (n <= 3) return w;
  if (s.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (s.ends_with("sses") || s.ends_with("xes") || s.ends_with("zzes") ||
      s.ends_with("ches") || s.ends_with("shes")) {
    return w.substr(0, n - 2);
  }
  if (s.ends_with("ss") || s.ends_with("us") || s.ends_with("is")) return w;
  if (s.ends_with("s")) return w.substr(0, n - 1);
  return w;
}

}  // namespace

std::span<const std::pair<std::string_view, std::string_view>> irregular_verbs() {
  return verb_table().pairs;
}

std::span<const std::pair<std::string_view, std::string_view>> irregular_nouns() {
  return noun_table().pairs;
}

std::string lemmatize(std::string_view word, PosGroup group) {
  if (group != PosGroup::kNoun && group != PosGroup::kVerb) {
    throw std::invalid_argument("lemmatize: group must be NOUN or VERB, got " +
                                std::string(to_string(group)));
  }
  const std::string w = to_lower(word);
  const LemmaTable& table = group == PosGroup::kVerb ? verb_table() : noun_table();
  if (auto lemma = table.find(w); !lemma.empty()) return std::string(lemma);
  return group == PosGroup::kVerb ? lemmatize_verb(w) : lemmatize_noun(w);
}

}  // namespace ged
