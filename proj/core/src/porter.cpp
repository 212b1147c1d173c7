#include <functional>
#include <string>
#include <string_view>

#include "ged/lingpipe.hpp"

namespace ged {

namespace {

bool is_consonant(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 || !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// m in [C](VC)^m[V]
int measure(std::string_view stem) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < stem.size(); ++i) {
    const bool vowel = !is_consonant(stem, i);
    if (prev_vowel && !vowel) ++m;
    prev_vowel = vowel;
  }
  return m;
}

bool contains_vowel(std::string_view stem) {
  for (std::size_t i = 0; i < stem.size(); ++i) {
    if (!is_consonant(stem, i)) return true;
  }
  return false;
}

bool ends_double_consonant(std::string_view w) {
  const auto n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends consonant-vowel-consonant, last not w, x or y.
bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

using Condition = std::function<bool(std::string_view)>;

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Condition condition;
};

// The first rule whose suffix matches decides; if its condition fails the
// word is left unchanged.
std::string apply_rules(const std::string& word, const std::vector<Rule>& rules) {
  for (const auto& rule : rules) {
    if (!std::string_view(word).ends_with(rule.suffix)) continue;
    std::string_view stem(word.data(), word.size() - rule.suffix.size());
    if (!rule.condition || rule.condition(stem)) {
      return std::string(stem) + std::string(rule.replacement);
    }
    return word;
  }
  return word;
}

bool positive_measure(std::string_view stem) { return measure(stem) > 0; }
bool measure_above_one(std::string_view stem) { return measure(stem) > 1; }

std::string step1a(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}};
  return apply_rules(w, rules);
}

std::string step1b(const std::string& w) {
  std::string_view word(w);
  if (word.ends_with("eed")) {
    std::string_view stem = word.substr(0, word.size() - 3);
    return measure(stem) > 0 ? std::string(stem) + "ee" : w;
  }
  std::string stem;
  bool removed = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (word.ends_with(suffix)) {
      std::string_view candidate = word.substr(0, word.size() - suffix.size());
      if (contains_vowel(candidate)) {
        stem = std::string(candidate);
        removed = true;
        break;
      }
    }
  }
  if (!removed) return w;

  std::string_view s(stem);
  if (s.ends_with("at") || s.ends_with("bl") || s.ends_with("iz")) return stem + "e";
  if (ends_double_consonant(s)) {
    const char last = s.back();
    if (last != 'l' && last != 's' && last != 'z') return stem.substr(0, stem.size() - 1);
    return stem;
  }
  if (measure(s) == 1 && ends_cvc(s)) return stem + "e";
  return stem;
}

std::string step1c(const std::string& w) {
  static const std::vector<Rule> rules = {{"y", "i", contains_vowel}};
  return apply_rules(w, rules);
}

std::string step2(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"ational", "ate", positive_measure}, {"tional", "tion", positive_measure},
      {"enci", "ence", positive_measure},   {"anci", "ance", positive_measure},
      {"izer", "ize", positive_measure},    {"abli", "able", positive_measure},
      {"alli", "al", positive_measure},     {"entli", "ent", positive_measure},
      {"eli", "e", positive_measure},       {"ousli", "ous", positive_measure},
      {"ization", "ize", positive_measure}, {"ation", "ate", positive_measure},
      {"ator", "ate", positive_measure},    {"alism", "al", positive_measure},
      {"aliti", "al", positive_measure},    {"iveness", "ive", positive_measure},
      {"fulness", "ful", positive_measure}, {"ousness", "ous", positive_measure},
      {"iviti", "ive", positive_measure},   {"biliti", "ble", positive_measure},
  };
  return apply_rules(w, rules);
}

std::string step3(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"icate", "ic", positive_measure}, {"ative", "", positive_measure},
      {"alize", "al", positive_measure}, {"iciti", "ic", positive_measure},
      {"ical", "ic", positive_measure},  {"ful", "", positive_measure},
      {"ness", "", positive_measure},
  };
  return apply_rules(w, rules);
}

std::string step4(const std::string& w) {
  static const Condition ion = [](std::string_view stem) {
    return measure(stem) > 1 && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
  };
  static const std::vector<Rule> rules = {
      {"al", "", measure_above_one},    {"ance", "", measure_above_one},
      {"ence", "", measure_above_one},  {"er", "", measure_above_one},
      {"ic", "", measure_above_one},    {"able", "", measure_above_one},
      {"ible", "", measure_above_one},  {"ant", "", measure_above_one},
      {"ement", "", measure_above_one}, {"ment", "", measure_above_one},
      {"ent", "", measure_above_one},   {"ion", "", ion},
      {"ou", "", measure_above_one},    {"ism", "", measure_above_one},
      {"ate", "", measure_above_one},   {"iti", "", measure_above_one},
      {"ous", "", measure_above_one},   {"ive", "", measure_above_one},
      {"ize", "", measure_above_one},
  };
  return apply_rules(w, rules);
}

std::string step5a(const std::string& w) {
  if (!std::string_view(w).ends_with('e')) return w;
  std::string_view stem(w.data(), w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) return std::string(stem);
  return w;
}

std::string step5b(const std::string& w) {
  if (std::string_view(w).ends_with("ll") &&
      measure(std::string_view(w.data(), w.size() - 1)) > 1) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w = to_lower(word);
  if (w.empty()) return w;
  w = step1a(w);
  w = step1b(w);
  w = step1c(w);
  w = step2(w);
  w = step3(w);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

}  // namespace ged
