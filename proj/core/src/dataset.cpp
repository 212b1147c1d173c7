#include "ged/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ged/error.hpp"

namespace ged {

DatasetReader::DatasetReader(std::istream& in, std::string source)
    : in_(in), source_(std::move(source)) {}

std::optional<LabeledSentence> DatasetReader::next() {
  LabeledSentence sentence;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!sentence.tokens.empty()) return sentence;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(source_, line_, "expected token<TAB>label, found no label");
    }
    if (line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(source_, line_, "expected exactly two fields");
    }
    std::string token = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    if (token.empty()) throw FormatError(source_, line_, "empty token");
    if (split_tokens(token).size() != 1 || split_tokens(token)[0] != token) {
      throw FormatError(source_, line_, "token contains whitespace");
    }
    if (label.empty()) throw FormatError(source_, line_, "missing label");
    if (label != "0" && label != "1") {
      throw FormatError(source_, line_, "label must be 0 or 1, got '" + label + "'");
    }
    sentence.tokens.push_back(std::move(token));
    sentence.labels.push_back(label == "1" ? kCorrect : kIncorrect);
  }
  if (!sentence.tokens.empty()) return sentence;
  return std::nullopt;
}

std::vector<LabeledSentence> read_dataset(std::istream& in, const std::string& source) {
  DatasetReader reader(in, source);
  std::vector<LabeledSentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

std::vector<LabeledSentence> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_dataset(in, path.string());
}

void write_dataset(std::ostream& out, std::span<const LabeledSentence> data) {
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& sentence = data[s];
    sentence.validate();
    if (sentence.tokens.empty()) {
      throw Error("sentence " + std::to_string(s) + " is empty and cannot be written");
    }
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const auto& token = sentence.tokens[i];
      if (token.find_first_of(" \t\n\r\f\v") != std::string::npos) {
        throw Error("sentence " + std::to_string(s) + " token " + std::to_string(i) +
                    " contains whitespace");
      }
      out << token << '\t' << (sentence.labels[i] == kCorrect ? '1' : '0') << '\n';
    }
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const LabeledSentence> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_dataset(out, data);
}

}  // namespace ged
