#include <fstream>
#include <istream>

#include "ged/error.hpp"
#include "ged/lingpipe.hpp"

namespace ged {

std::vector<TaggedSentence> parse_tagged_corpus(std::istream& in,
                                                const std::string& source) {
  std::vector<TaggedSentence> out;
  TaggedSentence current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(source, line_no, "expected token<TAB>TAG");
    }
    std::string surface = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (surface.empty() || tag.empty()) {
      throw FormatError(source, line_no, "empty token or tag");
    }
    if (surface.find(' ') != std::string::npos) {
      throw FormatError(source, line_no, "token contains a space");
    }
    if (!is_known_tag(tag)) tag = "UNK";
    current.push_back(TaggedToken{std::move(surface), std::move(tag)});
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<TaggedSentence> parse_tagged_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_tagged_corpus(in, path.string());
}

}  // namespace ged
