#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ged/corpus.hpp"

namespace ged {

// Labeled dataset in TSV form: one `token<TAB>label` per line, a blank line
// after each sentence, labels "0" or "1".
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in, std::string source = "<dataset>");

  // Next sentence, or nullopt at end of input. Throws FormatError with the
  // offending line number.
  std::optional<LabeledSentence> next();

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::vector<LabeledSentence> read_dataset(std::istream& in,
                                          const std::string& source = "<dataset>");
std::vector<LabeledSentence> read_dataset(const std::filesystem::path& path);

// Throws ged::Error for sentences that cannot be represented (empty, or
// tokens containing whitespace).
void write_dataset(std::ostream& out, std::span<const LabeledSentence> data);
void write_dataset(const std::filesystem::path& path,
                   std::span<const LabeledSentence> data);

}  // namespace ged
