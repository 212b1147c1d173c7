#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ged/autodiff.hpp"
#include "ged/model.hpp"
#include "ged/vocabulary.hpp"

namespace ged {

struct NamedTensor {
  std::string name;
  ad::Tensor<float> value;
  bool operator==(const NamedTensor&) const = default;
};

// A trained detector together with the vocabulary its ids refer to.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  ModelConfig model;
  Vocabulary vocabulary;
  std::map<std::string, std::string> metadata;  // seed, epoch, ...
  std::vector<NamedTensor> parameters;

  bool operator==(const Checkpoint&) const = default;
};

Checkpoint make_checkpoint(const Detector<float>& detector, const Vocabulary& vocabulary,
                           std::map<std::string, std::string> metadata = {});

// Copies the checkpoint tensors into detector. Throws ShapeError when a
// tensor is missing or its shape differs from the detector's.
void restore_parameters(Detector<float>& detector, const Checkpoint& checkpoint);
Detector<float> load_detector(const Checkpoint& checkpoint);

// Layout: magic line, "version N", key=value metadata lines, the
// vocabulary, then per tensor a "param <name> <rank> <dims...>" line
// followed by little-endian float32 values, and a closing "end" line.
void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
// Throws FormatError on a corrupt or truncated file or a version mismatch.
Checkpoint load_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ged
