#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ged/model.hpp"
#include "ged/train.hpp"

namespace ged {

// Positive class is an erroneous token: a token is flagged when its
// probability of being correct is below the threshold.
struct Confusion {
  std::uint64_t tp = 0;  // flagged, gold 0
  std::uint64_t fp = 0;  // flagged, gold 1
  std::uint64_t fn = 0;  // not flagged, gold 0
  std::uint64_t tn = 0;  // not flagged, gold 1

  void merge(const Confusion& other);
  bool operator==(const Confusion&) const = default;
};

template <class Real>
Confusion count_predictions(std::span<const Real> probs, std::span<const std::uint8_t> labels,
                            double threshold);

// F-measure of precision p and recall r in any common unit; 0 when both are 0.
double f_beta(double precision, double recall, double beta);

struct EvalReport {
  Confusion counts;
  double precision = 0;  // percent
  double recall = 0;     // percent
  double f_beta = 0;     // percent
  double beta = 0.5;
  double threshold = 0.5;
  std::size_t sentences = 0;

  bool operator==(const EvalReport&) const = default;
};

EvalReport make_report(const Confusion& counts, double beta = 0.5, double threshold = 0.5);

template <class Real>
EvalReport evaluate(const Detector<Real>& detector, std::span<const EncodedSentence> data,
                    double threshold = 0.5, double beta = 0.5);

std::string format_report_text(const EvalReport& report);
std::string format_report_json(const EvalReport& report);

// Indices (0-based) of tokens whose probability is below the threshold.
template <class Real>
std::vector<std::size_t> flagged_positions(std::span<const Real> probs, double threshold = 0.5);

}  // namespace ged
