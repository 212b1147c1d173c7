#include "ged/evaluate.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ged/error.hpp"

namespace ged {

void Confusion::merge(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
}

template <class Real>
Confusion count_predictions(std::span<const Real> probs, std::span<const std::uint8_t> labels,
                            double threshold) {
  if (probs.size() != labels.size()) {
    throw Error("count_predictions: " + std::to_string(probs.size()) + " probabilities for " +
                std::to_string(labels.size()) + " labels");
  }
  Confusion c;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool flagged = static_cast<double>(probs[i]) < threshold;
    const bool erroneous = labels[i] == kIncorrect;
    if (flagged && erroneous) ++c.tp;
    else if (flagged) ++c.fp;
    else if (erroneous) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0) return 0;
  return (1 + b2) * precision * recall / denom;
}

EvalReport make_report(const Confusion& counts, double beta, double threshold) {
  EvalReport r;
  r.counts = counts;
  r.beta = beta;
  r.threshold = threshold;
  const auto flagged = counts.tp + counts.fp;
  const auto gold = counts.tp + counts.fn;
  r.precision = flagged ? 100.0 * static_cast<double>(counts.tp) / static_cast<double>(flagged) : 0;
  r.recall = gold ? 100.0 * static_cast<double>(counts.tp) / static_cast<double>(gold) : 0;
  r.f_beta = f_beta(r.precision, r.recall, beta);
  return r;
}

template <class Real>
EvalReport evaluate(const Detector<Real>& detector, std::span<const EncodedSentence> data,
                    double threshold, double beta) {
  Confusion total;
  for (const auto& s : data) {
    const auto probs = detector.predict(s.ids);
    total.merge(count_predictions<Real>(probs, s.labels, threshold));
  }
  EvalReport r = make_report(total, beta, threshold);
  r.sentences = data.size();
  return r;
}

std::string format_report_text(const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "sentences %zu\ntp %llu fp %llu fn %llu\nprecision %.2f\nrecall %.2f\nF%g %.2f\n",
                r.sentences, static_cast<unsigned long long>(r.counts.tp),
                static_cast<unsigned long long>(r.counts.fp),
                static_cast<unsigned long long>(r.counts.fn), r.precision, r.recall, r.beta,
                r.f_beta);
  return buf;
}

std::string format_report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["sentences"] = r.sentences;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["tn"] = r.counts.tn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_beta"] = r.f_beta;
  j["beta"] = r.beta;
  j["threshold"] = r.threshold;
  return j.dump(2) + "\n";
}

template <class Real>
std::vector<std::size_t> flagged_positions(std::span<const Real> probs, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (static_cast<double>(probs[i]) < threshold) out.push_back(i);
  }
  return out;
}

template Confusion count_predictions<float>(std::span<const float>, std::span<const std::uint8_t>, double);
template Confusion count_predictions<double>(std::span<const double>, std::span<const std::uint8_t>, double);
template EvalReport evaluate<float>(const Detector<float>&, std::span<const EncodedSentence>, double, double);
template EvalReport evaluate<double>(const Detector<double>&, std::span<const EncodedSentence>, double, double);
template std::vector<std::size_t> flagged_positions<float>(std::span<const float>, double);
template std::vector<std::size_t> flagged_positions<double>(std::span<const double>, double);

}  // namespace ged
