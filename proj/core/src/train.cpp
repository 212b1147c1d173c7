#include "ged/train.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "ged/error.hpp"

namespace ged {
namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double token_loss(double p, std::uint8_t label) {
  const double eps = ad::Graph<double>::kEpsilon;
  const double q = std::clamp(p, eps, 1.0 - eps);
  return label ? -std::log(q) : -std::log(1.0 - q);
}

}  // namespace

std::vector<EncodedSentence> encode_dataset(std::span<const LabeledSentence> data,
                                            const Vocabulary& vocabulary) {
  std::vector<EncodedSentence> out;
  out.reserve(data.size());
  for (const auto& s : data) {
    s.validate();
    if (s.tokens.empty()) throw Error("dataset contains an empty sentence");
    out.push_back({vocabulary.encode(s.tokens), s.labels});
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (!(clip_norm > 0)) throw Error("clip_norm must be positive");
  if (!(learning_rate > 0)) throw Error("learning rate must be positive");
  if (batch_size < 1) throw Error("batch size must be at least 1");
}

double sentence_loss(std::span<const double> probs, std::span<const std::uint8_t> labels) {
  if (probs.size() != labels.size()) {
    throw Error("sentence_loss: " + std::to_string(probs.size()) + " probabilities for " +
                std::to_string(labels.size()) + " labels");
  }
  if (probs.empty()) throw Error("sentence_loss: empty sentence");
  double total = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) total += token_loss(probs[i], labels[i]);
  return total / static_cast<double>(probs.size());
}

template <class Real>
double mean_loss(const Detector<Real>& detector, std::span<const EncodedSentence> data) {
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& s : data) {
    const auto probs = detector.predict(s.ids);
    for (std::size_t i = 0; i < probs.size(); ++i) total += token_loss(probs[i], s.labels[i]);
    tokens += probs.size();
  }
  if (tokens == 0) throw Error("mean_loss: no tokens");
  return total / static_cast<double>(tokens);
}

template double mean_loss<float>(const Detector<float>&, std::span<const EncodedSentence>);
template double mean_loss<double>(const Detector<double>&, std::span<const EncodedSentence>);

std::vector<EpochLog> train_detector(Detector<float>& detector,
                                     std::span<const EncodedSentence> data,
                                     const TrainConfig& config,
                                     std::span<const EncodedSentence> dev,
                                     const EpochCallback& on_epoch) {
  config.validate();
  if (data.empty()) throw Error("training data is empty");

  auto& params = detector.parameters();
  ad::Optimizer<float> optimizer({config.optimizer, config.learning_rate});
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochLog> log;
  const bool early_stopping = config.patience > 0 && !dev.empty();
  double best_dev = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<ad::Tensor<float>> best_values;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng = Rng::derive(config.seed, epoch);
    rng.shuffle(order);

    double epoch_loss = 0;
    std::size_t epoch_tokens = 0;
    const std::size_t batches = (order.size() + config.batch_size - 1) / config.batch_size;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::size_t tokens = 0;
      for (std::size_t k = begin; k < end; ++k) tokens += data[order[k]].ids.size();
      const std::string where =
          "epoch " + std::to_string(epoch) + " batch " + std::to_string(b + 1);

      params.zero_grad();
      double batch_loss = 0;
      try {
        for (std::size_t k = begin; k < end; ++k) {
          const auto& s = data[order[k]];
          ad::Graph<float> g;
          auto f = detector.forward(g, s.ids);
          ad::Var loss = g.binary_cross_entropy(f.probabilities, s.labels);
          batch_loss += g.value(loss)[0];
          g.backward(g.scale(loss, 1.0f / static_cast<float>(tokens)));
        }
      } catch (const NumericError& e) {
        throw NumericError(where + ": " + e.what());
      }
      if (!std::isfinite(batch_loss)) throw NumericError(where + ": non-finite loss");
      const double norm = ad::clip_by_global_norm(params, config.clip_norm);
      if (!std::isfinite(norm)) throw NumericError(where + ": non-finite gradient");
      optimizer.step(params);
      epoch_loss += batch_loss;
      epoch_tokens += tokens;
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss / static_cast<double>(epoch_tokens);
    if (!dev.empty()) entry.dev_loss = mean_loss(detector, dev);
    log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (early_stopping) {
      if (entry.dev_loss < best_dev) {
        best_dev = entry.dev_loss;
        since_best = 0;
        best_values.clear();
        for (std::size_t i = 0; i < params.size(); ++i) best_values.push_back(params[i].value);
      } else if (++since_best >= config.patience) {
        break;
      }
    }
  }
  if (early_stopping && !best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].value = best_values[i];
  }
  params.zero_grad();
  return log;
}

TrainResult train(std::span<const LabeledSentence> data, const Vocabulary& vocabulary,
                  const ModelConfig& model, const TrainConfig& config,
                  std::span<const LabeledSentence> dev, const EpochCallback& on_epoch) {
  config.validate();
  if (data.empty()) throw Error("training data is empty");
  ModelConfig mc = model;
  if (mc.vocab_size == 0) mc.vocab_size = vocabulary.size();
  if (mc.vocab_size != vocabulary.size()) {
    throw ShapeError("model vocab_size " + std::to_string(mc.vocab_size) +
                     " does not match vocabulary of " + std::to_string(vocabulary.size()));
  }

  Detector<float> detector(mc);
  Rng init(config.seed);
  detector.initialize(init);

  const auto train_data = encode_dataset(data, vocabulary);
  const auto dev_data = encode_dataset(dev, vocabulary);

  TrainResult result;
  result.initial_loss = mean_loss(detector, std::span<const EncodedSentence>(train_data));
  result.epochs = train_detector(detector, train_data, config, dev_data, on_epoch);
  result.final_loss = mean_loss(detector, std::span<const EncodedSentence>(train_data));

  std::size_t kept = result.epochs.size();
  if (config.patience > 0 && !dev_data.empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : result.epochs) {
      if (e.dev_loss < best) {
        best = e.dev_loss;
        kept = e.epoch;
      }
    }
  }
  std::map<std::string, std::string> meta{
      {"seed", std::to_string(config.seed)},
      {"epoch", std::to_string(kept)},
      {"optimizer", config.optimizer == ad::OptimizerKind::kAdam ? "adam" : "sgd"},
      {"learning_rate", format_double(config.learning_rate)},
      {"clip_norm", format_double(config.clip_norm)},
      {"batch_size", std::to_string(config.batch_size)}};
  result.checkpoint = make_checkpoint(detector, vocabulary, std::move(meta));
  return result;
}

}  // namespace ged
