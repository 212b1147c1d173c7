#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ged/autodiff.hpp"
#include "ged/checkpoint.hpp"
#include "ged/corpus.hpp"
#include "ged/model.hpp"
#include "ged/vocabulary.hpp"

namespace ged {

struct EncodedSentence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> labels;
};

std::vector<EncodedSentence> encode_dataset(std::span<const LabeledSentence> data,
                                            const Vocabulary& vocabulary);

struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  std::size_t batch_size = 32;
  // Stop after this many epochs without dev-loss improvement and keep the
  // best parameters. 0 disables; ignored without a dev set.
  std::size_t patience = 0;

  void validate() const;
};

// Mean binary cross-entropy over tokens; label 1 is the target of p.
double sentence_loss(std::span<const double> probs, std::span<const std::uint8_t> labels);

// Token-weighted mean loss of a model over a dataset.
template <class Real>
double mean_loss(const Detector<Real>& detector, std::span<const EncodedSentence> data);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;  // token-weighted mean of batch losses seen during the epoch
  double dev_loss = -1;   // negative when there is no dev set
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> epochs;
  double initial_loss = 0;  // mean loss over the training data before the first update
  double final_loss = 0;    // mean loss over the training data with the returned parameters
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Initializes from config.seed, then for each epoch shuffles the data and,
// per batch, accumulates gradients of the batch mean loss, clips them by
// global norm and applies one optimizer step. Throws NumericError naming
// the epoch and batch on a non-finite loss.
TrainResult train(std::span<const LabeledSentence> data, const Vocabulary& vocabulary,
                  const ModelConfig& model, const TrainConfig& config,
                  std::span<const LabeledSentence> dev = {}, const EpochCallback& on_epoch = {});

// Same loop on an existing detector with already-encoded data.
std::vector<EpochLog> train_detector(Detector<float>& detector,
                                     std::span<const EncodedSentence> data,
                                     const TrainConfig& config,
                                     std::span<const EncodedSentence> dev = {},
                                     const EpochCallback& on_epoch = {});

}  // namespace ged
