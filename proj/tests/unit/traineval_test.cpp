#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ged/checkpoint.hpp"
#include "ged/error.hpp"
#include "ged/evaluate.hpp"
#include "ged/train.hpp"
#include "test_support.hpp"

namespace ged {
namespace {

struct Toy {
  std::vector<LabeledSentence> data;
  Vocabulary vocab;
  ModelConfig model;
  TrainConfig train;
};

Toy toy(std::size_t n = 40) {
  Toy t;
  t.data = testing::agreement_corpus(n, 17);
  std::vector<Sentence> plain;
  for (const auto& s : t.data) plain.push_back(Sentence{s.tokens});
  t.vocab = build_vocabulary(plain, 1);
  t.model.d_emb = 6;
  t.model.d_hidden = 5;
  t.train.epochs = 3;
  t.train.batch_size = 8;
  t.train.learning_rate = 1e-2;
  return t;
}

std::string serialize(const Checkpoint& c) {
  std::ostringstream out;
  save_checkpoint(c, out);
  return out.str();
}

TEST(SentenceLoss, Examples) {
  const double half[] = {0.5, 0.5, 0.5};
  const std::uint8_t mixed[] = {1, 0, 1};
  EXPECT_NEAR(sentence_loss(half, mixed), std::log(2.0), 1e-12);
  const double p[] = {0.9, 0.2};
  const std::uint8_t y[] = {1, 0};
  EXPECT_NEAR(sentence_loss(p, y), 0.1643, 1e-4);
}

TEST(FBeta, Examples) {
  for (double x : {0.0, 12.5, 50.0, 100.0}) EXPECT_NEAR(f_beta(x, x, 0.5), x, 1e-12);
  EXPECT_EQ(f_beta(0, 0, 0.5), 0);
  EXPECT_NEAR(f_beta(50, 25, 1.0), 100.0 / 3, 1e-12);
  // Precision weighs more than recall at beta 0.5.
  EXPECT_GT(f_beta(60, 20, 0.5), f_beta(20, 60, 0.5));
}

TEST(FBeta, MonotoneInPrecisionAndRecall) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double p = rng.uniform(0, 100), r = rng.uniform(0, 100);
    const double dp = rng.uniform(0, 10);
    EXPECT_GE(f_beta(p + dp, r, 0.5), f_beta(p, r, 0.5) - 1e-12);
    EXPECT_GE(f_beta(p, r + dp, 0.5), f_beta(p, r, 0.5) - 1e-12);
    const double f = f_beta(p, r, 0.5);
    EXPECT_LE(f, std::max(p, r) + 1e-12);
    EXPECT_GE(f, std::min(p, r) - 1e-12);
  }
}

TEST(Report, CountsAndZeroFlags) {
  const double probs[] = {0.2, 0.9, 0.4, 0.6, 0.7};
  const std::uint8_t gold[] = {0, 0, 1, 1, 1};
  const auto c = count_predictions<double>(probs, gold, 0.5);
  EXPECT_EQ(c, (Confusion{1, 1, 1, 2}));
  const auto r = make_report(c, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(r.precision, 50);
  EXPECT_DOUBLE_EQ(r.recall, 50);
  EXPECT_DOUBLE_EQ(r.f_beta, 50);

  const auto none = make_report(Confusion{0, 0, 3, 10});
  EXPECT_EQ(none.precision, 0);
  EXPECT_EQ(none.recall, 0);
  EXPECT_EQ(none.f_beta, 0);
  const auto text = format_report_text(none);
  EXPECT_NE(text.find("precision 0.00"), std::string::npos) << text;
  EXPECT_NE(format_report_json(none).find("\"tp\": 0"), std::string::npos);

  const std::vector<double> p = {0.1, 0.5, 0.49};
  EXPECT_EQ(flagged_positions<double>(p, 0.5), (std::vector<std::size_t>{0, 2}));
}

TEST(Train, DeterministicAndLossDecreases) {
  const auto t = toy();
  const auto a = train(t.data, t.vocab, t.model, t.train);
  const auto b = train(t.data, t.vocab, t.model, t.train);
  EXPECT_EQ(serialize(a.checkpoint), serialize(b.checkpoint));
  EXPECT_EQ(a.epochs.size(), 3u);
  EXPECT_LT(a.final_loss, a.initial_loss);
  EXPECT_NEAR(a.initial_loss, std::log(2.0), 0.05);
  EXPECT_EQ(a.checkpoint.metadata.at("seed"), "1");
  EXPECT_EQ(a.checkpoint.model.vocab_size, t.vocab.size());

  auto other = t.train;
  other.seed = 2;
  EXPECT_NE(serialize(train(t.data, t.vocab, t.model, other).checkpoint),
            serialize(a.checkpoint));
}

TEST(Train, InitializationRange) {
  auto t = toy();
  t.model.vocab_size = t.vocab.size();
  Detector<float> det(t.model);
  Rng rng(1);
  det.initialize(rng);
  for (std::size_t k = 0; k < det.parameters().size(); ++k) {
    for (float v : det.parameters()[k].value.data) {
      EXPECT_GE(v, -0.05f);
      EXPECT_LT(v, 0.05f);
    }
  }
}

TEST(Train, EarlyStoppingKeepsBestDevLoss) {
  auto t = toy();
  t.train.epochs = 8;
  t.train.patience = 1;
  t.train.learning_rate = 0.5;  // large enough to overshoot
  const auto dev = testing::agreement_corpus(20, 99);
  const auto r = train(t.data, t.vocab, t.model, t.train, dev);
  ASSERT_FALSE(r.epochs.empty());
  double best = 1e300;
  for (const auto& e : r.epochs) best = std::min(best, e.dev_loss);
  const auto det = load_detector(r.checkpoint);
  const auto enc = encode_dataset(dev, t.vocab);
  EXPECT_NEAR(mean_loss(det, std::span<const EncodedSentence>(enc)), best, 1e-6);
}

TEST(Train, ConfigErrors) {
  auto t = toy();
  t.model.vocab_size = 3;
  EXPECT_THROW(train(t.data, t.vocab, t.model, t.train), ShapeError);
  t = toy();
  t.train.batch_size = 0;
  EXPECT_THROW(train(t.data, t.vocab, t.model, t.train), Error);
}

TEST(Evaluate, CountsCoverEveryToken) {
  const auto t = toy();
  const auto r = train(t.data, t.vocab, t.model, t.train);
  const auto det = load_detector(r.checkpoint);
  const auto enc = encode_dataset(t.data, t.vocab);
  std::size_t tokens = 0, errors = 0;
  for (const auto& s : t.data) {
    tokens += s.size();
    errors += s.error_count();
  }
  for (double th : {0.0, 0.3, 0.5, 0.9, 1.01}) {
    const auto rep = evaluate(det, std::span<const EncodedSentence>(enc), th);
    const auto& c = rep.counts;
    EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, tokens);
    EXPECT_EQ(c.tp + c.fn, errors);
    EXPECT_EQ(rep.sentences, t.data.size());
  }
  EXPECT_EQ(evaluate(det, std::span<const EncodedSentence>(enc), 0.0).counts.tp, 0u);
  EXPECT_EQ(evaluate(det, std::span<const EncodedSentence>(enc), 1.01).counts.fn, 0u);
}

TEST(CheckpointTest, RoundTripPreservesPredictions) {
  const auto t = toy();
  const auto r = train(t.data, t.vocab, t.model, t.train);
  std::stringstream buf;
  save_checkpoint(r.checkpoint, buf);
  const auto loaded = load_checkpoint(buf);
  EXPECT_EQ(loaded, r.checkpoint);
  const auto a = load_detector(r.checkpoint), b = load_detector(loaded);
  for (const auto& s : encode_dataset(t.data, t.vocab)) EXPECT_EQ(a.predict(s.ids), b.predict(s.ids));
}

TEST(CheckpointTest, CorruptFilesAreRejected) {
  const auto t = toy(5);
  auto cfg = t.model;
  cfg.vocab_size = t.vocab.size();
  Detector<float> det(cfg);
  const std::string text = serialize(make_checkpoint(det, t.vocab));
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, text.size() / 3, text.size() / 2,
                          text.size() - 5}) {
    std::istringstream in(text.substr(0, cut));
    EXPECT_THROW(load_checkpoint(in), FormatError) << cut;
  }
  std::string versioned = text;
  versioned.replace(versioned.find("version 1"), 9, "version 2");
  std::istringstream in(versioned);
  try {
    load_checkpoint(in);
    ADD_FAILURE() << "version mismatch accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.position(), 2u);
  }
}

TEST(CheckpointTest, ShapeMismatch) {
  const auto vocab = Vocabulary::from_tokens(
      {"<pad>", "<unk>", "<num>", "a", "b", "c", "d", "e", "f", "g"});
  ModelConfig small;
  small.vocab_size = 10;
  small.d_hidden = 100;
  const Detector<float> trained(small);
  const auto ckpt = make_checkpoint(trained, vocab);
  ModelConfig big = small;
  big.d_hidden = 150;
  Detector<float> target(big);
  EXPECT_THROW(restore_parameters(target, ckpt), ShapeError);
  EXPECT_THROW(make_checkpoint(trained, vocab, {{"d_emb", "3"}}), Error);
}

}  // namespace
}  // namespace ged
