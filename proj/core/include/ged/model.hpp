#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ged/autodiff.hpp"
#include "ged/rng.hpp"
#include "ged/vocabulary.hpp"

namespace ged {

enum class Architecture { kBiLstmAttention, kBiLstmNoAttention, kConv };

std::string_view to_string(Architecture arch);
// "bilstm-attn", "bilstm-noattn" or "conv".
Architecture parse_architecture(std::string_view name);

struct ModelConfig {
  Architecture architecture = Architecture::kBiLstmAttention;
  std::size_t vocab_size = 0;
  std::size_t d_emb = 150;
  std::size_t d_hidden = 150;
  std::size_t conv_window = 3;
  std::size_t conv_d_emb = 50;
  double init_range = 0.05;

  // Throws ged::Error when a dimension is zero or the window is even.
  void validate() const;
  // Embedding width actually used by the architecture.
  std::size_t embedding_dim() const;

  bool operator==(const ModelConfig&) const = default;
};

// Gate order used throughout: input, forget, output, candidate.
inline constexpr std::array<std::string_view, 4> kGateNames = {"input", "forget", "output",
                                                               "cell"};

// One direction of the encoder bound into a graph.
struct LstmVars {
  std::array<ad::Var, 4> wx;  // [d_hidden x d_emb]
  std::array<ad::Var, 4> wh;  // [d_hidden x d_hidden]
  std::array<ad::Var, 4> b;   // [d_hidden]
};

struct LstmState {
  ad::Var h;
  ad::Var c;
};

template <class Real>
LstmState lstm_step(ad::Graph<Real>& g, const LstmVars& p, LstmState state, ad::Var x);

// Tape of shape [n x 2*d_hidden]; row t is [forward h_t ; backward h_t].
// inputs holds one embedding vector per position. Throws on an empty input.
template <class Real>
ad::Var encode_bilstm(ad::Graph<Real>& g, std::span<const ad::Var> inputs, const LstmVars& fwd,
                      const LstmVars& bwd, std::size_t d_hidden);

struct AttentionVars {
  ad::Var energies;  // [n x n]
  ad::Var weights;   // [n x n], rows sum to 1
  ad::Var context;   // [n x 2*d_hidden]
};

template <class Real>
AttentionVars attend(ad::Graph<Real>& g, ad::Var tape);

// p = sigmoid(x^T W a + b) for one position.
template <class Real>
ad::Var score_token(ad::Graph<Real>& g, ad::Var x, ad::Var a, ad::Var w, ad::Var b);

// The same for every row of X [n x d_emb] and A [n x 2*d_hidden] -> [n].
template <class Real>
ad::Var score_tokens(ad::Graph<Real>& g, ad::Var xs, ad::Var contexts, ad::Var w, ad::Var b);

// Nodes of interest from one forward pass. Unused fields stay invalid.
struct ForwardVars {
  ad::Var embeddings;  // [n x d]
  ad::Var tape;
  AttentionVars attention;
  ad::Var probabilities;  // [n], probability that each token is correct
};

template <class Real>
class Detector {
 public:
  // Parameters are allocated and zeroed.
  explicit Detector(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  ad::ParameterSet<Real>& parameters() { return params_; }
  const ad::ParameterSet<Real>& parameters() const { return params_; }

  // Uniform in [-init_range, init_range).
  void initialize(Rng& rng) { params_.initialize_uniform(rng, config_.init_range); }

  // Trainable forward pass; backward() fills the parameter gradients.
  ForwardVars forward(ad::Graph<Real>& g, std::span<const TokenId> ids);
  // Read-only forward pass; safe to call concurrently.
  ForwardVars forward_frozen(ad::Graph<Real>& g, std::span<const TokenId> ids) const;

  std::vector<Real> predict(std::span<const TokenId> ids) const;

 private:
  ModelConfig config_;
  ad::ParameterSet<Real> params_;
};

}  // namespace ged
