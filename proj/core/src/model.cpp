#include "ged/model.hpp"

#include <type_traits>

#include "ged/error.hpp"

namespace ged {

using ad::Graph;
using ad::Shape;
using ad::Tensor;
using ad::Var;

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::kBiLstmAttention: return "bilstm-attn";
    case Architecture::kBiLstmNoAttention: return "bilstm-noattn";
    case Architecture::kConv: return "conv";
  }
  return "?";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "bilstm-attn") return Architecture::kBiLstmAttention;
  if (name == "bilstm-noattn") return Architecture::kBiLstmNoAttention;
  if (name == "conv") return Architecture::kConv;
  throw Error("unknown model architecture '" + std::string(name) +
              "' (expected bilstm-attn, bilstm-noattn or conv)");
}

void ModelConfig::validate() const {
  if (vocab_size == 0) throw Error("model config: vocab_size must be at least 1");
  if (d_emb == 0 || d_hidden == 0 || conv_d_emb == 0 || conv_window == 0) {
    throw Error("model config: dimensions must be at least 1");
  }
  if (conv_window % 2 == 0) {
    throw Error("model config: conv_window must be odd, got " + std::to_string(conv_window));
  }
  if (!(init_range > 0)) throw Error("model config: init_range must be positive");
}

std::size_t ModelConfig::embedding_dim() const {
  return architecture == Architecture::kConv ? conv_d_emb : d_emb;
}

template <class Real>
LstmState lstm_step(Graph<Real>& g, const LstmVars& p, LstmState state, Var x) {
  std::array<Var, 4> gates;
  for (std::size_t k = 0; k < 4; ++k) {
    Var z = g.add(g.add(g.matvec(p.wx[k], x), g.matvec(p.wh[k], state.h)), p.b[k]);
    gates[k] = k == 3 ? g.tanh(z) : g.sigmoid(z);
  }
  Var c = g.add(g.mul(gates[1], state.c), g.mul(gates[0], gates[3]));
  Var h = g.mul(gates[2], g.tanh(c));
  return {h, c};
}

template <class Real>
Var encode_bilstm(Graph<Real>& g, std::span<const Var> inputs, const LstmVars& fwd,
                  const LstmVars& bwd, std::size_t d_hidden) {
  const std::size_t n = inputs.size();
  if (n == 0) throw Error("encode_bilstm: empty sequence");
  Var zero = g.constant(Tensor<Real>(Shape{d_hidden}));

  std::vector<Var> forward_h(n), backward_h(n);
  LstmState s{zero, zero};
  for (std::size_t t = 0; t < n; ++t) {
    s = lstm_step(g, fwd, s, inputs[t]);
    forward_h[t] = s.h;
  }
  s = {zero, zero};
  for (std::size_t t = n; t-- > 0;) {
    s = lstm_step(g, bwd, s, inputs[t]);
    backward_h[t] = s.h;
  }

  std::vector<Var> rows(n);
  for (std::size_t t = 0; t < n; ++t) rows[t] = g.concat({forward_h[t], backward_h[t]});
  return g.stack(rows);
}

template <class Real>
AttentionVars attend(Graph<Real>& g, Var tape) {
  AttentionVars out;
  out.energies = g.matmul(tape, g.transpose(tape));
  out.weights = g.softmax(out.energies);
  out.context = g.matmul(out.weights, tape);
  return out;
}

template <class Real>
Var score_token(Graph<Real>& g, Var x, Var a, Var w, Var b) {
  return g.sigmoid(g.add(g.dot(x, g.matvec(w, a)), b));
}

template <class Real>
Var score_tokens(Graph<Real>& g, Var xs, Var contexts, Var w, Var b) {
  Var bilinear = g.sum_rows(g.mul(g.matmul(xs, w), contexts));
  return g.sigmoid(g.add(bilinear, b));
}

namespace {

std::string lstm_name(std::string_view direction, std::size_t gate, std::string_view part) {
  return std::string(direction) + "." + std::string(kGateNames[gate]) + "." + std::string(part);
}

struct Bound {
  Var embedding;
  LstmVars fwd, bwd;
  Var classifier_w, classifier_b;
  Var pad, kernel, bias;
};

// Binds every parameter into g: trainable for a mutable set, frozen otherwise.
template <class Real, class Params>
Bound bind(Graph<Real>& g, Params& params, const ModelConfig& config) {
  auto take = [&](std::string_view name) {
    if constexpr (std::is_const_v<Params>) {
      return g.frozen(params.get(name));
    } else {
      return g.param(params.get(name));
    }
  };
  Bound b;
  b.embedding = take("embedding");
  if (config.architecture == Architecture::kConv) {
    b.pad = take("conv.pad");
    b.kernel = take("conv.kernel");
    b.bias = take("conv.bias");
    return b;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    b.fwd.wx[k] = take(lstm_name("fwd", k, "wx"));
    b.fwd.wh[k] = take(lstm_name("fwd", k, "wh"));
    b.fwd.b[k] = take(lstm_name("fwd", k, "b"));
    b.bwd.wx[k] = take(lstm_name("bwd", k, "wx"));
    b.bwd.wh[k] = take(lstm_name("bwd", k, "wh"));
    b.bwd.b[k] = take(lstm_name("bwd", k, "b"));
  }
  b.classifier_w = take("classifier.w");
  b.classifier_b = take("classifier.b");
  return b;
}

template <class Real>
ForwardVars run(Graph<Real>& g, const Bound& b, const ModelConfig& config,
                std::span<const TokenId> ids) {
  if (ids.empty()) throw Error("cannot run the model on an empty sentence");
  const std::size_t n = ids.size();
  std::vector<Var> xs(n);
  for (std::size_t t = 0; t < n; ++t) xs[t] = g.embedding_lookup(b.embedding, ids[t]);

  ForwardVars out;
  out.embeddings = g.stack(xs);

  if (config.architecture == Architecture::kConv) {
    const std::size_t half = config.conv_window / 2;
    std::vector<Var> windows(n);
    std::vector<Var> parts(config.conv_window);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < config.conv_window; ++k) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i + k) - static_cast<std::ptrdiff_t>(half);
        parts[k] = (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? b.pad : xs[static_cast<std::size_t>(j)];
      }
      windows[i] = g.concat(parts);
    }
    Var kernel = g.reshape(b.kernel, Shape{config.conv_window * config.conv_d_emb});
    Var scores = g.add(g.matvec(g.stack(windows), kernel), b.bias);
    out.probabilities = g.sigmoid(scores);
    return out;
  }

  out.tape = encode_bilstm(g, xs, b.fwd, b.bwd, config.d_hidden);
  Var context = out.tape;
  if (config.architecture == Architecture::kBiLstmAttention) {
    out.attention = attend(g, out.tape);
    context = out.attention.context;
  }
  out.probabilities = score_tokens(g, out.embeddings, context, b.classifier_w, b.classifier_b);
  return out;
}

}  // namespace

template <class Real>
Detector<Real>::Detector(ModelConfig config) : config_(config) {
  config_.validate();
  const std::size_t v = config_.vocab_size;
  if (config_.architecture == Architecture::kConv) {
    const std::size_t d = config_.conv_d_emb;
    params_.add("embedding", Shape{v, d});
    params_.add("conv.pad", Shape{d});
    params_.add("conv.kernel", Shape{config_.conv_window, d});
    params_.add("conv.bias", Shape{1});
    return;
  }
  const std::size_t de = config_.d_emb, dh = config_.d_hidden;
  params_.add("embedding", Shape{v, de});
  for (std::string_view dir : {"fwd", "bwd"}) {
    for (std::size_t k = 0; k < 4; ++k) {
      params_.add(lstm_name(dir, k, "wx"), Shape{dh, de});
      params_.add(lstm_name(dir, k, "wh"), Shape{dh, dh});
      params_.add(lstm_name(dir, k, "b"), Shape{dh});
    }
  }
  params_.add("classifier.w", Shape{de, 2 * dh});
  params_.add("classifier.b", Shape{1});
}

template <class Real>
ForwardVars Detector<Real>::forward(Graph<Real>& g, std::span<const TokenId> ids) {
  return run(g, bind(g, params_, config_), config_, ids);
}

template <class Real>
ForwardVars Detector<Real>::forward_frozen(Graph<Real>& g, std::span<const TokenId> ids) const {
  return run(g, bind(g, params_, config_), config_, ids);
}

template <class Real>
std::vector<Real> Detector<Real>::predict(std::span<const TokenId> ids) const {
  Graph<Real> g;
  ForwardVars f = forward_frozen(g, ids);
  return g.value(f.probabilities).data;
}

#define GED_INSTANTIATE(Real)                                                                  \
  template LstmState lstm_step<Real>(Graph<Real>&, const LstmVars&, LstmState, Var);          \
  template Var encode_bilstm<Real>(Graph<Real>&, std::span<const Var>, const LstmVars&,        \
                                   const LstmVars&, std::size_t);                              \
  template AttentionVars attend<Real>(Graph<Real>&, Var);                                      \
  template Var score_token<Real>(Graph<Real>&, Var, Var, Var, Var);                            \
  template Var score_tokens<Real>(Graph<Real>&, Var, Var, Var, Var);                           \
  template class Detector<Real>;

GED_INSTANTIATE(float)
GED_INSTANTIATE(double)
#undef GED_INSTANTIATE

}  // namespace ged
