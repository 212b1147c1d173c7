#include <gtest/gtest.h>

#include <cmath>

#include "ged/error.hpp"
#include "ged/model.hpp"

namespace ged {
namespace {

using ad::Graph;
using ad::Shape;
using ad::Tensor;
using ad::Var;
using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

double sig(double z) { return 1 / (1 + std::exp(-z)); }

Mat as_matrix(const Tensor<double>& t) {
  Mat m(t.rows(), Vec(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t.at(r, c);
  }
  return m;
}

Vec matvec(const Mat& m, const Vec& v) {
  Vec out(m.size(), 0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
  }
  return out;
}

// Plain loops over the same parameters, independent of the graph code.
Vec reference_forward(const Detector<double>& det, const std::vector<TokenId>& ids) {
  const auto& ps = det.parameters();
  const auto& cfg = det.config();
  const std::size_t n = ids.size(), dh = cfg.d_hidden;
  const Mat emb = as_matrix(ps.get("embedding").value);
  Mat x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = emb[static_cast<std::size_t>(ids[t])];

  auto run = [&](const std::string& dir, bool reverse) {
    Mat hs(n);
    Vec h(dh, 0), c(dh, 0);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t t = reverse ? n - 1 - s : s;
      std::array<Vec, 4> gate;
      for (std::size_t k = 0; k < 4; ++k) {
        const std::string base = dir + "." + std::string(kGateNames[k]) + ".";
        const Vec zx = matvec(as_matrix(ps.get(base + "wx").value), x[t]);
        const Vec zh = matvec(as_matrix(ps.get(base + "wh").value), h);
        const auto& b = ps.get(base + "b").value;
        gate[k].resize(dh);
        for (std::size_t i = 0; i < dh; ++i) {
          const double z = zx[i] + zh[i] + b[i];
          gate[k][i] = k == 3 ? std::tanh(z) : sig(z);
        }
      }
      for (std::size_t i = 0; i < dh; ++i) {
        c[i] = gate[1][i] * c[i] + gate[0][i] * gate[3][i];
        h[i] = gate[2][i] * std::tanh(c[i]);
      }
      hs[t] = h;
    }
    return hs;
  };
  const Mat f = run("fwd", false), b = run("bwd", true);
  Mat tape(n);
  for (std::size_t t = 0; t < n; ++t) {
    tape[t] = f[t];
    tape[t].insert(tape[t].end(), b[t].begin(), b[t].end());
  }

  Mat ctx = tape;
  if (cfg.architecture == Architecture::kBiLstmAttention) {
    for (std::size_t t = 0; t < n; ++t) {
      Vec e(n);
      double mx = -1e300;
      for (std::size_t j = 0; j < n; ++j) {
        e[j] = 0;
        for (std::size_t i = 0; i < 2 * dh; ++i) e[j] += tape[t][i] * tape[j][i];
        mx = std::max(mx, e[j]);
      }
      double z = 0;
      for (auto& v : e) z += (v = std::exp(v - mx));
      ctx[t].assign(2 * dh, 0);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < 2 * dh; ++i) ctx[t][i] += e[j] / z * tape[j][i];
      }
    }
  }
  const Mat w = as_matrix(ps.get("classifier.w").value);
  const double bias = ps.get("classifier.b").value[0];
  Vec p(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Vec wa = matvec(w, ctx[t]);
    double s = bias;
    for (std::size_t i = 0; i < wa.size(); ++i) s += x[t][i] * wa[i];
    p[t] = sig(s);
  }
  return p;
}

Detector<double> small_detector(Architecture arch, std::uint64_t seed = 4, double range = 0.5) {
  ModelConfig cfg;
  cfg.architecture = arch;
  cfg.vocab_size = 12;
  cfg.d_emb = 3;
  cfg.d_hidden = 2;
  cfg.conv_d_emb = 3;
  cfg.init_range = range;
  Detector<double> det(cfg);
  Rng rng(seed);
  det.initialize(rng);
  return det;
}

Var bind(Graph<double>& g, const Tensor<double>& t) { return g.constant(t); }

TEST(LstmStep, ZeroWeightsHalveTheCell) {
  Graph<double> g;
  LstmVars p;
  for (std::size_t k = 0; k < 4; ++k) {
    p.wx[k] = g.constant(Tensor<double>(Shape{2, 3}));
    p.wh[k] = g.constant(Tensor<double>(Shape{2, 2}));
    p.b[k] = g.constant(Tensor<double>(Shape{2}));
  }
  const LstmState s{g.constant(Tensor<double>::vector({0.3, -0.7})),
                    g.constant(Tensor<double>::vector({1.2, -2.0}))};
  const auto next = lstm_step(g, p, s, g.constant(Tensor<double>::vector({1, 2, 3})));
  const auto& c = g.value(next.c);
  const auto& h = g.value(next.h);
  EXPECT_DOUBLE_EQ(c[0], 0.6);
  EXPECT_DOUBLE_EQ(c[1], -1.0);
  EXPECT_DOUBLE_EQ(h[0], 0.5 * std::tanh(0.6));
  EXPECT_DOUBLE_EQ(h[1], 0.5 * std::tanh(-1.0));
}

TEST(LstmStep, HandComputedSingleUnit) {
  // One hidden unit, one input: gates i, f, o, g with scalar weights.
  Graph<double> g;
  LstmVars p;
  const double wx[] = {0.5, -0.3, 0.8, 0.2};
  const double wh[] = {0.1, 0.4, -0.6, 0.9};
  const double b[] = {0.0, 1.0, 0.2, -0.1};
  for (std::size_t k = 0; k < 4; ++k) {
    p.wx[k] = g.constant(Tensor<double>::matrix(1, 1, {wx[k]}));
    p.wh[k] = g.constant(Tensor<double>::matrix(1, 1, {wh[k]}));
    p.b[k] = g.constant(Tensor<double>::vector({b[k]}));
  }
  const double x = 2.0, h0 = 0.25, c0 = -0.5;
  const auto next = lstm_step(g, p, {g.constant(Tensor<double>::vector({h0})),
                                     g.constant(Tensor<double>::vector({c0}))},
                              g.constant(Tensor<double>::vector({x})));
  const double i = sig(0.5 * x + 0.1 * h0), f = sig(-0.3 * x + 0.4 * h0 + 1.0);
  const double o = sig(0.8 * x - 0.6 * h0 + 0.2), cand = std::tanh(0.2 * x + 0.9 * h0 - 0.1);
  const double c = f * c0 + i * cand;
  EXPECT_NEAR(g.value(next.c)[0], c, 1e-15);
  EXPECT_NEAR(g.value(next.h)[0], o * std::tanh(c), 1e-15);
}

TEST(BiLstm, MatchesReferenceImplementation) {
  for (auto arch : {Architecture::kBiLstmAttention, Architecture::kBiLstmNoAttention}) {
    const auto det = small_detector(arch);
    const std::vector<TokenId> ids = {3, 7, 4, 11, 7, 0};
    const auto got = det.predict(ids);
    const auto want = reference_forward(det, ids);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t t = 0; t < got.size(); ++t) EXPECT_NEAR(got[t], want[t], 1e-12) << t;
  }
}

TEST(BiLstm, SingleTokenTape) {
  auto det = small_detector(Architecture::kBiLstmAttention);
  Graph<double> g;
  const std::vector<TokenId> ids = {5};
  const auto f = det.forward(g, ids);
  EXPECT_EQ(g.value(f.tape).shape, (Shape{1, 4}));
  EXPECT_EQ(g.value(f.attention.weights), Tensor<double>::matrix(1, 1, {1.0}));
  EXPECT_EQ(g.value(f.attention.context), g.value(f.tape));
}

TEST(BiLstm, ReversalSymmetry) {
  // Swapping the direction parameters and reversing the input swaps the
  // halves of each tape row and reverses row order.
  const auto det = small_detector(Architecture::kBiLstmNoAttention);
  auto swapped = small_detector(Architecture::kBiLstmNoAttention);
  auto& ps = swapped.parameters();
  for (std::size_t k = 0; k < 4; ++k) {
    for (const char* part : {"wx", "wh", "b"}) {
      const std::string tail = "." + std::string(kGateNames[k]) + "." + part;
      std::swap(ps.get("fwd" + tail).value, ps.get("bwd" + tail).value);
    }
  }
  const std::vector<TokenId> ids = {3, 9, 1, 4};
  const std::vector<TokenId> rev(ids.rbegin(), ids.rend());
  Graph<double> g1, g2;
  const auto& a = g1.value(det.forward_frozen(g1, ids).tape);
  const auto& b = g2.value(swapped.forward_frozen(g2, rev).tape);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_DOUBLE_EQ(a.at(t, i), b.at(3 - t, i + 2));
      EXPECT_DOUBLE_EQ(a.at(t, i + 2), b.at(3 - t, i));
    }
  }
}

TEST(Attention, Properties) {
  Graph<double> g;
  Rng rng(11);
  Tensor<double> h(Shape{5, 4});
  for (auto& v : h.data) v = rng.uniform(-2, 2);
  const auto att = attend(g, g.constant(h));
  const auto& e = g.value(att.energies);
  const auto& a = g.value(att.weights);
  const auto& ctx = g.value(att.context);
  for (std::size_t t = 0; t < 5; ++t) {
    double row = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_DOUBLE_EQ(e.at(t, j), e.at(j, t));
      EXPECT_GT(a.at(t, j), 0);
      row += a.at(t, j);
    }
    EXPECT_NEAR(row, 1.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      double want = 0;
      for (std::size_t j = 0; j < 5; ++j) want += a.at(t, j) * h.at(j, i);
      EXPECT_NEAR(ctx.at(t, i), want, 1e-12);
    }
  }
}

TEST(Attention, IdenticalRowsGiveUniformWeights) {
  Graph<double> g;
  const auto att = attend(g, g.constant(Tensor<double>::matrix(3, 2, {1, 2, 1, 2, 1, 2})));
  for (double w : g.value(att.weights).data) EXPECT_NEAR(w, 1.0 / 3, 1e-15);
}

TEST(Score, Examples) {
  Graph<double> g;
  const Var x = bind(g, Tensor<double>::vector({1, -2, 3}));
  const Var a = bind(g, Tensor<double>::vector({0.5, 4}));
  const Var zero_w = bind(g, Tensor<double>(Shape{3, 2}));
  EXPECT_DOUBLE_EQ(g.value(score_token(g, x, a, zero_w, bind(g, Tensor<double>::scalar(0))))[0],
                   0.5);
  EXPECT_GT(g.value(score_token(g, x, a, zero_w, bind(g, Tensor<double>::scalar(20))))[0],
            0.999999);
  const Var w = bind(g, Tensor<double>::matrix(3, 2, {1, 0, 0, 1, 2, -1}));
  // x^T W a = [1,-2,3] . [0.5, 4, -3] = 0.5 - 8 - 9
  EXPECT_NEAR(g.value(score_token(g, x, a, w, bind(g, Tensor<double>::scalar(0.1))))[0],
              sig(-16.5 + 0.1), 1e-15);
  const Var xs = g.stack(std::vector<Var>{x, x});
  const Var as = g.stack(std::vector<Var>{a, a});
  const auto& both = g.value(score_tokens(g, xs, as, w, bind(g, Tensor<double>::scalar(0.1))));
  EXPECT_NEAR(both[1], sig(-16.4), 1e-15);
}

TEST(Conv, ZeroKernelGivesHalf) {
  auto det = small_detector(Architecture::kConv);
  det.parameters().get("conv.kernel").value.fill(0);
  det.parameters().get("conv.bias").value.fill(0);
  for (double p : det.predict(std::vector<TokenId>{1, 2, 3})) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(Conv, MatchesWindowDotProduct) {
  const auto det = small_detector(Architecture::kConv);
  const auto& ps = det.parameters();
  const std::vector<TokenId> ids = {4, 8, 2, 10};
  const auto got = det.predict(ids);
  const auto& emb = ps.get("embedding").value;
  const auto& pad = ps.get("conv.pad").value;
  const auto& kernel = ps.get("conv.kernel").value;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double s = ps.get("conv.bias").value[0];
    for (std::size_t k = 0; k < 3; ++k) {
      const long j = static_cast<long>(i + k) - 1;
      for (std::size_t d = 0; d < 3; ++d) {
        const double x = (j < 0 || j >= 4) ? pad[d] : emb.at(static_cast<std::size_t>(ids[j]), d);
        s += kernel.at(k, d) * x;
      }
    }
    EXPECT_NEAR(got[i], sig(s), 1e-14) << i;
  }
}

TEST(Conv, OutputsOutsideTheWindowAreUnchanged) {
  const auto det = small_detector(Architecture::kConv);
  const std::vector<TokenId> a = {4, 8, 2, 10, 5, 6, 7};
  auto b = a;
  b[3] = 11;
  const auto pa = det.predict(a), pb = det.predict(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i >= 2 && i <= 4) continue;
    EXPECT_EQ(pa[i], pb[i]) << i;
  }
}

TEST(DetectorTest, PredictLengthAndRange) {
  for (auto arch :
       {Architecture::kBiLstmAttention, Architecture::kBiLstmNoAttention, Architecture::kConv}) {
    const auto det = small_detector(arch, 1, 0.05);
    for (std::size_t n : {1u, 2u, 9u}) {
      std::vector<TokenId> ids(n, 3);
      const auto p = det.predict(ids);
      ASSERT_EQ(p.size(), n);
      for (double v : p) {
        EXPECT_GT(v, 0);
        EXPECT_LT(v, 1);
      }
    }
    EXPECT_THROW(det.predict(std::vector<TokenId>{}), Error);
    EXPECT_THROW(det.predict(std::vector<TokenId>{12}), Error);
  }
}

TEST(DetectorTest, ZeroClassifierGivesHalf) {
  auto det = small_detector(Architecture::kBiLstmAttention);
  det.parameters().get("classifier.w").value.fill(0);
  det.parameters().get("classifier.b").value.fill(0);
  for (double p : det.predict(std::vector<TokenId>{1, 5, 9})) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(DetectorTest, ParameterShapes) {
  ModelConfig cfg;
  cfg.vocab_size = 100;
  const Detector<float> det(cfg);
  EXPECT_EQ(det.parameters().get("embedding").value.shape, (Shape{100, 150}));
  EXPECT_EQ(det.parameters().get("fwd.forget.wh").value.shape, (Shape{150, 150}));
  EXPECT_EQ(det.parameters().get("classifier.w").value.shape, (Shape{150, 300}));
  EXPECT_EQ(det.parameters().size(), 1u + 24u + 2u);
  cfg.architecture = Architecture::kConv;
  const Detector<float> conv(cfg);
  EXPECT_EQ(conv.parameters().get("conv.kernel").value.shape, (Shape{3, 50}));
}

TEST(ModelConfigTest, Validation) {
  ModelConfig cfg;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.vocab_size = 5;
  EXPECT_NO_THROW(cfg.validate());
  cfg.conv_window = 4;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(parse_architecture("conv"), Architecture::kConv);
  EXPECT_EQ(to_string(Architecture::kBiLstmNoAttention), "bilstm-noattn");
  EXPECT_THROW(parse_architecture("lstm"), Error);
}

}  // namespace
}  // namespace ged
