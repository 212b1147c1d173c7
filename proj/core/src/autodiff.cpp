#include "ged/autodiff.hpp"

#include <cmath>
#include <numeric>

#include "ged/error.hpp"

namespace ged::ad {

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

template <class Real>
Tensor<Real>::Tensor(Shape s, Real fill) : shape(std::move(s)), data(shape_size(shape), fill) {}

template <class Real>
Tensor<Real>::Tensor(Shape s, std::vector<Real> values)
    : shape(std::move(s)), data(std::move(values)) {
  if (data.size() != shape_size(shape)) {
    throw ShapeError("tensor of shape " + shape_string(shape) + " given " +
                     std::to_string(data.size()) + " values");
  }
}

// --- ParameterSet ---------------------------------------------------------

template <class Real>
Parameter<Real>& ParameterSet<Real>::add(std::string name, Shape shape) {
  if (find(name)) throw Error("duplicate parameter '" + name + "'");
  auto p = std::make_unique<Parameter<Real>>();
  p->name = std::move(name);
  p->value = Tensor<Real>(shape);
  p->grad = Tensor<Real>(std::move(shape));
  params_.push_back(std::move(p));
  return *params_.back();
}

template <class Real>
Parameter<Real>* ParameterSet<Real>::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <class Real>
const Parameter<Real>* ParameterSet<Real>::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <class Real>
Parameter<Real>& ParameterSet<Real>::get(std::string_view name) {
  if (auto* p = find(name)) return *p;
  throw Error("no parameter named '" + std::string(name) + "'");
}

template <class Real>
const Parameter<Real>& ParameterSet<Real>::get(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw Error("no parameter named '" + std::string(name) + "'");
}

template <class Real>
std::size_t ParameterSet<Real>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <class Real>
void ParameterSet<Real>::zero_grad() {
  for (auto& p : params_) p->grad.fill(Real(0));
}

template <class Real>
void ParameterSet<Real>::initialize_uniform(Rng& rng, double range) {
  for (auto& p : params_) {
    for (auto& v : p->value.data) v = static_cast<Real>(rng.uniform(-range, range));
  }
}

// --- Graph ----------------------------------------------------------------

template <class Real>
struct Graph<Real>::Node {
  Tensor<Real> value;
  Tensor<Real> grad;
  Parameter<Real>* trainable = nullptr;
  const Parameter<Real>* view = nullptr;
  bool requires_grad = false;
  BackwardFn backward;
};

namespace {

enum class Broadcast { kSame, kScalar, kRow };

template <class Real>
Broadcast classify_broadcast(const Tensor<Real>& a, const Tensor<Real>& b, const char* op) {
  if (a.shape == b.shape) return Broadcast::kSame;
  if (b.size() == 1) return Broadcast::kScalar;
  if (a.rank() == 2 && b.rank() == 1 && b.shape[0] == a.shape[1]) return Broadcast::kRow;
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a.shape) +
                   " and " + shape_string(b.shape));
}

template <class Real>
std::size_t broadcast_index(Broadcast mode, std::size_t i, std::size_t cols) {
  switch (mode) {
    case Broadcast::kSame: return i;
    case Broadcast::kScalar: return 0;
    case Broadcast::kRow: return i % cols;
  }
  return i;
}

template <class Real>
Real stable_sigmoid(Real x) {
  if (x >= 0) {
    const Real e = std::exp(-x);
    return Real(1) / (Real(1) + e);
  }
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ShapeError(message);
}

}  // namespace

template <class Real>
Graph<Real>::Graph() = default;

template <class Real>
Graph<Real>::~Graph() = default;

template <class Real>
std::size_t Graph<Real>::size() const {
  return nodes_.size();
}

template <class Real>
const typename Graph<Real>::Node& Graph<Real>::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw Error("variable " + std::to_string(v.id) + " does not belong to this graph");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <class Real>
const Tensor<Real>& Graph<Real>::value(Var v) const {
  const Node& n = node(v);
  return n.view ? n.view->value : n.value;
}

template <class Real>
const Tensor<Real>& Graph<Real>::grad(Var v) const {
  const Node& n = node(v);
  return n.trainable ? n.trainable->grad : n.grad;
}

template <class Real>
bool Graph<Real>::requires_grad(std::int32_t id) const {
  return nodes_[static_cast<std::size_t>(id)].requires_grad;
}

template <class Real>
Tensor<Real>& Graph<Real>::grad_ref(std::int32_t id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.trainable) return n.trainable->grad;
  if (n.grad.empty()) n.grad = Tensor<Real>(n.value.shape);
  return n.grad;
}

template <class Real>
const Tensor<Real>& Graph<Real>::grad_of(std::int32_t id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  return n.trainable ? n.trainable->grad : n.grad;
}

template <class Real>
Var Graph<Real>::push_many(Tensor<Real> value, std::span<const Var> inputs, BackwardFn fn,
                           const char* op) {
  for (Real x : value.data) {
    if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite result");
  }
  Node n;
  n.value = std::move(value);
  for (Var in : inputs) n.requires_grad = n.requires_grad || node(in).requires_grad;
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
Var Graph<Real>::push(Tensor<Real> value, std::initializer_list<Var> inputs, BackwardFn fn,
                      const char* op) {
  return push_many(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                   std::move(fn), op);
}

template <class Real>
Var Graph<Real>::constant(Tensor<Real> value) {
  return push(std::move(value), {}, nullptr, "constant");
}

template <class Real>
Var Graph<Real>::param(Parameter<Real>& p) {
  if (p.grad.shape != p.value.shape) p.grad = Tensor<Real>(p.value.shape);
  Node n;
  n.trainable = &p;
  n.view = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
Var Graph<Real>::frozen(const Parameter<Real>& p) {
  Node n;
  n.view = &p;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
Var Graph<Real>::matmul(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  require(A.rank() == 2 && B.rank() == 2 && A.shape[1] == B.shape[0],
          "matmul: incompatible shapes " + shape_string(A.shape) + " and " +
              shape_string(B.shape));
  const std::size_t m = A.shape[0], k = A.shape[1], n = B.shape[1];
  Tensor<Real> C(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    Real* crow = &C.data[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const Real aip = A.data[i * k + p];
      const Real* brow = &B.data[p * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return push(std::move(C), {a, b},
              [a, b, m, k, n](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& A = g.value(a);
                const auto& B = g.value(b);
                if (g.requires_grad(a.id)) {
                  auto& GA = g.grad_ref(a.id);
                  for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t p = 0; p < k; ++p) {
                      Real acc = 0;
                      for (std::size_t j = 0; j < n; ++j) acc += G.data[i * n + j] * B.data[p * n + j];
                      GA.data[i * k + p] += acc;
                    }
                  }
                }
                if (g.requires_grad(b.id)) {
                  auto& GB = g.grad_ref(b.id);
                  for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t p = 0; p < k; ++p) {
                      const Real aip = A.data[i * k + p];
                      for (std::size_t j = 0; j < n; ++j) GB.data[p * n + j] += aip * G.data[i * n + j];
                    }
                  }
                }
              },
              "matmul");
}

template <class Real>
Var Graph<Real>::matvec(Var mv, Var vv) {
  const auto& M = value(mv);
  const auto& v = value(vv);
  require(M.rank() == 2 && v.rank() == 1 && M.shape[1] == v.shape[0],
          "matvec: incompatible shapes " + shape_string(M.shape) + " and " +
              shape_string(v.shape));
  const std::size_t m = M.shape[0], k = M.shape[1];
  Tensor<Real> y(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    Real acc = 0;
    const Real* row = &M.data[i * k];
    for (std::size_t p = 0; p < k; ++p) acc += row[p] * v.data[p];
    y.data[i] = acc;
  }
  return push(std::move(y), {mv, vv},
              [mv, vv, m, k](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& M = g.value(mv);
                const auto& v = g.value(vv);
                if (g.requires_grad(mv.id)) {
                  auto& GM = g.grad_ref(mv.id);
                  for (std::size_t i = 0; i < m; ++i) {
                    const Real gi = G.data[i];
                    Real* row = &GM.data[i * k];
                    for (std::size_t p = 0; p < k; ++p) row[p] += gi * v.data[p];
                  }
                }
                if (g.requires_grad(vv.id)) {
                  auto& Gv = g.grad_ref(vv.id);
                  for (std::size_t i = 0; i < m; ++i) {
                    const Real gi = G.data[i];
                    const Real* row = &M.data[i * k];
                    for (std::size_t p = 0; p < k; ++p) Gv.data[p] += row[p] * gi;
                  }
                }
              },
              "matvec");
}

template <class Real>
Var Graph<Real>::transpose(Var a) {
  const auto& A = value(a);
  require(A.rank() == 2, "transpose: expected a matrix, got " + shape_string(A.shape));
  const std::size_t m = A.shape[0], n = A.shape[1];
  Tensor<Real> T(Shape{n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T.data[j * m + i] = A.data[i * n + j];
  }
  return push(std::move(T), {a},
              [a, m, n](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < m; ++i) {
                  for (std::size_t j = 0; j < n; ++j) GA.data[i * n + j] += G.data[j * m + i];
                }
              },
              "transpose");
}

template <class Real>
Var Graph<Real>::add(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  const Broadcast mode = classify_broadcast(A, B, "add");
  const std::size_t cols = A.rank() == 2 ? A.shape[1] : 1;
  Tensor<Real> out = A;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] += B.data[broadcast_index<Real>(mode, i, cols)];
  }
  return push(std::move(out), {a, b},
              [a, b, mode, cols](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                if (g.requires_grad(a.id)) {
                  auto& GA = g.grad_ref(a.id);
                  for (std::size_t i = 0; i < G.size(); ++i) GA.data[i] += G.data[i];
                }
                if (g.requires_grad(b.id)) {
                  auto& GB = g.grad_ref(b.id);
                  for (std::size_t i = 0; i < G.size(); ++i) {
                    GB.data[broadcast_index<Real>(mode, i, cols)] += G.data[i];
                  }
                }
              },
              "add");
}

template <class Real>
Var Graph<Real>::sub(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  const Broadcast mode = classify_broadcast(A, B, "sub");
  const std::size_t cols = A.rank() == 2 ? A.shape[1] : 1;
  Tensor<Real> out = A;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] -= B.data[broadcast_index<Real>(mode, i, cols)];
  }
  return push(std::move(out), {a, b},
              [a, b, mode, cols](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                if (g.requires_grad(a.id)) {
                  auto& GA = g.grad_ref(a.id);
                  for (std::size_t i = 0; i < G.size(); ++i) GA.data[i] += G.data[i];
                }
                if (g.requires_grad(b.id)) {
                  auto& GB = g.grad_ref(b.id);
                  for (std::size_t i = 0; i < G.size(); ++i) {
                    GB.data[broadcast_index<Real>(mode, i, cols)] -= G.data[i];
                  }
                }
              },
              "sub");
}

template <class Real>
Var Graph<Real>::mul(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  const Broadcast mode = classify_broadcast(A, B, "mul");
  const std::size_t cols = A.rank() == 2 ? A.shape[1] : 1;
  Tensor<Real> out = A;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] *= B.data[broadcast_index<Real>(mode, i, cols)];
  }
  return push(std::move(out), {a, b},
              [a, b, mode, cols](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& A = g.value(a);
                const auto& B = g.value(b);
                if (g.requires_grad(a.id)) {
                  auto& GA = g.grad_ref(a.id);
                  for (std::size_t i = 0; i < G.size(); ++i) {
                    GA.data[i] += G.data[i] * B.data[broadcast_index<Real>(mode, i, cols)];
                  }
                }
                if (g.requires_grad(b.id)) {
                  auto& GB = g.grad_ref(b.id);
                  for (std::size_t i = 0; i < G.size(); ++i) {
                    GB.data[broadcast_index<Real>(mode, i, cols)] += G.data[i] * A.data[i];
                  }
                }
              },
              "mul");
}

template <class Real>
Var Graph<Real>::scale(Var a, Real factor) {
  Tensor<Real> out = value(a);
  for (auto& x : out.data) x *= factor;
  return push(std::move(out), {a},
              [a, factor](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < G.size(); ++i) GA.data[i] += G.data[i] * factor;
              },
              "scale");
}

template <class Real>
Var Graph<Real>::concat(std::span<const Var> parts, std::size_t axis) {
  require(!parts.empty(), "concat: no inputs");
  const auto& first = value(parts[0]);
  const std::size_t rank = first.rank();
  require(rank == 1 || rank == 2, "concat: rank must be 1 or 2, got " + shape_string(first.shape));
  require(axis < rank, "concat: axis " + std::to_string(axis) + " out of range for " +
                           shape_string(first.shape));

  // Treat every input as [outer, inner_i]; concatenation joins along inner.
  std::size_t outer = (rank == 2 && axis == 1) ? first.shape[0] : 1;
  std::vector<std::size_t> inner;
  std::size_t total_inner = 0;
  for (Var p : parts) {
    const auto& t = value(p);
    const bool ok = t.rank() == rank &&
                    (rank == 1 || (axis == 0 ? t.shape[1] == first.shape[1]
                                             : t.shape[0] == first.shape[0]));
    require(ok, "concat: incompatible shapes " + shape_string(first.shape) + " and " +
                    shape_string(t.shape));
    inner.push_back(t.size() / outer);
    total_inner += inner.back();
  }
  Shape shape;
  if (rank == 1) {
    shape = {total_inner};
  } else if (axis == 0) {
    shape = {total_inner / first.shape[1], first.shape[1]};
  } else {
    shape = {first.shape[0], total_inner};
  }
  Tensor<Real> out(shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& t = value(parts[k]);
    for (std::size_t r = 0; r < outer; ++r) {
      std::copy_n(&t.data[r * inner[k]], inner[k], &out.data[r * total_inner + offset]);
    }
    offset += inner[k];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push_many(std::move(out), parts,
                   [inputs, inner, outer, total_inner](Graph& g, std::int32_t self) {
                     const auto& G = g.grad_of(self);
                     std::size_t offset = 0;
                     for (std::size_t k = 0; k < inputs.size(); ++k) {
                       if (g.requires_grad(inputs[k].id)) {
                         auto& GI = g.grad_ref(inputs[k].id);
                         for (std::size_t r = 0; r < outer; ++r) {
                           for (std::size_t j = 0; j < inner[k]; ++j) {
                             GI.data[r * inner[k] + j] += G.data[r * total_inner + offset + j];
                           }
                         }
                       }
                       offset += inner[k];
                     }
                   },
                   "concat");
}

template <class Real>
Var Graph<Real>::stack(std::span<const Var> rows) {
  require(!rows.empty(), "stack: no inputs");
  const auto& first = value(rows[0]);
  require(first.rank() == 1, "stack: expected vectors, got " + shape_string(first.shape));
  for (Var r : rows) {
    require(value(r).shape == first.shape, "stack: incompatible shapes " +
                                               shape_string(first.shape) + " and " +
                                               shape_string(value(r).shape));
  }
  const std::size_t width = first.shape[0];
  Var flat = concat(rows, 0);
  return reshape(flat, Shape{rows.size(), width});
}

template <class Real>
Var Graph<Real>::row(Var a, std::size_t index) {
  const auto& A = value(a);
  require(A.rank() == 2, "row: expected a matrix, got " + shape_string(A.shape));
  require(index < A.shape[0], "row: index " + std::to_string(index) + " out of range for " +
                                  shape_string(A.shape));
  const std::size_t n = A.shape[1];
  Tensor<Real> out(Shape{n});
  std::copy_n(&A.data[index * n], n, out.data.begin());
  return push(std::move(out), {a},
              [a, index, n](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GA = g.grad_ref(a.id);
                for (std::size_t j = 0; j < n; ++j) GA.data[index * n + j] += G.data[j];
              },
              "row");
}

template <class Real>
Var Graph<Real>::reshape(Var a, Shape shape) {
  const auto& A = value(a);
  require(shape_size(shape) == A.size(), "reshape: cannot view " + shape_string(A.shape) +
                                             " as " + shape_string(shape));
  Tensor<Real> out(std::move(shape), A.data);
  return push(std::move(out), {a},
              [a](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < G.size(); ++i) GA.data[i] += G.data[i];
              },
              "reshape");
}

template <class Real>
Var Graph<Real>::dot(Var u, Var v) {
  const auto& U = value(u);
  const auto& V = value(v);
  require(U.shape == V.shape, "dot: incompatible shapes " + shape_string(U.shape) + " and " +
                                  shape_string(V.shape));
  Real acc = 0;
  for (std::size_t i = 0; i < U.size(); ++i) acc += U.data[i] * V.data[i];
  return push(Tensor<Real>::scalar(acc), {u, v},
              [u, v](Graph& g, std::int32_t self) {
                const Real gs = g.grad_of(self).data[0];
                const auto& U = g.value(u);
                const auto& V = g.value(v);
                if (g.requires_grad(u.id)) {
                  auto& GU = g.grad_ref(u.id);
                  for (std::size_t i = 0; i < U.size(); ++i) GU.data[i] += gs * V.data[i];
                }
                if (g.requires_grad(v.id)) {
                  auto& GV = g.grad_ref(v.id);
                  for (std::size_t i = 0; i < V.size(); ++i) GV.data[i] += gs * U.data[i];
                }
              },
              "dot");
}

template <class Real>
Var Graph<Real>::sum(Var a) {
  const auto& A = value(a);
  Real acc = 0;
  for (Real x : A.data) acc += x;
  return push(Tensor<Real>::scalar(acc), {a},
              [a](Graph& g, std::int32_t self) {
                const Real gs = g.grad_of(self).data[0];
                auto& GA = g.grad_ref(a.id);
                for (auto& x : GA.data) x += gs;
              },
              "sum");
}

template <class Real>
Var Graph<Real>::sum_rows(Var a) {
  const auto& A = value(a);
  require(A.rank() == 2, "sum_rows: expected a matrix, got " + shape_string(A.shape));
  const std::size_t m = A.shape[0], n = A.shape[1];
  Tensor<Real> out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    Real acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += A.data[i * n + j];
    out.data[i] = acc;
  }
  return push(std::move(out), {a},
              [a, m, n](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < m; ++i) {
                  for (std::size_t j = 0; j < n; ++j) GA.data[i * n + j] += G.data[i];
                }
              },
              "sum_rows");
}

template <class Real>
Var Graph<Real>::sigmoid(Var a) {
  Tensor<Real> out = value(a);
  for (auto& x : out.data) x = stable_sigmoid(x);
  return push(std::move(out), {a},
              [a](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& Y = g.nodes_[static_cast<std::size_t>(self)].value;
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < G.size(); ++i) {
                  GA.data[i] += G.data[i] * Y.data[i] * (Real(1) - Y.data[i]);
                }
              },
              "sigmoid");
}

template <class Real>
Var Graph<Real>::tanh(Var a) {
  Tensor<Real> out = value(a);
  for (auto& x : out.data) x = std::tanh(x);
  return push(std::move(out), {a},
              [a](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& Y = g.nodes_[static_cast<std::size_t>(self)].value;
                auto& GA = g.grad_ref(a.id);
                for (std::size_t i = 0; i < G.size(); ++i) {
                  GA.data[i] += G.data[i] * (Real(1) - Y.data[i] * Y.data[i]);
                }
              },
              "tanh");
}

template <class Real>
Var Graph<Real>::softmax(Var a) {
  const auto& A = value(a);
  require(A.rank() == 1 || A.rank() == 2,
          "softmax: expected a vector or matrix, got " + shape_string(A.shape));
  for (Real x : A.data) {
    if (!std::isfinite(x)) throw NumericError("softmax: non-finite input");
  }
  const std::size_t rows = A.rank() == 2 ? A.shape[0] : 1;
  const std::size_t n = A.rank() == 2 ? A.shape[1] : A.shape[0];
  Tensor<Real> out(A.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = &A.data[r * n];
    Real* y = &out.data[r * n];
    Real mx = in[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, in[j]);
    Real total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = std::exp(in[j] - mx);
      total += y[j];
    }
    for (std::size_t j = 0; j < n; ++j) y[j] /= total;
  }
  return push(std::move(out), {a},
              [a, rows, n](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                const auto& Y = g.nodes_[static_cast<std::size_t>(self)].value;
                auto& GA = g.grad_ref(a.id);
                for (std::size_t r = 0; r < rows; ++r) {
                  Real inner = 0;
                  for (std::size_t j = 0; j < n; ++j) inner += G.data[r * n + j] * Y.data[r * n + j];
                  for (std::size_t j = 0; j < n; ++j) {
                    GA.data[r * n + j] += Y.data[r * n + j] * (G.data[r * n + j] - inner);
                  }
                }
              },
              "softmax");
}

template <class Real>
Var Graph<Real>::embedding_lookup(Var table, std::int64_t id) {
  const auto& T = value(table);
  require(T.rank() == 2, "embedding_lookup: table must be a matrix, got " + shape_string(T.shape));
  if (id < 0 || static_cast<std::size_t>(id) >= T.shape[0]) {
    throw Error("embedding_lookup: id " + std::to_string(id) + " out of range for table " +
                shape_string(T.shape));
  }
  const std::size_t row = static_cast<std::size_t>(id);
  const std::size_t d = T.shape[1];
  Tensor<Real> out(Shape{d});
  std::copy_n(&T.data[row * d], d, out.data.begin());
  return push(std::move(out), {table},
              [table, row, d](Graph& g, std::int32_t self) {
                const auto& G = g.grad_of(self);
                auto& GT = g.grad_ref(table.id);
                for (std::size_t j = 0; j < d; ++j) GT.data[row * d + j] += G.data[j];
              },
              "embedding_lookup");
}

template <class Real>
Var Graph<Real>::binary_cross_entropy(Var p, std::span<const std::uint8_t> labels) {
  const auto& P = value(p);
  require(P.size() == labels.size(), "binary_cross_entropy: " + shape_string(P.shape) +
                                         " probabilities for " + std::to_string(labels.size()) +
                                         " labels");
  const double eps = kEpsilon;
  double total = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (labels[i] > 1) throw Error("binary_cross_entropy: label must be 0 or 1");
    const double q = std::clamp(static_cast<double>(P.data[i]), eps, 1.0 - eps);
    total -= labels[i] ? std::log(q) : std::log(1.0 - q);
  }
  std::vector<std::uint8_t> y(labels.begin(), labels.end());
  return push(Tensor<Real>::scalar(static_cast<Real>(total)), {p},
              [p, y = std::move(y), eps](Graph& g, std::int32_t self) {
                const double gs = g.grad_of(self).data[0];
                const auto& P = g.value(p);
                auto& GP = g.grad_ref(p.id);
                for (std::size_t i = 0; i < P.size(); ++i) {
                  const double q = static_cast<double>(P.data[i]);
                  if (q < eps || q > 1.0 - eps) continue;  // clamped: flat
                  const double d = y[i] ? -1.0 / q : 1.0 / (1.0 - q);
                  GP.data[i] += static_cast<Real>(gs * d);
                }
              },
              "binary_cross_entropy");
}

template <class Real>
void Graph<Real>::backward(Var loss) {
  if (nodes_.empty()) throw Error("backward called before any forward computation");
  const Node& target = node(loss);
  if (differentiated_) throw Error("backward already ran on this graph");
  const auto& v = target.view ? target.view->value : target.value;
  if (v.size() != 1) throw Error("backward: loss must be a scalar, got " + shape_string(v.shape));
  differentiated_ = true;
  if (!target.requires_grad) return;

  grad_ref(loss.id).data[0] += Real(1);
  for (std::int32_t id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad || !n.backward || n.grad.empty()) continue;
    n.backward(*this, id);
  }
}

// --- clipping and optimizers ----------------------------------------------

template <class Real>
double global_grad_norm(const ParameterSet<Real>& params) {
  double total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (Real g : params[i].grad.data) total += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(total);
}

template <class Real>
double clip_by_global_norm(ParameterSet<Real>& params, double clip_norm) {
  if (!(clip_norm > 0)) throw Error("clip_norm must be positive");
  const double norm = global_grad_norm(params);
  if (norm > clip_norm) {
    const double factor = clip_norm / norm;
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (auto& g : params[i].grad.data) g = static_cast<Real>(static_cast<double>(g) * factor);
    }
  }
  return norm;
}

template <class Real>
void Optimizer<Real>::step(ParameterSet<Real>& params) {
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& p = params[i];
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        p.value.data[j] = static_cast<Real>(p.value.data[j] - lr * p.grad.data[j]);
      }
    }
    return;
  }

  if (first_moment_.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      first_moment_.emplace_back(params[i].value.size(), Real(0));
      second_moment_.emplace_back(params[i].value.size(), Real(0));
    }
  }
  if (first_moment_.size() != params.size()) throw Error("optimizer state does not match parameters");

  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = first_moment_[i];
    auto& v = second_moment_[i];
    if (m.size() != p.value.size()) throw Error("optimizer state does not match parameter " + p.name);
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad.data[j];
      const double mj = b1 * m[j] + (1.0 - b1) * g;
      const double vj = b2 * v[j] + (1.0 - b2) * g * g;
      m[j] = static_cast<Real>(mj);
      v[j] = static_cast<Real>(vj);
      const double update = lr * (mj / c1) / (std::sqrt(vj / c2) + config_.epsilon);
      p.value.data[j] = static_cast<Real>(p.value.data[j] - update);
    }
  }
}

template struct Tensor<float>;
template struct Tensor<double>;
template class ParameterSet<float>;
template class ParameterSet<double>;
template class Graph<float>;
template class Graph<double>;
template class Optimizer<float>;
template class Optimizer<double>;
template double clip_by_global_norm<float>(ParameterSet<float>&, double);
template double clip_by_global_norm<double>(ParameterSet<double>&, double);
template double global_grad_norm<float>(const ParameterSet<float>&);
template double global_grad_norm<double>(const ParameterSet<double>&);

}  // namespace ged::ad
