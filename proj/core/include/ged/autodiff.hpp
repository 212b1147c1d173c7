#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ged/rng.hpp"

// Dense tensors with tape-based reverse-mode differentiation. Real is float
// for training and double for gradient checking.
namespace ged::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

template <class Real>
struct Tensor {
  Shape shape;
  std::vector<Real> data;  // row-major

  Tensor() = default;
  explicit Tensor(Shape s, Real fill = Real(0));
  Tensor(Shape s, std::vector<Real> values);

  static Tensor scalar(Real v) { return Tensor(Shape{1}, std::vector<Real>{v}); }
  static Tensor vector(std::vector<Real> v) {
    const std::size_t n = v.size();
    return Tensor(Shape{n}, std::move(v));
  }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<Real> v) {
    return Tensor(Shape{rows, cols}, std::move(v));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.at(1); }
  bool empty() const { return data.empty(); }

  Real& operator[](std::size_t i) { return data[i]; }
  Real operator[](std::size_t i) const { return data[i]; }
  Real& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  Real at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  void fill(Real v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Tensor&) const = default;
};

template <class Real>
struct Parameter {
  std::string name;
  Tensor<Real> value;
  Tensor<Real> grad;  // same shape as value
};

// Named parameters with stable addresses, in insertion order.
template <class Real>
class ParameterSet {
 public:
  Parameter<Real>& add(std::string name, Shape shape);

  Parameter<Real>* find(std::string_view name);
  const Parameter<Real>* find(std::string_view name) const;
  Parameter<Real>& get(std::string_view name);
  const Parameter<Real>& get(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  Parameter<Real>& operator[](std::size_t i) { return *params_[i]; }
  const Parameter<Real>& operator[](std::size_t i) const { return *params_[i]; }

  void zero_grad();
  // Every value uniform in [-range, range).
  void initialize_uniform(Rng& rng, double range);

 private:
  std::vector<std::unique_ptr<Parameter<Real>>> params_;
};

// Handle to a node of a Graph.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Records operations as they execute; backward() replays them in reverse.
// Every op checks shapes (ShapeError naming both operands) and rejects
// non-finite results (NumericError).
template <class Real>
class Graph {
 public:
  Graph();
  ~Graph();
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor<Real> value);
  // Trainable leaf: backward accumulates into p.grad.
  Var param(Parameter<Real>& p);
  // Read-only view of a parameter; receives no gradient.
  Var frozen(const Parameter<Real>& p);

  Var matmul(Var a, Var b);   // [m,k] x [k,n]
  Var matvec(Var m, Var v);   // [m,k] x [k]
  Var transpose(Var a);       // 2-D
  // Elementwise; b may also be a single value or, for 2-D a, a row vector
  // broadcast over a's leading dimension.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, Real factor);
  Var concat(std::span<const Var> parts, std::size_t axis = 0);
  Var concat(std::initializer_list<Var> parts, std::size_t axis = 0) {
    return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
  }
  Var stack(std::span<const Var> rows);  // k vectors of length d -> [k,d]
  Var row(Var a, std::size_t index);      // [m,n] -> [n]
  Var reshape(Var a, Shape shape);
  Var dot(Var u, Var v);                  // -> scalar
  Var sum(Var a);                         // -> scalar
  Var sum_rows(Var a);                    // [m,n] -> [m]
  Var sigmoid(Var a);
  Var tanh(Var a);
  // Vector softmax, or row-wise for a matrix.
  Var softmax(Var a);
  Var embedding_lookup(Var table, std::int64_t id);
  // Sum over elements of -[y ln p + (1-y) ln(1-p)], p clamped to
  // [kEpsilon, 1 - kEpsilon].
  Var binary_cross_entropy(Var p, std::span<const std::uint8_t> labels);

  static constexpr double kEpsilon = 1e-7;

  const Tensor<Real>& value(Var v) const;
  // Gradient of the last backward() target with respect to v. Empty for
  // nodes that received none.
  const Tensor<Real>& grad(Var v) const;

  // Throws ged::Error if the graph is empty, loss is not a scalar node of
  // this graph, or backward already ran.
  void backward(Var loss);

  std::size_t size() const;

 private:
  struct Node;
  using BackwardFn = std::function<void(Graph&, std::int32_t)>;

  Var push(Tensor<Real> value, std::initializer_list<Var> inputs, BackwardFn fn,
           const char* op);
  Var push_many(Tensor<Real> value, std::span<const Var> inputs, BackwardFn fn,
                const char* op);
  const Node& node(Var v) const;
  Tensor<Real>& grad_ref(std::int32_t id);
  const Tensor<Real>& grad_of(std::int32_t id) const;
  bool requires_grad(std::int32_t id) const;

  std::vector<Node> nodes_;
  bool differentiated_ = false;
};

// Scales all gradients by clip_norm / global_norm when the global L2 norm
// exceeds clip_norm. Returns the norm before clipping.
template <class Real>
double clip_by_global_norm(ParameterSet<Real>& params, double clip_norm);

template <class Real>
double global_grad_norm(const ParameterSet<Real>& params);

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <class Real>
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  // Applies one update from the gradients currently stored in params.
  void step(ParameterSet<Real>& params);

  const OptimizerConfig& config() const { return config_; }
  std::int64_t steps() const { return steps_; }

 private:
  OptimizerConfig config_;
  std::int64_t steps_ = 0;
  std::vector<std::vector<Real>> first_moment_;
  std::vector<std::vector<Real>> second_moment_;
};

}  // namespace ged::ad
