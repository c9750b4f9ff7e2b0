#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hgtpp/tensor.hpp"

namespace hgtpp {

/// Learnable tensor with an accumulated gradient of the same shape.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
    void zero_grad() { grad.fill(0.0); }
};

/// Owns parameters with stable addresses, in insertion order.
class ParameterStore {
public:
    ParameterStore() = default;
    ParameterStore(const ParameterStore&) = delete;
    ParameterStore& operator=(const ParameterStore&) = delete;
    ParameterStore(ParameterStore&&) = default;
    ParameterStore& operator=(ParameterStore&&) = default;

    Parameter& add(std::string name, Tensor init);
    Parameter* find(std::string_view name);
    const Parameter* find(std::string_view name) const;

    std::vector<Parameter*> all();
    std::vector<const Parameter*> all() const;
    std::vector<std::string> names() const;
    std::size_t size() const noexcept { return items_.size(); }

    void zero_grad();
    /// Flattened copy of every parameter value, in insertion order.
    std::vector<Tensor> snapshot() const;
    void restore(const std::vector<Tensor>& values);

private:
    std::vector<std::unique_ptr<Parameter>> items_;
};

enum class Op : std::uint8_t {
    leaf,
    add,
    sub,
    mul,
    scale,
    matmul,
    tanh,
    cos,
    exp,
    log,
    square,
    softplus,
    softmax,
    mean,
    sum,
    dot,
    stack,
    row,
};

std::string_view op_name(Op op);

class Tape;

/// Handle to a tensor recorded on a Tape. Only valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    std::uint32_t id = 0;

    bool valid() const noexcept { return tape != nullptr; }
    const Tensor& value() const;
    double item() const { return value().item(); }
};

/// Computation record for reverse-mode differentiation. Values are always
/// computed; when recording is disabled the inputs of each node are not kept
/// and backward() is unavailable.
class Tape {
public:
    explicit Tape(bool recording = true) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const noexcept { return recording_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Var constant(Tensor value);
    Var constant(double v) { return constant(Tensor::scalar(v)); }
    /// Leaf bound to a parameter; repeated calls return the same node.
    Var parameter(Parameter& p);

    const Tensor& value(Var v) const { return values_[v.id]; }

    /// Accumulates d(root)/d(param) into every reached Parameter::grad.
    /// The record is consumed: a second call throws.
    void backward(Var root);

    /// Gradient of a node after backward(); nullptr if the node was not reached.
    const Tensor* grad(Var v) const;

    struct RecordEntry {
        Op op;
        std::vector<std::uint32_t> inputs;
        std::uint32_t output;
    };
    RecordEntry entry(std::uint32_t id) const;

    // Used by primitive implementations.
    Var push(Op op, Tensor value, std::initializer_list<std::uint32_t> inputs, double aux = 0.0);
    Var push(Op op, Tensor value, std::span<const Var> inputs, double aux = 0.0);

private:
    struct Node {
        Op op;
        std::uint32_t in_begin;
        std::uint32_t in_count;
        double aux;
        Parameter* param;
    };

    std::span<const std::uint32_t> inputs_of(const Node& n) const {
        return {inputs_.data() + n.in_begin, n.in_count};
    }
    void backprop_node(std::uint32_t id);
    Tensor& grad_slot(std::uint32_t id);

    bool recording_;
    bool consumed_ = false;
    std::vector<Node> nodes_;
    std::deque<Tensor> values_;
    std::vector<std::uint32_t> inputs_;
    std::vector<Tensor> grads_;
    std::vector<char> has_grad_;
    std::unordered_map<const Parameter*, std::uint32_t> param_ids_;
};

namespace ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
/// (m×n)(n×p), vector(n)·(n×p) → vector(p), (m×n)·vector(n) → vector(m).
Var matmul(Var a, Var b);
Var tanh(Var a);
Var cos(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
/// log(1 + e^x), evaluated stably.
Var softplus(Var a);
Var softmax(Var a);
Var mean(std::span<const Var> xs);
Var sum(Var a);
Var dot(Var a, Var b);
/// Scalars → vector(n); vectors of length d → matrix(n×d).
Var stack(std::span<const Var> xs);
Var row(Var m, std::size_t i);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

double softplus_value(double x);
double sigmoid_value(double x);

}  // namespace ad

using LossFn = std::function<Var(Tape&)>;

/// Max over parameter entries of |analytic − central| / (|analytic| + |central| + 1e-12).
/// `loss` must be deterministic; it is invoked once with recording and twice per entry without.
double finite_difference_check(const LossFn& loss, std::span<Parameter* const> params, double epsilon);

}  // namespace hgtpp
