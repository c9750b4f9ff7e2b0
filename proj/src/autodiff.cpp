#include "hgtpp/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hgtpp {

// ---------------------------------------------------------------- parameters

Parameter& ParameterStore::add(std::string name, Tensor init) {
    if (find(name) != nullptr) throw std::invalid_argument("duplicate parameter name: " + name);
    items_.push_back(std::make_unique<Parameter>(std::move(name), std::move(init)));
    return *items_.back();
}

Parameter* ParameterStore::find(std::string_view name) {
    for (auto& p : items_) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

const Parameter* ParameterStore::find(std::string_view name) const {
    for (const auto& p : items_) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

std::vector<Parameter*> ParameterStore::all() {
    std::vector<Parameter*> out;
    out.reserve(items_.size());
    for (auto& p : items_) out.push_back(p.get());
    return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
    std::vector<const Parameter*> out;
    out.reserve(items_.size());
    for (const auto& p : items_) out.push_back(p.get());
    return out;
}

std::vector<std::string> ParameterStore::names() const {
    std::vector<std::string> out;
    for (const auto& p : items_) out.push_back(p->name);
    return out;
}

void ParameterStore::zero_grad() {
    for (auto& p : items_) p->zero_grad();
}

std::vector<Tensor> ParameterStore::snapshot() const {
    std::vector<Tensor> out;
    out.reserve(items_.size());
    for (const auto& p : items_) out.push_back(p->value);
    return out;
}

void ParameterStore::restore(const std::vector<Tensor>& values) {
    if (values.size() != items_.size()) throw std::invalid_argument("snapshot size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].shape() != items_[i]->value.shape()) {
            throw ShapeError("snapshot shape mismatch for " + items_[i]->name);
        }
        items_[i]->value = values[i];
    }
}

// ---------------------------------------------------------------------- tape

std::string_view op_name(Op op) {
    switch (op) {
        case Op::leaf: return "leaf";
        case Op::add: return "add";
        case Op::sub: return "sub";
        case Op::mul: return "mul";
        case Op::scale: return "scale";
        case Op::matmul: return "matmul";
        case Op::tanh: return "tanh";
        case Op::cos: return "cos";
        case Op::exp: return "exp";
        case Op::log: return "log";
        case Op::square: return "square";
        case Op::softplus: return "softplus";
        case Op::softmax: return "softmax";
        case Op::mean: return "mean";
        case Op::sum: return "sum";
        case Op::dot: return "dot";
        case Op::stack: return "stack";
        case Op::row: return "row";
    }
    return "?";
}

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) { return push(Op::leaf, std::move(value), {}); }

Var Tape::parameter(Parameter& p) {
    if (auto it = param_ids_.find(&p); it != param_ids_.end()) return {this, it->second};
    Var v = push(Op::leaf, p.value, {});
    nodes_[v.id].param = &p;
    param_ids_.emplace(&p, v.id);
    return v;
}

Var Tape::push(Op op, Tensor value, std::initializer_list<std::uint32_t> inputs, double aux) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    Node n{op, static_cast<std::uint32_t>(inputs_.size()), 0, aux, nullptr};
    if (recording_) {
        inputs_.insert(inputs_.end(), inputs.begin(), inputs.end());
        n.in_count = static_cast<std::uint32_t>(inputs.size());
    }
    nodes_.push_back(n);
    values_.push_back(std::move(value));
    return {this, id};
}

Var Tape::push(Op op, Tensor value, std::span<const Var> inputs, double aux) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    Node n{op, static_cast<std::uint32_t>(inputs_.size()), 0, aux, nullptr};
    if (recording_) {
        for (const Var& v : inputs) inputs_.push_back(v.id);
        n.in_count = static_cast<std::uint32_t>(inputs.size());
    }
    nodes_.push_back(n);
    values_.push_back(std::move(value));
    return {this, id};
}

Tape::RecordEntry Tape::entry(std::uint32_t id) const {
    const Node& n = nodes_.at(id);
    auto ins = inputs_of(n);
    return {n.op, {ins.begin(), ins.end()}, id};
}

const Tensor* Tape::grad(Var v) const {
    if (v.id >= has_grad_.size() || !has_grad_[v.id]) return nullptr;
    return &grads_[v.id];
}

Tensor& Tape::grad_slot(std::uint32_t id) {
    if (!has_grad_[id]) {
        grads_[id] = Tensor(values_[id].shape());
        has_grad_[id] = 1;
    }
    return grads_[id];
}

void Tape::backward(Var root) {
    if (root.tape != this) throw std::invalid_argument("backward: root belongs to another tape");
    if (!recording_) throw std::logic_error("backward: tape was not recording");
    if (consumed_) throw std::logic_error("backward: computation record already consumed");
    if (values_[root.id].size() != 1) {
        throw ShapeError("backward: root must be scalar, got shape " + values_[root.id].shape().str());
    }
    consumed_ = true;
    grads_.assign(nodes_.size(), Tensor());
    has_grad_.assign(nodes_.size(), 0);
    grad_slot(root.id).fill(1.0);
    for (std::uint32_t id = root.id + 1; id-- > 0;) {
        if (!has_grad_[id]) continue;
        const Node& n = nodes_[id];
        if (n.op == Op::leaf) {
            if (n.param != nullptr) {
                auto& pg = n.param->grad.storage();
                const auto& g = grads_[id].storage();
                for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i];
            }
            continue;
        }
        backprop_node(id);
    }
}

namespace {

// accumulate g into dst, summing when dst is a broadcast scalar
void accumulate(Tensor& dst, const Tensor& g, double factor = 1.0) {
    if (dst.size() == g.size()) {
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += factor * g[i];
    } else {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i];
        dst[0] += factor * s;
    }
}

double bval(const Tensor& t, std::size_t i) { return t.size() == 1 ? t[0] : t[i]; }

}  // namespace

void Tape::backprop_node(std::uint32_t id) {
    const Node& n = nodes_[id];
    const auto in = inputs_of(n);
    const Tensor& g = grads_[id];
    const Tensor& y = values_[id];

    switch (n.op) {
        case Op::leaf: break;
        case Op::add:
            accumulate(grad_slot(in[0]), g);
            accumulate(grad_slot(in[1]), g);
            break;
        case Op::sub:
            accumulate(grad_slot(in[0]), g);
            accumulate(grad_slot(in[1]), g, -1.0);
            break;
        case Op::mul: {
            const Tensor& a = values_[in[0]];
            const Tensor& b = values_[in[1]];
            Tensor ga(g.shape()), gb(g.shape());
            for (std::size_t i = 0; i < g.size(); ++i) {
                ga[i] = g[i] * bval(b, i);
                gb[i] = g[i] * bval(a, i);
            }
            accumulate(grad_slot(in[0]), ga);
            accumulate(grad_slot(in[1]), gb);
            break;
        }
        case Op::scale: accumulate(grad_slot(in[0]), g, n.aux); break;
        case Op::matmul: {
            const Tensor& a = values_[in[0]];
            const Tensor& b = values_[in[1]];
            Tensor& ga = grad_slot(in[0]);
            Tensor& gb = grad_slot(in[1]);
            if (a.shape().rank == 1) {  // v(n)·B(n×p)
                const std::size_t nn = b.rows(), p = b.cols();
                for (std::size_t i = 0; i < nn; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < p; ++j) {
                        s += g[j] * b.at(i, j);
                        gb.at(i, j) += a[i] * g[j];
                    }
                    ga[i] += s;
                }
            } else if (b.shape().rank == 1) {  // A(m×n)·v(n)
                const std::size_t m = a.rows(), nn = a.cols();
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < nn; ++j) {
                        ga.at(i, j) += g[i] * b[j];
                        gb[j] += g[i] * a.at(i, j);
                    }
                }
            } else {  // A(m×n)·B(n×p)
                const std::size_t m = a.rows(), nn = a.cols(), p = b.cols();
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t k = 0; k < nn; ++k) {
                        double s = 0.0;
                        const double aik = a.at(i, k);
                        for (std::size_t j = 0; j < p; ++j) {
                            s += g.at(i, j) * b.at(k, j);
                            gb.at(k, j) += aik * g.at(i, j);
                        }
                        ga.at(i, k) += s;
                    }
                }
            }
            break;
        }
        case Op::tanh: {
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
            break;
        }
        case Op::cos: {
            const Tensor& x = values_[in[0]];
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i] * std::sin(x[i]);
            break;
        }
        case Op::exp: {
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
            break;
        }
        case Op::log: {
            const Tensor& x = values_[in[0]];
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / x[i];
            break;
        }
        case Op::square: {
            const Tensor& x = values_[in[0]];
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += 2.0 * x[i] * g[i];
            break;
        }
        case Op::softplus: {
            const Tensor& x = values_[in[0]];
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * ad::sigmoid_value(x[i]);
            break;
        }
        case Op::softmax: {
            double gy = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * y[i];
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += y[i] * (g[i] - gy);
            break;
        }
        case Op::mean: {
            const double f = 1.0 / static_cast<double>(in.size());
            for (auto i : in) accumulate(grad_slot(i), g, f);
            break;
        }
        case Op::sum: {
            Tensor& ga = grad_slot(in[0]);
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
            break;
        }
        case Op::dot: {
            const Tensor& a = values_[in[0]];
            const Tensor& b = values_[in[1]];
            Tensor& ga = grad_slot(in[0]);
            Tensor& gb = grad_slot(in[1]);
            for (std::size_t i = 0; i < a.size(); ++i) {
                ga[i] += g[0] * b[i];
                gb[i] += g[0] * a[i];
            }
            break;
        }
        case Op::stack: {
            std::size_t off = 0;
            for (auto i : in) {
                Tensor& gi = grad_slot(i);
                for (std::size_t j = 0; j < gi.size(); ++j) gi[j] += g[off + j];
                off += gi.size();
            }
            break;
        }
        case Op::row: {
            Tensor& gm = grad_slot(in[0]);
            const auto r = static_cast<std::size_t>(n.aux);
            const std::size_t c = gm.cols();
            for (std::size_t j = 0; j < c; ++j) gm.at(r, j) += g[j];
            break;
        }
    }
}

// ---------------------------------------------------------------- primitives

namespace ad {
namespace {

Tape& same_tape(Var a, Var b, std::string_view op) {
    if (a.tape == nullptr || a.tape != b.tape) {
        throw std::invalid_argument(std::string(op) + ": operands from different tapes");
    }
    return *a.tape;
}

Shape broadcast_shape(const Tensor& a, const Tensor& b, std::string_view op) {
    if (a.shape() == b.shape()) return a.shape();
    if (b.size() == 1) return a.shape();
    if (a.size() == 1) return b.shape();
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " + b.shape().str());
}

template <class F>
Var binary(Var a, Var b, Op op, F f) {
    Tape& t = same_tape(a, b, op_name(op));
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    Tensor out(broadcast_shape(x, y, op_name(op)));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(bval(x, i), bval(y, i));
    return t.push(op, std::move(out), {a.id, b.id});
}

template <class F>
Var unary(Var a, Op op, F f) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
    return a.tape->push(op, std::move(out), {a.id});
}

}  // namespace

double softplus_value(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid_value(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Var add(Var a, Var b) { return binary(a, b, Op::add, [](double x, double y) { return x + y; }); }
Var sub(Var a, Var b) { return binary(a, b, Op::sub, [](double x, double y) { return x - y; }); }
Var mul(Var a, Var b) { return binary(a, b, Op::mul, [](double x, double y) { return x * y; }); }

Var scale(Var a, double c) {
    const Tensor& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
    return a.tape->push(Op::scale, std::move(out), {a.id}, c);
}

Var matmul(Var a, Var b) {
    Tape& t = same_tape(a, b, "matmul");
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    const auto ra = x.shape().rank, rb = y.shape().rank;
    auto mismatch = [&] {
        return ShapeError("matmul: shape mismatch " + x.shape().str() + " vs " + y.shape().str());
    };
    if (ra == 1 && rb == 2) {
        if (x.size() != y.rows()) throw mismatch();
        Tensor out(Shape::vector(y.cols()));
        for (std::size_t i = 0; i < y.rows(); ++i) {
            const double xi = x[i];
            for (std::size_t j = 0; j < y.cols(); ++j) out[j] += xi * y.at(i, j);
        }
        return t.push(Op::matmul, std::move(out), {a.id, b.id});
    }
    if (ra == 2 && rb == 1) {
        if (x.cols() != y.size()) throw mismatch();
        Tensor out(Shape::vector(x.rows()));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) s += x.at(i, j) * y[j];
            out[i] = s;
        }
        return t.push(Op::matmul, std::move(out), {a.id, b.id});
    }
    if (ra == 2 && rb == 2) {
        if (x.cols() != y.rows()) throw mismatch();
        Tensor out(Shape::matrix(x.rows(), y.cols()));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double xik = x.at(i, k);
                for (std::size_t j = 0; j < y.cols(); ++j) out.at(i, j) += xik * y.at(k, j);
            }
        }
        return t.push(Op::matmul, std::move(out), {a.id, b.id});
    }
    throw mismatch();
}

Var tanh(Var a) { return unary(a, Op::tanh, [](double x) { return std::tanh(x); }); }
Var cos(Var a) { return unary(a, Op::cos, [](double x) { return std::cos(x); }); }
Var exp(Var a) { return unary(a, Op::exp, [](double x) { return std::exp(x); }); }

Var log(Var a) {
    for (double x : a.value().values()) {
        if (!(x > 0.0)) throw DomainError("log: non-positive input " + std::to_string(x));
    }
    return unary(a, Op::log, [](double x) { return std::log(x); });
}

Var square(Var a) { return unary(a, Op::square, [](double x) { return x * x; }); }
Var softplus(Var a) { return unary(a, Op::softplus, softplus_value); }

Var softmax(Var a) {
    const Tensor& x = a.value();
    if (x.size() == 0) throw ShapeError("softmax: empty input");
    const double m = *std::max_element(x.values().begin(), x.values().end());
    Tensor out(x.shape());
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(x[i] - m);
        z += out[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] /= z;
    return a.tape->push(Op::softmax, std::move(out), {a.id});
}

Var mean(std::span<const Var> xs) {
    if (xs.empty()) throw ShapeError("mean: empty input set");
    const Tensor& first = xs[0].value();
    Tensor out(first.shape());
    for (const Var& v : xs) {
        if (v.tape != xs[0].tape) throw std::invalid_argument("mean: operands from different tapes");
        const Tensor& x = v.value();
        if (x.shape() != first.shape()) {
            throw ShapeError("mean: shape mismatch " + first.shape().str() + " vs " + x.shape().str());
        }
        for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
    return xs[0].tape->push(Op::mean, std::move(out), xs);
}

Var sum(Var a) {
    double s = 0.0;
    for (double x : a.value().values()) s += x;
    return a.tape->push(Op::sum, Tensor::scalar(s), {a.id});
}

Var dot(Var a, Var b) {
    Tape& t = same_tape(a, b, "dot");
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (x.shape().rank != 1 || x.shape() != y.shape()) {
        throw ShapeError("dot: shape mismatch " + x.shape().str() + " vs " + y.shape().str());
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return t.push(Op::dot, Tensor::scalar(s), {a.id, b.id});
}

Var stack(std::span<const Var> xs) {
    if (xs.empty()) throw ShapeError("stack: empty input set");
    const Tensor& first = xs[0].value();
    const auto rank = first.shape().rank;
    if (rank > 1) throw ShapeError("stack: inputs must be scalars or vectors, got " + first.shape().str());
    const std::size_t width = first.size();
    Tensor out(rank == 0 ? Shape::vector(xs.size()) : Shape::matrix(xs.size(), width));
    for (std::size_t r = 0; r < xs.size(); ++r) {
        if (xs[r].tape != xs[0].tape) throw std::invalid_argument("stack: operands from different tapes");
        const Tensor& x = xs[r].value();
        if (x.shape() != first.shape()) {
            throw ShapeError("stack: shape mismatch " + first.shape().str() + " vs " + x.shape().str());
        }
        for (std::size_t j = 0; j < width; ++j) out[r * width + j] = x[j];
    }
    return xs[0].tape->push(Op::stack, std::move(out), xs);
}

Var row(Var m, std::size_t i) {
    const Tensor& x = m.value();
    if (x.shape().rank != 2 || i >= x.rows()) {
        throw ShapeError("row: index " + std::to_string(i) + " out of range for " + x.shape().str());
    }
    Tensor out(Shape::vector(x.cols()));
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] = x.at(i, j);
    return m.tape->push(Op::row, std::move(out), {m.id}, static_cast<double>(i));
}

}  // namespace ad

// ------------------------------------------------------------ gradient check

double finite_difference_check(const LossFn& loss, std::span<Parameter* const> params, double epsilon) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-4)) {
        throw std::invalid_argument("finite_difference_check: epsilon must lie in [1e-7, 1e-4]");
    }
    for (Parameter* p : params) p->zero_grad();
    {
        Tape tape(true);
        Var root = loss(tape);
        tape.backward(root);
    }
    auto eval = [&] {
        Tape tape(false);
        return loss(tape).item();
    };
    double worst = 0.0;
    for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double orig = p->value[i];
            p->value[i] = orig + epsilon;
            const double up = eval();
            p->value[i] = orig - epsilon;
            const double down = eval();
            p->value[i] = orig;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double analytic = p->grad[i];
            const double err = std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-12);
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace hgtpp
