#include "hgtpp/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace hgtpp {

std::vector<std::size_t> Shape::dims() const {
    switch (rank) {
        case 0: return {};
        case 1: return {rows};
        default: return {rows, cols};
    }
}

std::string Shape::str() const {
    switch (rank) {
        case 0: return "()";
        case 1: return "(" + std::to_string(rows) + ")";
        default: return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
    }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
        throw ShapeError("tensor of shape " + shape_.str() + " given " + std::to_string(data_.size()) + " values");
    }
}

Tensor Tensor::vector(std::vector<double> v) {
    const auto n = v.size();
    return Tensor(Shape::vector(n), std::move(v));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return Tensor(Shape::matrix(rows, cols), std::move(v));
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t(Shape::matrix(n, n));
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

double Tensor::item() const {
    if (data_.size() != 1) throw ShapeError("item() on tensor of shape " + shape_.str());
    return data_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace hgtpp
