#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgtpp {

/// Shape of a dense tensor of rank 0 (scalar), 1 (vector) or 2 (matrix).
struct Shape {
    std::size_t rank = 0;
    std::size_t rows = 1;  // first dim (length of a vector)
    std::size_t cols = 1;  // second dim, 1 unless rank == 2

    static Shape scalar() { return {}; }
    static Shape vector(std::size_t n) { return {1, n, 1}; }
    static Shape matrix(std::size_t r, std::size_t c) { return {2, r, c}; }

    std::size_t numel() const noexcept { return rank == 0 ? 1 : rows * cols; }
    std::vector<std::size_t> dims() const;
    std::string str() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense row-major tensor of doubles. Value type.
class Tensor {
public:
    Tensor() : Tensor(Shape::scalar()) {}
    explicit Tensor(Shape shape, double fill = 0.0) : shape_(shape), data_(shape.numel(), fill) {}
    Tensor(Shape shape, std::vector<double> data);

    static Tensor scalar(double v) { return Tensor(Shape::scalar(), {v}); }
    static Tensor vector(std::vector<double> v);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v);
    static Tensor identity(std::size_t n);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t rows() const noexcept { return shape_.rows; }
    std::size_t cols() const noexcept { return shape_.cols; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
    double item() const;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::vector<double>& storage() noexcept { return data_; }

    void fill(double v);
    bool all_finite() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace hgtpp
