#pragma once

#include <cmath>

#include "hgtpp/rng.hpp"
#include "hgtpp/tensor.hpp"

namespace hgtpp {

/// rows×cols matrix with entries uniform on (−1/√rows, 1/√rows), rows being the embedding size.
inline Tensor uniform_weight(std::size_t rows, std::size_t cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    Tensor t(Shape::matrix(rows, cols));
    for (auto& x : t.values()) x = rng.uniform(-bound, bound);
    return t;
}

}  // namespace hgtpp
