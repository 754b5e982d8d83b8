#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "abjad/common.hpp"

namespace abjad {

// Row-major dims + contents; the unit of model serialization.
template <typename S>
struct Tensor {
  std::vector<size_t> dims;
  std::vector<S> data;

  Tensor() = default;
  Tensor(std::vector<size_t> d, std::vector<S> v) : dims(std::move(d)), data(std::move(v)) {
    require(element_count() == data.size(), ErrorCode::DimensionMismatch,
            "tensor: dims do not match contents");
  }

  size_t element_count() const {
    size_t n = 1;
    for (size_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
};

template <typename S>
inline bool all_finite(const std::vector<S>& v) {
  for (S x : v)
    if (!std::isfinite(double(x))) return false;
  return true;
}

}  // namespace abjad
