#pragma once

// Pairwise (cascade) summation with a fixed split point, so the result only
// depends on the order of the input and never on how work was scheduled.

#include <complex>
#include <cstddef>
#include <span>

namespace rlab {

namespace detail {
inline constexpr std::size_t kPairwiseBlock = 8;
}

template <typename T>
T pairwise_sum(std::span<const T> values) {
  const std::size_t n = values.size();
  if (n <= detail::kPairwiseBlock) {
    T acc{};
    for (const T& v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(std::span<T> values) {
  return pairwise_sum(std::span<const T>(values.data(), values.size()));
}

}  // namespace rlab
