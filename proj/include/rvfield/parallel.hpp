#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace rvf {

// Worker count used by the block-parallel loops. Results never depend on it.
void set_num_threads(int n);
int num_threads();

// Runs fn(b) for every b in [0, nblocks). Rethrows the first exception.
void parallel_blocks(std::size_t nblocks, const std::function<void(std::size_t)>& fn);

inline constexpr std::size_t kLeafSize = 32;

// Fixed-order sum of n vector-valued terms of length `width`.
// Terms are summed left to right in leaves of kLeafSize consecutive indices,
// then adjacent leaves are combined pairwise, level by level.
// add(i, acc) adds term i into acc[0..width).
template <class T, class Add>
std::vector<T> tree_sum(std::size_t n, std::size_t width, Add&& add) {
  const std::size_t nleaf = (n + kLeafSize - 1) / kLeafSize;
  if (nleaf == 0) return std::vector<T>(width, T{});
  std::vector<std::vector<T>> leaves(nleaf, std::vector<T>(width, T{}));
  parallel_blocks(nleaf, [&](std::size_t b) {
    T* acc = leaves[b].data();
    const std::size_t end = std::min(n, (b + 1) * kLeafSize);
    for (std::size_t i = b * kLeafSize; i < end; ++i) add(i, acc);
  });
  for (std::size_t step = 1; step < nleaf; step *= 2)
    for (std::size_t b = 0; b + step < nleaf; b += 2 * step)
      for (std::size_t k = 0; k < width; ++k) leaves[b][k] += leaves[b + step][k];
  return std::move(leaves[0]);
}

}  // namespace rvf
