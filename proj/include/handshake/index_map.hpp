// Row-major flattening of the upper triangle of an n x n token-pair matrix.
//
//        j
//    +-------+
//    | 0 1 2 |
//   i|   3 4 |   k = i*(2n - i + 1)/2 + (j - i)   for i <= j
//    |     5 |
//    +-------+
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "handshake/core.hpp"

namespace handshake {

struct PairIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  friend constexpr auto operator<=>(const PairIndex &, const PairIndex &) = default;
};

namespace detail {

constexpr std::size_t row_start(std::size_t i, std::size_t n) noexcept {
  return i * (2 * n - i + 1) / 2;
}

}  // namespace detail

/// Flat position of pair (i, j), i <= j < n.
constexpr std::size_t seq_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i > j || j >= n) {
    throw Error(ErrorKind::kInvalidIndex, "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                              ") is not in the upper triangle of n=" +
                                              std::to_string(n));
  }
  return detail::row_start(i, n) + (j - i);
}

/// Inverse of seq_index.
inline PairIndex matrix_index(std::size_t k, std::size_t n) {
  if (n == 0 || k >= seq_length(n)) {
    throw Error(ErrorKind::kInvalidIndex,
                "flat index " + std::to_string(k) + " out of range for n=" + std::to_string(n));
  }
  // Largest i with row_start(i) <= k; the floating estimate is corrected exactly below.
  const double b = 2.0 * static_cast<double>(n) + 1.0;
  const double est = (b - std::sqrt(b * b - 8.0 * static_cast<double>(k))) / 2.0;
  std::size_t i = est <= 0.0 ? 0 : static_cast<std::size_t>(est);
  if (i >= n) i = n - 1;
  while (i > 0 && detail::row_start(i, n) > k) --i;
  while (i + 1 < n && detail::row_start(i + 1, n) <= k) ++i;
  return {i, i + (k - detail::row_start(i, n))};
}

/// Precomputed backward map k -> (i, j) for one sentence length.
class IndexMap {
 public:
  explicit IndexMap(std::size_t n) : n_(n) {
    const std::size_t len = seq_length(n);
    pairs_.reserve(len);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) pairs_.push_back({i, j});
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return pairs_.size(); }

  std::size_t forward(std::size_t i, std::size_t j) const { return seq_index(i, j, n_); }

  const PairIndex &backward(std::size_t k) const {
    if (k >= pairs_.size()) {
      throw Error(ErrorKind::kInvalidIndex, "flat index " + std::to_string(k) + " out of range");
    }
    return pairs_[k];
  }

  const PairIndex &operator[](std::size_t k) const noexcept { return pairs_[k]; }

  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

 private:
  std::size_t n_;
  std::vector<PairIndex> pairs_;
};

}  // namespace handshake
