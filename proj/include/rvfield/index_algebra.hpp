#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "rvfield/errors.hpp"

namespace rvf {

inline constexpr int kMaxDim = 16;

// (k, n) space-time. Indices 0..k-1 are temporal (metric -1), k..d-1 spatial.
struct Signature {
  int k = 1;
  int n = 3;

  Signature() = default;
  Signature(int k_, int n_);

  int d() const { return k + n; }
  int delta(int i) const { return i < k ? -1 : 1; }
  std::uint32_t temporal_mask() const { return (std::uint32_t{1} << k) - 1u; }
  std::string str() const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

// Strictly increasing list of distinct indices, stored as a bitmask.
class IndexList {
 public:
  IndexList() = default;
  IndexList(std::initializer_list<int> idx);
  explicit IndexList(const std::vector<int>& idx);

  static IndexList from_mask(std::uint32_t m) {
    IndexList l;
    l.mask_ = m;
    return l;
  }

  std::uint32_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }
  bool contains(int i) const { return (mask_ >> i) & 1u; }
  std::vector<int> indices() const;
  std::string str() const;

  friend bool operator==(const IndexList&, const IndexList&) = default;
  // lexicographic on the index sequence
  friend bool operator<(const IndexList& a, const IndexList& b);

 private:
  std::uint32_t mask_ = 0;
};

// Non-decreasing list, repeats allowed.
class SymIndexList {
 public:
  SymIndexList() = default;
  SymIndexList(std::initializer_list<int> idx);
  explicit SymIndexList(std::vector<int> idx);

  const std::vector<int>& indices() const { return idx_; }
  int size() const { return static_cast<int>(idx_.size()); }

 private:
  std::vector<int> idx_;
};

// Sign of the permutation sorting (I, J); 0 when they overlap.
inline int sigma_mask(std::uint32_t I, std::uint32_t J) {
  if (I & J) return 0;
  int inv = 0;
  for (std::uint32_t m = J; m; m &= m - 1) {
    const int b = std::countr_zero(m);
    inv += std::popcount(I >> (b + 1));
  }
  return (inv & 1) ? -1 : 1;
}

inline int metric_delta_mask(std::uint32_t I, const Signature& sig) {
  return (std::popcount(I & sig.temporal_mask()) & 1) ? -1 : 1;
}

int sigma(const IndexList& I, const IndexList& J);
int sigma(const IndexList& I, const IndexList& J, const Signature& sig);
IndexList epsilon(const IndexList& I, const IndexList& J);
IndexList complement(const IndexList& I, const Signature& sig);
int metric_delta(const IndexList& I, const Signature& sig);
std::vector<IndexList> enumerate_grade(int s, const Signature& sig);

long long binomial(int n, int k);

// Lexicographic basis tables for one dimension d.
struct GradeTable {
  int d = 0;
  std::vector<std::vector<std::uint32_t>> masks;  // masks[s] in storage order
  std::vector<std::int32_t> position;             // position[mask] within its grade
};

const GradeTable& grade_table(int d);

inline const std::vector<std::uint32_t>& grade_masks(const Signature& sig, int s) {
  return grade_table(sig.d()).masks[static_cast<std::size_t>(s)];
}

inline std::size_t grade_position(const Signature& sig, std::uint32_t mask) {
  return static_cast<std::size_t>(grade_table(sig.d()).position[mask]);
}

void check_index_list(const IndexList& I, const Signature& sig);

}  // namespace rvf
