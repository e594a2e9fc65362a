#include "rvfield/index_algebra.hpp"

#include <array>
#include <memory>
#include <mutex>

namespace rvf {

Signature::Signature(int k_, int n_) : k(k_), n(n_) {
  if (k < 0 || n < 0 || k + n < 1)
    throw DomainError("signature: need k >= 0, n >= 0, k + n >= 1");
  if (k + n > kMaxDim) throw DomainError("signature: dimension above 16 is not supported");
}

std::string Signature::str() const {
  return "(" + std::to_string(k) + "," + std::to_string(n) + ")";
}

namespace {

std::uint32_t mask_from(const int* b, const int* e) {
  std::uint32_t m = 0;
  int prev = -1;
  for (const int* p = b; p != e; ++p) {
    if (*p < 0 || *p >= kMaxDim) throw DomainError("index list: index out of range");
    if (*p <= prev) throw DomainError("index list: entries must be strictly increasing");
    m |= std::uint32_t{1} << *p;
    prev = *p;
  }
  return m;
}

}  // namespace

IndexList::IndexList(std::initializer_list<int> idx) : mask_(mask_from(idx.begin(), idx.end())) {}

IndexList::IndexList(const std::vector<int>& idx)
    : mask_(mask_from(idx.data(), idx.data() + idx.size())) {}

std::vector<int> IndexList::indices() const {
  std::vector<int> out;
  for (std::uint32_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::string IndexList::str() const {
  std::string s = "(";
  bool first = true;
  for (int i : indices()) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + ")";
}

bool operator<(const IndexList& a, const IndexList& b) {
  const auto x = a.indices();
  const auto y = b.indices();
  return x < y;
}

SymIndexList::SymIndexList(std::initializer_list<int> idx) : SymIndexList(std::vector<int>(idx)) {}

SymIndexList::SymIndexList(std::vector<int> idx) : idx_(std::move(idx)) {
  for (std::size_t p = 0; p < idx_.size(); ++p) {
    if (idx_[p] < 0 || idx_[p] >= kMaxDim) throw DomainError("sym index list: index out of range");
    if (p > 0 && idx_[p] < idx_[p - 1])
      throw DomainError("sym index list: entries must be non-decreasing");
  }
}

void check_index_list(const IndexList& I, const Signature& sig) {
  if (I.mask() >> sig.d()) throw DomainError("index " + I.str() + " out of range for d=" +
                                             std::to_string(sig.d()));
}

int sigma(const IndexList& I, const IndexList& J) { return sigma_mask(I.mask(), J.mask()); }

int sigma(const IndexList& I, const IndexList& J, const Signature& sig) {
  check_index_list(I, sig);
  check_index_list(J, sig);
  return sigma_mask(I.mask(), J.mask());
}

IndexList epsilon(const IndexList& I, const IndexList& J) {
  if (I.mask() & J.mask()) throw DomainError("epsilon: lists " + I.str() + " and " + J.str() +
                                             " are not disjoint");
  return IndexList::from_mask(I.mask() | J.mask());
}

IndexList complement(const IndexList& I, const Signature& sig) {
  check_index_list(I, sig);
  const std::uint32_t full = (std::uint32_t{1} << sig.d()) - 1u;
  return IndexList::from_mask(full & ~I.mask());
}

int metric_delta(const IndexList& I, const Signature& sig) {
  check_index_list(I, sig);
  return metric_delta_mask(I.mask(), sig);
}

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

void lex_combos(int d, int s, int start, std::uint32_t acc, std::vector<std::uint32_t>& out) {
  if (s == 0) {
    out.push_back(acc);
    return;
  }
  for (int i = start; i <= d - s; ++i) lex_combos(d, s - 1, i + 1, acc | (std::uint32_t{1} << i), out);
}

std::unique_ptr<GradeTable> build_table(int d) {
  auto t = std::make_unique<GradeTable>();
  t->d = d;
  t->masks.resize(static_cast<std::size_t>(d) + 1);
  t->position.assign(std::size_t{1} << d, -1);
  for (int s = 0; s <= d; ++s) {
    lex_combos(d, s, 0, 0, t->masks[s]);
    for (std::size_t p = 0; p < t->masks[s].size(); ++p)
      t->position[t->masks[s][p]] = static_cast<std::int32_t>(p);
  }
  return t;
}

}  // namespace

const GradeTable& grade_table(int d) {
  static std::array<std::unique_ptr<GradeTable>, kMaxDim + 1> tables;
  static std::array<std::once_flag, kMaxDim + 1> flags;
  if (d < 1 || d > kMaxDim) throw DomainError("grade table: dimension out of range");
  std::call_once(flags[d], [d] { tables[d] = build_table(d); });
  return *tables[d];
}

std::vector<IndexList> enumerate_grade(int s, const Signature& sig) {
  if (s < 0 || s > sig.d()) throw DomainError("enumerate_grade: grade out of range");
  std::vector<IndexList> out;
  for (std::uint32_t m : grade_masks(sig, s)) out.push_back(IndexList::from_mask(m));
  return out;
}

}  // namespace rvf
