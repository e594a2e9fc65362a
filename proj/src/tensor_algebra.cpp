#include "rvfield/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace rvf {

Rank2Tensor::Rank2Tensor(Signature sig)
    : sig_(sig), c_(static_cast<std::size_t>(sig.d() * sig.d()), cplx{}) {}

Rank2Tensor Rank2Tensor::transpose() const {
  Rank2Tensor t(sig_);
  for (int i = 0; i < d(); ++i)
    for (int j = 0; j < d(); ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Rank2Tensor::max_abs() const {
  double m = 0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Rank2Tensor::asymmetry() const {
  double m = 0;
  for (int i = 0; i < d(); ++i)
    for (int j = i + 1; j < d(); ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

Rank2Tensor& Rank2Tensor::operator+=(const Rank2Tensor& o) {
  if (!(o.sig_ == sig_)) throw DomainError("rank-2 add: signature mismatch");
  for (std::size_t p = 0; p < c_.size(); ++p) c_[p] += o.c_[p];
  return *this;
}

Rank2Tensor& Rank2Tensor::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Rank2Tensor operator+(Rank2Tensor a, const Rank2Tensor& b) { return a += b; }
Rank2Tensor operator-(Rank2Tensor a, const Rank2Tensor& b) { return a += (-1.0) * b; }
Rank2Tensor operator*(cplx s, Rank2Tensor a) { return a *= s; }

Rank2Tensor sym_basis(const Signature& sig, const SymIndexList& I) {
  if (I.size() != 2) throw DomainError("sym_basis: rank-2 needs a list of length 2");
  const int a = I.indices()[0];
  const int b = I.indices()[1];
  if (b >= sig.d()) throw DomainError("sym_basis: index out of range");
  Rank2Tensor t(sig);
  t(a, b) += 1.0;
  t(b, a) += 1.0;
  return t;
}

Rank3MomentTensor::Rank3MomentTensor(Signature sig)
    : sig_(sig),
      pairs_(static_cast<std::size_t>(binomial(sig.d(), 2))),
      c_(static_cast<std::size_t>(sig.d()) * pairs_, cplx{}) {}

cplx Rank3MomentTensor::at(int i, const IndexList& I) const {
  check_index_list(I, sig_);
  if (I.size() != 2 || i < 0 || i >= sig_.d()) throw DomainError("moment tensor: bad slot");
  return (*this)(i, grade_position(sig_, I.mask()));
}

void Rank3MomentTensor::set(int i, const IndexList& I, cplx v) {
  check_index_list(I, sig_);
  if (I.size() != 2 || i < 0 || i >= sig_.d()) throw DomainError("moment tensor: bad slot");
  (*this)(i, grade_position(sig_, I.mask())) = v;
}

double Rank3MomentTensor::max_abs() const {
  double m = 0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

Rank3MomentTensor& Rank3MomentTensor::operator+=(const Rank3MomentTensor& o) {
  if (!(o.sig_ == sig_)) throw DomainError("rank-3 add: signature mismatch");
  for (std::size_t p = 0; p < c_.size(); ++p) c_[p] += o.c_[p];
  return *this;
}

namespace {

void check_pair(const Multivector& a, const Multivector& b, const char* op) {
  if (!(a.sig() == b.sig())) throw DomainError(std::string(op) + ": signature mismatch");
  if (a.grade() != b.grade()) throw DomainError(std::string(op) + ": grade mismatch");
  if (a.grade() < 1) throw DomainError(std::string(op) + ": grade must be >= 1");
}

}  // namespace

Rank2Tensor odot(const Multivector& a, const Multivector& b) {
  check_pair(a, b, "odot");
  const Signature& sig = a.sig();
  const int d = sig.d();
  std::vector<Multivector> u, v;
  u.reserve(d);
  v.reserve(d);
  for (int i = 0; i < d; ++i) {
    const Multivector ei = Multivector::blade(sig, IndexList{i}, static_cast<double>(sig.delta(i)));
    u.push_back(left_interior(ei, a));
    v.push_back(right_interior(b, ei));
  }
  Rank2Tensor t(sig);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = dot(u[i], v[j]);
  return t;
}

Rank2Tensor owedge(const Multivector& a, const Multivector& b) {
  check_pair(a, b, "owedge");
  const Signature& sig = a.sig();
  const int d = sig.d();
  Rank2Tensor t(sig);
  if (a.grade() == d) return t;  // e_i ^ a vanishes for every i
  std::vector<Multivector> u, v;
  for (int i = 0; i < d; ++i) {
    const Multivector ei = Multivector::blade(sig, IndexList{i}, static_cast<double>(sig.delta(i)));
    u.push_back(wedge(ei, a));
    v.push_back(wedge(b, ei));
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = dot(u[i], v[j]);
  return t;
}

Rank2Tensor stress_tensor(const Multivector& F) {
  Rank2Tensor t = odot(F, F) + owedge(F, F);
  return t *= -0.5;
}

Rank2Tensor stress_components(const Multivector& F) {
  const Signature& sig = F.sig();
  const int d = sig.d();
  const int r = F.grade();
  if (r < 1) throw DomainError("stress_components: grade must be >= 1");
  Rank2Tensor t(sig);
  const auto& fm = F.masks();

  const double pref = ((r - 1) & 1) ? -0.5 : 0.5;
  for (int i = 0; i < d; ++i) {
    cplx without{}, with{};
    for (std::size_t p = 0; p < fm.size(); ++p) {
      const cplx term = static_cast<double>(metric_delta_mask(fm[p], sig)) * F[p] * F[p];
      if ((fm[p] >> i) & 1u)
        with += term;
      else
        without += term;
    }
    t(i, i) = pref * sig.delta(i) * (without - with);
  }

  const auto& lm = grade_masks(sig, r - 1);
  for (int i = 0; i < d; ++i) {
    const std::uint32_t bi = std::uint32_t{1} << i;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const std::uint32_t bj = std::uint32_t{1} << j;
      cplx s{};
      for (std::uint32_t L : lm) {
        if (L & (bi | bj)) continue;
        const int sg = metric_delta_mask(L, sig) * sigma_mask(L, bi) * sigma_mask(bj, L);
        s += static_cast<double>(sg) * F[grade_position(sig, L | bi)] * F[grade_position(sig, L | bj)];
      }
      t(i, j) = -s;
    }
  }
  return t;
}

Rank3MomentTensor boxwedge(const Multivector& v, const Rank2Tensor& S) {
  if (v.grade() != 1) throw DomainError("boxwedge: first argument must be grade 1");
  if (!(v.sig() == S.sig())) throw DomainError("boxwedge: signature mismatch");
  if (S.asymmetry() > 1e-12 * std::max(1.0, S.max_abs()))
    throw DomainError("boxwedge: tensor is not symmetric");
  const Signature& sig = v.sig();
  const int d = sig.d();
  Rank3MomentTensor M(sig);
  for (int i = 0; i < d; ++i) {
    if (v[i] == cplx{}) continue;
    for (int l = 0; l < d; ++l) {
      if (l == i) continue;
      const double s = sigma_mask(std::uint32_t{1} << i, std::uint32_t{1} << l);
      const std::size_t I = grade_position(sig, (std::uint32_t{1} << i) | (std::uint32_t{1} << l));
      for (int j = 0; j < d; ++j) M(j, I) += s * v[i] * S(j, l);
    }
  }
  return M;
}

Multivector contract_first(int m, const Rank3MomentTensor& M) {
  const Signature& sig = M.sig();
  if (m < 0 || m >= sig.d()) throw DomainError("contract_first: index out of range");
  Multivector out(sig, 2);
  for (std::size_t I = 0; I < M.pairs(); ++I) out[I] = static_cast<double>(sig.delta(m)) * M(m, I);
  return out;
}

}  // namespace rvf
