#pragma once

#include <vector>

#include "rvfield/multivector.hpp"

namespace rvf {

// Components over w_ij = e_i (x) e_j, row-major d x d.
class Rank2Tensor {
 public:
  Rank2Tensor() = default;
  explicit Rank2Tensor(Signature sig);

  const Signature& sig() const { return sig_; }
  int d() const { return sig_.d(); }
  cplx& operator()(int i, int j) { return c_[static_cast<std::size_t>(i * d() + j)]; }
  const cplx& operator()(int i, int j) const { return c_[static_cast<std::size_t>(i * d() + j)]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  Rank2Tensor transpose() const;
  double max_abs() const;
  double asymmetry() const;  // max |T_ij - T_ji|

  Rank2Tensor& operator+=(const Rank2Tensor& o);
  Rank2Tensor& operator*=(cplx s);

 private:
  Signature sig_;
  std::vector<cplx> c_;
};

Rank2Tensor operator+(Rank2Tensor a, const Rank2Tensor& b);
Rank2Tensor operator-(Rank2Tensor a, const Rank2Tensor& b);
Rank2Tensor operator*(cplx s, Rank2Tensor a);

// u_I = sum over orderings of I of w_{I^pi}; u_(a,b) = w_ab + w_ba, u_(a,a) = 2 w_aa
Rank2Tensor sym_basis(const Signature& sig, const SymIndexList& I);

// Components over w_{i,I}, I in enumerate_grade(2); comps[i * C(d,2) + pos(I)].
class Rank3MomentTensor {
 public:
  Rank3MomentTensor() = default;
  explicit Rank3MomentTensor(Signature sig);

  const Signature& sig() const { return sig_; }
  std::size_t pairs() const { return pairs_; }
  cplx& operator()(int i, std::size_t I) { return c_[static_cast<std::size_t>(i) * pairs_ + I]; }
  const cplx& operator()(int i, std::size_t I) const {
    return c_[static_cast<std::size_t>(i) * pairs_ + I];
  }
  cplx at(int i, const IndexList& I) const;
  void set(int i, const IndexList& I, cplx v);
  const std::vector<cplx>& coeffs() const { return c_; }
  double max_abs() const;

  Rank3MomentTensor& operator+=(const Rank3MomentTensor& o);

 private:
  Signature sig_;
  std::size_t pairs_ = 0;
  std::vector<cplx> c_;
};

// (a odot b)_ij = (D_ii e_i _| a) . (b |_ D_jj e_j)
Rank2Tensor odot(const Multivector& a, const Multivector& b);
// (a owedge b)_ij = (D_ii e_i ^ a) . (b ^ D_jj e_j)
Rank2Tensor owedge(const Multivector& a, const Multivector& b);

// -1/2 (F odot F + F owedge F)
Rank2Tensor stress_tensor(const Multivector& F);
// Explicit diagonal and off-diagonal component sums.
Rank2Tensor stress_components(const Multivector& F);

// M = sum_{i,j,l} v_i S_jl sigma(i,l) w_{j, eps(i,l)}
Rank3MomentTensor boxwedge(const Multivector& v, const Rank2Tensor& S);

// sum_I D_mm M[m][I] e_I
Multivector contract_first(int m, const Rank3MomentTensor& M);

}  // namespace rvf
