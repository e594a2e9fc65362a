#pragma once

#include <complex>
#include <vector>

#include "rvfield/index_algebra.hpp"

namespace rvf {

using cplx = std::complex<double>;

// Grade-s element with one complex coefficient per IndexList of length s,
// in enumerate_grade order.
class Multivector {
 public:
  Multivector() = default;
  Multivector(Signature sig, int grade);
  Multivector(Signature sig, int grade, std::vector<cplx> coeffs);

  static Multivector blade(Signature sig, const IndexList& I, cplx c = 1.0);
  static Multivector vector(Signature sig, const std::vector<double>& comps);
  static Multivector vector(Signature sig, const std::vector<cplx>& comps);
  static Multivector scalar(Signature sig, cplx c);

  const Signature& sig() const { return sig_; }
  int grade() const { return grade_; }
  std::size_t size() const { return c_.size(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<std::uint32_t>& masks() const { return grade_masks(sig_, grade_); }

  cplx& operator[](std::size_t p) { return c_[p]; }
  const cplx& operator[](std::size_t p) const { return c_[p]; }
  cplx at(const IndexList& I) const;
  void set(const IndexList& I, cplx v);

  Multivector conj() const;
  double norm() const;     // Euclidean, sqrt(sum |c|^2)
  double max_abs() const;
  double max_imag() const;
  bool is_zero() const;

  Multivector& operator+=(const Multivector& o);
  Multivector& operator-=(const Multivector& o);
  Multivector& operator*=(cplx s);

 private:
  Signature sig_;
  int grade_ = 0;
  std::vector<cplx> c_{cplx{}};
};

Multivector operator+(Multivector a, const Multivector& b);
Multivector operator-(Multivector a, const Multivector& b);
Multivector operator-(Multivector a);
Multivector operator*(cplx s, Multivector a);
Multivector operator*(Multivector a, cplx s);

// e_I ^ e_J = sigma(I,J) e_eps(I,J)
Multivector wedge(const Multivector& a, const Multivector& b);
// sum_I Delta_II a_I b_I, no conjugation; 0 across grades
cplx dot(const Multivector& a, const Multivector& b);
// e_J _| e_I = Delta_JJ sigma(I\J, J) e_{I\J} for J in I
Multivector left_interior(const Multivector& a, const Multivector& b);
// w |_ v = (-1)^{gr v (gr w + gr v)} v _| w
Multivector right_interior(const Multivector& a, const Multivector& b);

// Same blade rules with every Delta replaced by +1.
Multivector euclidean_left_interior(const Multivector& a, const Multivector& b);

// d real coordinates
struct SpacetimePoint {
  std::vector<double> x;
  Multivector as_vector(const Signature& sig) const;
};

}  // namespace rvf
