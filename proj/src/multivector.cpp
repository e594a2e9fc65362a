#include "rvfield/multivector.hpp"

#include <algorithm>
#include <cmath>

namespace rvf {

namespace {

void check_grade(const Signature& sig, int s) {
  if (s < 0 || s > sig.d())
    throw DomainError("multivector: grade " + std::to_string(s) + " out of range for d=" +
                      std::to_string(sig.d()));
}

void check_same_sig(const Multivector& a, const Multivector& b, const char* op) {
  if (!(a.sig() == b.sig())) throw DomainError(std::string(op) + ": signature mismatch");
}

}  // namespace

Multivector::Multivector(Signature sig, int grade) : sig_(sig), grade_(grade) {
  check_grade(sig, grade);
  c_.assign(static_cast<std::size_t>(binomial(sig.d(), grade)), cplx{});
}

Multivector::Multivector(Signature sig, int grade, std::vector<cplx> coeffs)
    : sig_(sig), grade_(grade), c_(std::move(coeffs)) {
  check_grade(sig, grade);
  if (static_cast<long long>(c_.size()) != binomial(sig.d(), grade))
    throw DomainError("multivector: coefficient count does not match C(d,s)");
}

Multivector Multivector::blade(Signature sig, const IndexList& I, cplx c) {
  check_index_list(I, sig);
  Multivector m(sig, I.size());
  m[grade_position(sig, I.mask())] = c;
  return m;
}

Multivector Multivector::vector(Signature sig, const std::vector<double>& comps) {
  return vector(sig, std::vector<cplx>(comps.begin(), comps.end()));
}

Multivector Multivector::vector(Signature sig, const std::vector<cplx>& comps) {
  if (static_cast<int>(comps.size()) != sig.d()) throw DomainError("vector: need d components");
  return Multivector(sig, 1, comps);
}

Multivector Multivector::scalar(Signature sig, cplx c) { return Multivector(sig, 0, {c}); }

cplx Multivector::at(const IndexList& I) const {
  check_index_list(I, sig_);
  if (I.size() != grade_) return {};
  return c_[grade_position(sig_, I.mask())];
}

void Multivector::set(const IndexList& I, cplx v) {
  check_index_list(I, sig_);
  if (I.size() != grade_) throw DomainError("multivector: list " + I.str() + " has wrong grade");
  c_[grade_position(sig_, I.mask())] = v;
}

Multivector Multivector::conj() const {
  Multivector r = *this;
  for (auto& v : r.c_) v = std::conj(v);
  return r;
}

double Multivector::norm() const {
  double s = 0;
  for (const auto& v : c_) s += std::norm(v);
  return std::sqrt(s);
}

double Multivector::max_abs() const {
  double m = 0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Multivector::max_imag() const {
  double m = 0;
  for (const auto& v : c_) m = std::max(m, std::abs(v.imag()));
  return m;
}

bool Multivector::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](cplx v) { return v == cplx{}; });
}

Multivector& Multivector::operator+=(const Multivector& o) {
  check_same_sig(*this, o, "add");
  if (o.grade_ != grade_) throw DomainError("add: grade mismatch");
  for (std::size_t p = 0; p < c_.size(); ++p) c_[p] += o.c_[p];
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& o) {
  check_same_sig(*this, o, "sub");
  if (o.grade_ != grade_) throw DomainError("sub: grade mismatch");
  for (std::size_t p = 0; p < c_.size(); ++p) c_[p] -= o.c_[p];
  return *this;
}

Multivector& Multivector::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
Multivector operator-(Multivector a) { return a *= -1.0; }
Multivector operator*(cplx s, Multivector a) { return a *= s; }
Multivector operator*(Multivector a, cplx s) { return a *= s; }

Multivector wedge(const Multivector& a, const Multivector& b) {
  check_same_sig(a, b, "wedge");
  const Signature& sig = a.sig();
  const int g = a.grade() + b.grade();
  if (g > sig.d())
    throw DomainError("wedge: grade " + std::to_string(g) + " exceeds d=" + std::to_string(sig.d()));
  Multivector out(sig, g);
  const auto& ma = a.masks();
  const auto& mb = b.masks();
  for (std::size_t p = 0; p < ma.size(); ++p) {
    if (a[p] == cplx{}) continue;
    for (std::size_t q = 0; q < mb.size(); ++q) {
      const int s = sigma_mask(ma[p], mb[q]);
      if (s == 0 || b[q] == cplx{}) continue;
      out[grade_position(sig, ma[p] | mb[q])] += static_cast<double>(s) * a[p] * b[q];
    }
  }
  return out;
}

cplx dot(const Multivector& a, const Multivector& b) {
  check_same_sig(a, b, "dot");
  if (a.grade() != b.grade()) return {};
  const auto& m = a.masks();
  cplx s{};
  for (std::size_t p = 0; p < m.size(); ++p)
    s += static_cast<double>(metric_delta_mask(m[p], a.sig())) * a[p] * b[p];
  return s;
}

namespace {

Multivector interior_impl(const Multivector& a, const Multivector& b, bool metric, const char* op) {
  check_same_sig(a, b, op);
  if (a.grade() > b.grade()) throw DomainError(std::string(op) + ": grade of a exceeds grade of b");
  const Signature& sig = a.sig();
  Multivector out(sig, b.grade() - a.grade());
  const auto& ma = a.masks();
  const auto& mb = b.masks();
  for (std::size_t p = 0; p < ma.size(); ++p) {
    if (a[p] == cplx{}) continue;
    const std::uint32_t J = ma[p];
    const double dj = metric ? metric_delta_mask(J, sig) : 1.0;
    for (std::size_t q = 0; q < mb.size(); ++q) {
      const std::uint32_t I = mb[q];
      if ((I & J) != J || b[q] == cplx{}) continue;
      const std::uint32_t R = I & ~J;
      out[grade_position(sig, R)] += dj * sigma_mask(R, J) * a[p] * b[q];
    }
  }
  return out;
}

}  // namespace

Multivector left_interior(const Multivector& a, const Multivector& b) {
  return interior_impl(a, b, true, "left_interior");
}

Multivector euclidean_left_interior(const Multivector& a, const Multivector& b) {
  return interior_impl(a, b, false, "euclidean_left_interior");
}

Multivector right_interior(const Multivector& a, const Multivector& b) {
  if (b.grade() > a.grade()) throw DomainError("right_interior: grade of b exceeds grade of a");
  Multivector r = left_interior(b, a);
  if ((b.grade() * (a.grade() + b.grade())) & 1) r *= -1.0;
  return r;
}

Multivector SpacetimePoint::as_vector(const Signature& sig) const {
  return Multivector::vector(sig, x);
}

}  // namespace rvf
