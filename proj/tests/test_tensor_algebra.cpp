#include <doctest.h>

#include "rvfield/checks.hpp"

using namespace rvf;

namespace {

const Signature kMink(1, 3);

Multivector e(std::initializer_list<int> idx, cplx c = 1.0) { return Multivector::blade(kMink, IndexList(idx), c); }

}  // namespace

TEST_CASE("odot examples") {
  Rng rng(3);
  const Multivector a = random_multivector(rng, kMink, 1), b = random_multivector(rng, kMink, 1);
  const Rank2Tensor t = odot(a, b);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(t(i, j) - a[i] * b[j]) < 1e-15);
  // e0 _| e01 = e1 and e01 |_ e0 = -e1
  CHECK(odot(e({0, 1}), e({0, 1}))(0, 0) == cplx(-1.0));
  CHECK(odot(a, Multivector(kMink, 1)).max_abs() == 0.0);
  CHECK_THROWS_AS(odot(e({0}), e({0, 1})), DomainError);
  CHECK_THROWS_AS(odot(Multivector::scalar(kMink, 1.0), Multivector::scalar(kMink, 1.0)), DomainError);
}

TEST_CASE("owedge examples") {
  // (e2 ^ e1).(e1 ^ e2) = -e12.e12
  CHECK(owedge(e({1}), e({1}))(2, 2) == cplx(-1.0));
  const Multivector top = e({0, 1, 2, 3});
  CHECK(owedge(top, top).max_abs() == 0.0);
  Rng rng(4);
  CHECK(owedge(random_multivector(rng, kMink, 2), Multivector(kMink, 2)).max_abs() == 0.0);
}

TEST_CASE("odot + owedge is symmetric") {
  Rng rng(5);
  for (int d = 2; d <= 6; ++d)
    for (int r = 1; r <= d; ++r) REQUIRE(check_odot_owedge_symmetry(rng, Signature(1, d - 1), r, 30).max_rel < 1e-12);
}

TEST_CASE("stress tensor examples") {
  const Rank2Tensor t = stress_tensor(e({0, 1}));
  CHECK(t(0, 0) == cplx(0.5));
  const Rank2Tensor p = stress_tensor(e({0, 1}) + e({1, 2}));
  CHECK(p(0, 2) == cplx(-1.0));
  CHECK(p(2, 0) == cplx(-1.0));
  CHECK(stress_tensor(Multivector(kMink, 2)).max_abs() == 0.0);
  CHECK(stress_components(Multivector(kMink, 2)).max_abs() == 0.0);
  const Rank2Tensor c = stress_components(e({0, 1}));
  CHECK(std::abs(c(1, 1) - t(1, 1)) == 0.0);
  CHECK(c(1, 1) == cplx(-0.5));
}

TEST_CASE("stress tensor against frozen reference values") {
  // (1,3), complex F
  Multivector F(kMink, 2, {cplx(0.3, -0.1), -0.7, cplx(0.2, 0.5), 1.1, cplx(0.0, -0.4), 0.25});
  const double ref[4][8] = {
      {0.73625000000000007, 0.070000000000000007, -0.57000000000000006, -0.080000000000000016, -0.28000000000000003,
       0.23500000000000001, 0.215, 0.12},
      {-0.57000000000000006, -0.080000000000000016, 0.59375, 0.13, 0.20999999999999999, -0.16999999999999998,
       -0.38500000000000001, -0.13},
      {-0.28000000000000003, 0.23500000000000001, 0.20999999999999999, -0.16999999999999998, 0.40625000000000011,
       0.070000000000000007, 0.13999999999999999, -0.09000000000000008},
      {0.215, 0.12, -0.38500000000000001, -0.13, 0.13999999999999999, -0.09000000000000008, -0.26375000000000015,
       -0.13}};
  const Rank2Tensor a = stress_tensor(F), b = stress_components(F);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const cplx want(ref[i][2 * j], ref[i][2 * j + 1]);
      CHECK(std::abs(a(i, j) - want) < 1e-14);
      CHECK(std::abs(b(i, j) - want) < 1e-14);
    }

  // (2,3), grade 3
  const Signature s23(2, 3);
  Multivector G(s23, 3);
  G.set({0, 1, 2}, 0.5);
  G.set({0, 3, 4}, cplx(-0.25, 0.5));
  G.set({1, 2, 4}, 0.75);
  G.set({2, 3, 4}, -1.0);
  G.set({0, 2, 3}, cplx(0.0, 0.125));
  const double ref2[5][10] = {{0.0078125, 0.125, 0, 0, -0.25, 0.5, 0, 0, 0.375, 0.125},
                              {0, 0, -0.7578125, -0.125, 0, 0, -0.75, -0.0625, 0, 0},
                              {-0.25, 0.5, 0, 0, -0.2578125, 0.125, 0, 0, 0.0625, 0.03125},
                              {0, 0, -0.75, -0.0625, 0, 0, -0.7578125, -0.125, 0, 0},
                              {0.375, 0.125, 0, 0, 0.0625, 0.03125, 0, 0, -0.1796875, -0.125}};
  const Rank2Tensor g = stress_tensor(G), h = stress_components(G);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const cplx want(ref2[i][2 * j], ref2[i][2 * j + 1]);
      CHECK(std::abs(g(i, j) - want) < 1e-14);
      CHECK(std::abs(h(i, j) - want) < 1e-14);
    }
}

TEST_CASE("stress tensor mutual oracle and Poynting") {
  Rng rng(6);
  for (int d = 2; d <= 6; ++d)
    for (int k = 0; k <= 2 && k <= d; ++k)
      for (int r = 1; r <= std::min(3, d); ++r)
        REQUIRE(check_stress_oracle(rng, Signature(k, d - k), r, 20).max_rel < 1e-12);
  CHECK(check_poynting(rng, 100).max_rel < 1e-12);
}

TEST_CASE("boxwedge examples") {
  const Rank3MomentTensor M = boxwedge(e({0}), sym_basis(kMink, SymIndexList{1, 2}));
  Rank3MomentTensor want(kMink);
  want.set(1, {0, 2}, 1.0);
  want.set(2, {0, 1}, 1.0);
  for (std::size_t p = 0; p < M.coeffs().size(); ++p) CHECK(M.coeffs()[p] == want.coeffs()[p]);
  CHECK(boxwedge(e({1}), sym_basis(kMink, SymIndexList{1, 1})).max_abs() == 0.0);
  CHECK(boxwedge(e({0}), sym_basis(kMink, SymIndexList{0, 0})).max_abs() == 0.0);

  Rank2Tensor asym(kMink);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(boxwedge(e({0}), asym), DomainError);
  CHECK_THROWS_AS(boxwedge(e({0, 1}), sym_basis(kMink, SymIndexList{1, 2})), DomainError);
}

TEST_CASE("boxwedge is bilinear") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Multivector u = random_multivector(rng, kMink, 1), v = random_multivector(rng, kMink, 1);
    const Multivector F = random_multivector(rng, kMink, 2), G = random_multivector(rng, kMink, 2);
    const Rank2Tensor S = stress_tensor(F), T = stress_tensor(G);
    const cplx a(0.3, -1.2);
    const Rank3MomentTensor lhs = boxwedge(u + a * v, S);
    const Rank3MomentTensor l1 = boxwedge(u, S), l2 = boxwedge(v, S);
    for (std::size_t p = 0; p < lhs.coeffs().size(); ++p)
      REQUIRE(std::abs(lhs.coeffs()[p] - l1.coeffs()[p] - a * l2.coeffs()[p]) < 1e-13);
    const Rank3MomentTensor rhs = boxwedge(u, S + a * T);
    const Rank3MomentTensor r2 = boxwedge(u, T);
    for (std::size_t p = 0; p < rhs.coeffs().size(); ++p)
      REQUIRE(std::abs(rhs.coeffs()[p] - l1.coeffs()[p] - a * r2.coeffs()[p]) < 1e-13);
  }
}

TEST_CASE("contract_first examples") {
  Rank3MomentTensor M(kMink);
  M.set(0, {1, 2}, 1.0);
  CHECK((contract_first(0, M) - e({1, 2}, -1.0)).max_abs() == 0.0);
  CHECK(contract_first(1, M).is_zero());
  CHECK(contract_first(2, Rank3MomentTensor(kMink)).is_zero());
  CHECK_THROWS_AS(contract_first(4, M), DomainError);
}

TEST_CASE("sym_basis") {
  const Rank2Tensor u = sym_basis(kMink, SymIndexList{1, 2});
  CHECK(u(1, 2) == cplx(1.0));
  CHECK(u(2, 1) == cplx(1.0));
  CHECK(sym_basis(kMink, SymIndexList{3, 3})(3, 3) == cplx(2.0));
  CHECK_THROWS_AS(sym_basis(kMink, SymIndexList{1}), DomainError);
}
