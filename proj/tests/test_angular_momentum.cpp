#include <doctest.h>

#include <cmath>

#include "rvfield/checks.hpp"

using namespace rvf;

namespace {

const Signature kMink(1, 3);

Multivector vec(std::initializer_list<cplx> c) { return Multivector(kMink, 1, std::vector<cplx>(c)); }

ModeSet single(const std::vector<double>& xb, double w, const Multivector& amp, int r = 2) {
  ModeSet ms;
  ms.sig = amp.sig();
  ms.r = r;
  ms.modes.push_back(Mode{xb, w, amp, {}, 0.0});
  return ms;
}

// same two modes as the oracle script
ModeSet two_modes() {
  ModeSet ms = single({0.0, 0.2, -0.1, 0.9}, 0.03,
                      vec({0.0, cplx(0.4, 0.3), cplx(-0.2, 0.1), cplx(-0.11111111111111113, -0.055555555555555552)}));
  ms.modes.push_back(Mode{{0.0, -0.5, 0.3, 0.4}, 0.05,
                          vec({0.0, cplx(0.0, 0.1), 0.6, cplx(-0.44999999999999996, 0.125)}), {}, 0.0});
  return ms;
}

ModeSet default_packet(int points = 8) {
  GaussianPacketSpec spec;
  spec.center = {0.15, -0.1, 1.0};
  spec.spread = 0.1;
  spec.seed = vec({0.0, 1.0, cplx(0.0, -1.0), cplx(0.3, 0.2)});
  spec.grid.assign(3, GridAxis{0.4, points});
  return make_gaussian_packet(spec, 0);
}

Lattice lattice(const ModeSet& ms, double spread, int points) {
  (void)ms;
  const double sx = 1.0 / (2.0 * M_PI * spread);
  return Lattice{{0.0, 0.0, 0.0}, std::vector<double>(3, 6.0 * sx), std::vector<int>(3, points)};
}

}  // namespace

TEST_CASE("frozen Pi and S") {
  const ModeSet ms = two_modes();
  const double pi[4] = {0.76724751065227759, -0.37015998100510922, 0.22612443557668077, 0.50963567440569491};
  const Multivector p = pi_flux(ms);
  for (int t = 0; t < 4; ++t) CHECK(std::abs(p[t] - pi[t]) < 1e-14);
  CHECK(std::abs(s_component(ms, IndexList{1, 2}) - -0.0063312987422220086) < 1e-16);
  CHECK(std::abs(s_component(ms, IndexList{1, 3}) - 0.022251417542460222) < 1e-16);
  CHECK(std::abs(s_component(ms, IndexList{2, 3}) - 0.037838510677682895) < 1e-16);
  const Multivector s = spin_flux(ms);
  CHECK(std::abs(s.at({1, 2}) - -0.0063312987422220086) < 1e-16);
  CHECK(std::abs(s.at({2, 3}) - 0.037838510677682895) < 1e-16);
  CHECK(std::abs(s.at({0, 1})) == 0.0);
}

TEST_CASE("Pi for single modes") {
  const Multivector amp = vec({0.0, cplx(0.6, -0.2), 0.5, 0.0});
  const ModeSet ms = single({0.0, 0.3, -0.4, 0.0}, 0.2, amp);
  const double chi = 0.5;
  const double norm2 = 0.36 + 0.04 + 0.25;
  const double xp[4] = {chi, 0.3, -0.4, 0.0};
  const Multivector p = pi_flux(ms);
  for (int t = 0; t < 4; ++t) CHECK(std::abs(p[t] - 4 * M_PI * M_PI * 0.2 / (2 * chi) * xp[t] * norm2) < 1e-14);

  ModeSet empty = ms;
  empty.modes.clear();
  CHECK(pi_flux(empty).is_zero());

  // r = 3 in (1,4): same magnitude formula with the opposite sign
  const Signature s14(1, 4);
  const std::vector<double> xb{0.0, 0.0, 0.6, 0.0, 0.8};
  Multivector a3(s14, 2);
  a3.set({1, 2}, 0.7);
  a3.set({1, 3}, cplx(0.0, 0.4));
  a3.set({3, 4}, -0.2);
  a3 = coulomb_project(a3, xi_plus(xb, 0, s14), 0);
  const ModeSet m3 = single(xb, 0.1, a3, 3);
  double n3 = 0.0;
  for (std::size_t q = 0; q < a3.size(); ++q) n3 += std::norm(a3[q]);
  const Multivector p3 = pi_flux(m3);
  const double chi3 = 1.0;
  for (int t = 0; t < 5; ++t) {
    const double xt = t == 0 ? chi3 : xb[t];
    CHECK(std::abs(p3[t] + 4 * M_PI * M_PI * 0.1 / (2 * chi3) * xt * n3) < 1e-14);
  }
}

TEST_CASE("spin of circular and linear modes") {
  const double g = 0.8, w = 0.05, chi = 2.0;
  const ModeSet right = single({0, 0, 0, chi}, w, vec({0, g / std::sqrt(2.0), cplx(0, -g / std::sqrt(2.0)), 0}));
  const double want = -2 * M_PI * w * g * g / (2 * chi);
  const Multivector s = spin_flux(right);
  CHECK(std::abs(s.at({1, 2}) - want) < 1e-15);
  for (auto I : {IndexList{0, 1}, IndexList{0, 2}, IndexList{0, 3}, IndexList{1, 3}, IndexList{2, 3}})
    CHECK(std::abs(s.at(I)) < 1e-12);
  CHECK(std::abs(s_component(right, IndexList{1, 2}) - want) < 1e-15);
  CHECK(std::abs(s_component_circular(right, IndexList{1, 2}) - want) < 1e-15);
  CHECK(std::abs(spin_canonical(right, IndexList{1, 2}) - want) < 1e-15);

  const ModeSet left = single({0, 0, 0, chi}, w, vec({0, g / std::sqrt(2.0), cplx(0, g / std::sqrt(2.0)), 0}));
  CHECK(std::abs(s_component_circular(left, IndexList{1, 2}) + want) < 1e-15);

  const ModeSet lin = single({0, 0, 0, chi}, w, vec({0, 0.3, -0.7, 0}));
  CHECK(spin_flux(lin).max_abs() == 0.0);
  ModeSet z = lin;
  z.modes.clear();
  CHECK(spin_canonical(z, IndexList{1, 2}) == 0.0);

  CHECK_THROWS_AS(s_component(right, IndexList{0, 1}), DomainError);
  CHECK_THROWS_AS(spin_canonical(right, IndexList{0, 2}), DomainError);
  CHECK_THROWS_AS(s_component_circular(right, IndexList{0, 3}), DomainError);
}

TEST_CASE("circular basis") {
  const IndexList I{1, 2};
  auto [ep, em] = circular_basis(kMink, I, M_PI / 4);
  CHECK(std::abs(dot(ep.conj(), ep) - 1.0) < 1e-15);
  CHECK(std::abs(dot(em.conj(), em) - 1.0) < 1e-15);
  CHECK(std::abs(dot(ep.conj(), em)) < 1e-15);

  auto [e0p, e0m] = circular_basis(kMink, I, 0.0);
  CHECK((e0p - vec({0, 1, 0, 0})).max_abs() < 1e-16);
  CHECK((e0m - vec({0, 0, cplx(0, -1), 0})).max_abs() < 1e-16);

  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const Signature sig = t % 2 ? kMink : Signature(2, 3);
    const int i = rng.integer(0, sig.d() - 2), j = rng.integer(i + 1, sig.d() - 1);
    const IndexList J{i, j};
    auto [a, b] = circular_basis(sig, J, rng.uniform(0, 2 * M_PI));
    const Multivector lhs = cplx(0, 1) * wedge(a, b);
    REQUIRE((lhs - Multivector::blade(sig, J, static_cast<double>(metric_delta(J, sig)))).max_abs() < 1e-14);
  }
}

TEST_CASE("moment tensor") {
  const ModeSet ms = two_modes();
  const SpacetimePoint x{{0.3, -0.2, 0.5, 1.1}};
  CHECK(moment_tensor_at(ms, x, x).max_abs() == 0.0);

  const SpacetimePoint alpha{{0.1, 0.4, -0.3, 0.2}};
  std::vector<double> arm(4);
  for (int t = 0; t < 4; ++t) arm[t] = x.x[t] - alpha.x[t];
  const Rank3MomentTensor M = moment_tensor_at(ms, x, alpha);
  const Rank3MomentTensor B = boxwedge(Multivector::vector(kMink, arm), stress_tensor_at(ms, x));
  for (std::size_t p = 0; p < M.coeffs().size(); ++p) CHECK(std::abs(M.coeffs()[p] - B.coeffs()[p]) < 1e-15);

  ModeSet z = ms;
  z.modes.clear();
  CHECK(moment_tensor_at(z, x, alpha).max_abs() == 0.0);
  CHECK(moment_divergence_at(z, x, alpha).is_zero());
}

TEST_CASE("divergence identity holds on and off shell") {
  Rng rng(41);
  for (int t = 0; t < 6; ++t) {
    const Signature sig = t % 2 ? kMink : Signature(1, 4);
    const int r = t % 3 == 2 && sig.d() == 5 ? 3 : 2;
    ModeSet ms = make_gaussian_packet(random_packet_spec(rng, sig, r, 0, 3), 0);
    const SpacetimePoint alpha{std::vector<double>(static_cast<std::size_t>(sig.d()), 0.2)};
    const auto pts = random_points(rng, ms, std::vector<double>(sig.d(), 0.0), std::vector<double>(sig.d(), 2.0), alpha, 10);
    FieldResiduals on = check_field(ms, pts, alpha);
    CHECK(on.moment_div.max_rel < 1e-10);
    CHECK(on.moment_identity.max_rel < 1e-10);
    ms.modes[ms.modes.size() / 2].detune = 0.1 * mode_chi(ms, ms.modes[ms.modes.size() / 2]);
    FieldResiduals off = check_field(ms, pts, alpha);
    CHECK(off.moment_identity.max_rel < 1e-10);
    CHECK(off.moment_div.max_rel > 1e-8);
  }
}

TEST_CASE("decomposition structure") {
  const ModeSet ms = default_packet();
  const FluxReport a = decompose(ms, 0.0, SpacetimePoint{{0, 0, 0, 0}});
  CHECK(((a.n_part + a.l_part + a.s_part) - a.omega).max_abs() <= 1e-15 * a.omega.max_abs());
  CHECK(a.max_imag < 1e-12 * a.omega.max_abs());

  const SpacetimePoint alpha{{0.0, 0.3, -0.2, 0.1}};
  const FluxReport b = decompose(ms, 0.0, alpha);
  const Multivector shift = a.omega - wedge(alpha.as_vector(kMink), a.pi_part);
  CHECK((b.omega - shift).max_abs() <= 1e-12 * a.omega.max_abs());
  CHECK(check_alpha_shift(ms, 0.7, alpha).max_rel < 1e-12);
  CHECK(check_ell_exclusion(ms, 0.7).max_rel < 1e-12);
  for (auto I : {IndexList{0, 1}, IndexList{0, 2}, IndexList{0, 3}}) {
    CHECK(std::abs(a.l_part.at(I)) < 1e-12 * a.omega.max_abs());
    CHECK(std::abs(a.s_part.at(I)) < 1e-12 * a.omega.max_abs());
  }
  CHECK_THROWS_AS(l_component(ms, IndexList{0, 1}), DomainError);

  // the flux through x_ell = const does not depend on x_ell for a free field
  const FluxReport c = decompose(ms, 0.7, SpacetimePoint{{0, 0, 0, 0}});
  CHECK((c.omega - a.omega).max_abs() <= 1e-12 * a.omega.max_abs());
  CHECK((c.s_part - a.s_part).max_abs() <= 1e-12 * a.omega.max_abs());

  const SpinTriangle tri = check_spin_triangle(ms);
  CHECK(tri.spin.max_rel < 1e-12);
  CHECK(tri.orbital.max_rel < 1e-10);
  CHECK(tri.l_imag < 1e-10);
}

TEST_CASE("real polarization and real envelope carry no L or S") {
  GaussianPacketSpec spec;
  spec.center = {0.0, 0.0, 1.0};
  spec.spread = 0.1;
  spec.seed = vec({0.0, 1.0, 0.5, 0.0});
  spec.grid.assign(3, GridAxis{0.4, 6});
  const ModeSet ms = make_gaussian_packet(spec, 0);
  const FluxReport f = decompose(ms, 0.0, SpacetimePoint{{0, 0, 0, 0}});
  const double scale = f.pi_part.max_abs();
  CHECK(f.s_part.max_abs() < 1e-12 * scale);
  CHECK(f.l_part.max_abs() < 1e-12 * scale);
  CHECK(std::abs(l_component_circular(ms, IndexList{1, 2})) < 1e-12 * scale);
}

TEST_CASE("missing gradients") {
  const ModeSet ms = two_modes();
  CHECK_THROWS_AS(nls_flux(ms, 0.0), UnsupportedFieldError);
  CHECK_THROWS_AS(l_component(ms, IndexList{1, 2}), UnsupportedFieldError);
  CHECK_NOTHROW(spin_flux(ms));
}

TEST_CASE("real-space flux") {
  // 16 points over 8 spreads keeps the aliasing period (20) well outside the lattice
  const ModeSet ms = default_packet(16);
  const Lattice lat = lattice(ms, 0.1, 48);
  const RealspaceFlux r0 = realspace_omega_flux(ms, 0, 0.0, SpacetimePoint{{0, 0, 0, 0}}, lat);
  const SpacetimePoint alpha{{0.0, 0.3, -0.2, 0.1}};
  const RealspaceFlux ra = realspace_omega_flux(ms, 0, 0.0, alpha, lat);
  const Multivector shift = r0.omega - wedge(alpha.as_vector(kMink), r0.pi);
  CHECK((ra.omega - shift).max_abs() <= 1e-12 * r0.omega.max_abs());
  CHECK_FALSE(r0.undersized);

  // separable and direct evaluation agree
  const Lattice small = lattice(ms, 0.1, 20);
  const RealspaceFlux sep = realspace_omega_flux(ms, 0, 0.0, alpha, small, true);
  const RealspaceFlux dir = realspace_omega_flux(ms, 0, 0.0, alpha, small, false);
  CHECK(sep.separable);
  CHECK_FALSE(dir.separable);
  CHECK((sep.omega - dir.omega).max_abs() <= 1e-12 * dir.omega.max_abs());

  const FluxReport f = decompose(ms, 0.0, SpacetimePoint{{0, 0, 0, 0}});
  CHECK((r0.omega - f.omega).max_abs() <= 1e-3 * f.omega.max_abs());
  CHECK((r0.pi - f.pi_part).max_abs() <= 1e-3 * f.pi_part.max_abs());

  ModeSet z = ms;
  z.modes.clear();
  z.grid.reset();
  CHECK(realspace_omega_flux(z, 0, 0.0, alpha, small).omega.is_zero());

  const Lattice tiny{{0.0, 0.0, 0.0}, std::vector<double>(3, 1.0), std::vector<int>(3, 12)};
  CHECK(realspace_omega_flux(ms, 0, 0.0, alpha, tiny).undersized);
}

TEST_CASE("Pi converges under grid refinement") {
  const Multivector p8 = pi_flux(default_packet(8)), p16 = pi_flux(default_packet(16)),
                    p32 = pi_flux(default_packet(32));
  const double d1 = (p8 - p16).max_abs(), d2 = (p16 - p32).max_abs();
  CHECK(d2 <= d1);
  CHECK(d2 <= 1e-3 * p32.max_abs());
}
