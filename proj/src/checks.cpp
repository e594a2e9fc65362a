#include "rvfield/checks.hpp"

#include <algorithm>
#include <cmath>

namespace rvf {

namespace {

constexpr double kTiny = 1e-300;

double rel(double num, double scale) { return num / std::max(scale, kTiny); }

Multivector random_vector(Rng& rng, const Signature& sig) { return random_multivector(rng, sig, 1); }

// Max-abs of every difference over the larger of the two operand scales.
double diff_rel(const Multivector& a, const Multivector& b, double scale) { return rel((a - b).max_abs(), scale); }

}  // namespace

Multivector random_multivector(Rng& rng, const Signature& sig, int grade, bool complex_coeffs) {
  Multivector m(sig, grade);
  for (std::size_t p = 0; p < m.size(); ++p) m[p] = complex_coeffs ? rng.unit_square() : cplx(rng.uniform(-1.0, 1.0));
  return m;
}

const char* identity_name(Identity id) {
  switch (id) {
    case Identity::InteriorAnticommute: return "interior_anticommute";
    case Identity::InteriorOfWedge: return "interior_of_wedge";
    case Identity::DotExchange: return "dot_exchange";
    case Identity::Adjoint: return "interior_adjoint";
  }
  return "?";
}

bool identity_applies(Identity id, int d, int r) {
  switch (id) {
    case Identity::InteriorAnticommute: return r >= 2 && r <= d;
    case Identity::InteriorOfWedge:
    case Identity::DotExchange: return r >= 1 && r + 1 <= d;
    case Identity::Adjoint: return r >= 1 && r <= d;
  }
  return false;
}

Residual check_identity(Identity id, Rng& rng, const Signature& sig, int r, long trials) {
  Residual res;
  if (!identity_applies(id, sig.d(), r)) throw DomainError(std::string(identity_name(id)) + ": grade out of range");
  const double sgn_r = (r & 1) ? -1.0 : 1.0;
  for (long t = 0; t < trials; ++t) {
    switch (id) {
      case Identity::InteriorAnticommute: {
        const Multivector u = random_vector(rng, sig), v = random_vector(rng, sig);
        const Multivector w = random_multivector(rng, sig, r);
        const Multivector lhs = left_interior(u, left_interior(v, w));
        const Multivector rhs = -left_interior(v, left_interior(u, w));
        res.add(diff_rel(lhs, rhs, u.norm() * v.norm() * w.norm()));
        break;
      }
      case Identity::InteriorOfWedge: {
        const Multivector u = random_vector(rng, sig), v = random_vector(rng, sig);
        const Multivector w = random_multivector(rng, sig, r);
        const Multivector lhs = left_interior(u, wedge(v, w));
        const Multivector rhs = sgn_r * dot(u, v) * w + wedge(v, left_interior(u, w));
        res.add(diff_rel(lhs, rhs, u.norm() * v.norm() * w.norm()));
        break;
      }
      case Identity::DotExchange: {
        const Multivector v = random_vector(rng, sig), vp = random_vector(rng, sig);
        const Multivector w = random_multivector(rng, sig, r), wp = random_multivector(rng, sig, r);
        const cplx lhs = dot(wedge(v, w), wedge(vp, wp)) + dot(left_interior(vp, w), left_interior(v, wp));
        const cplx rhs = dot(v, vp) * dot(w, wp);
        res.add(rel(std::abs(lhs - rhs), v.norm() * vp.norm() * w.norm() * wp.norm()));
        break;
      }
      case Identity::Adjoint: {
        const Multivector u = random_vector(rng, sig);
        const Multivector v = random_multivector(rng, sig, r - 1);
        const Multivector w = random_multivector(rng, sig, r);
        const cplx lhs = dot(wedge(u, v), w);
        const cplx rhs = -sgn_r * dot(left_interior(u, w), v);
        res.add(rel(std::abs(lhs - rhs), u.norm() * v.norm() * w.norm()));
        break;
      }
    }
  }
  return res;
}

Residual check_odot_owedge_symmetry(Rng& rng, const Signature& sig, int r, long trials) {
  Residual res;
  for (long t = 0; t < trials; ++t) {
    const Multivector a = random_multivector(rng, sig, r), b = random_multivector(rng, sig, r);
    res.add(rel((odot(a, b) + owedge(a, b)).asymmetry(), a.norm() * b.norm()));
  }
  return res;
}

Residual check_stress_oracle(Rng& rng, const Signature& sig, int r, long trials) {
  Residual res;
  for (long t = 0; t < trials; ++t) {
    const Multivector F = random_multivector(rng, sig, r);
    const double n = F.norm();
    res.add(rel((stress_tensor(F) - stress_components(F)).max_abs(), n * n));
  }
  return res;
}

Residual check_poynting(Rng& rng, long trials) {
  const Signature sig(1, 3);
  Residual res;
  for (long t = 0; t < trials; ++t) {
    const Multivector F = random_multivector(rng, sig, 2, false);
    const double E[3] = {F.at({0, 1}).real(), F.at({0, 2}).real(), F.at({0, 3}).real()};
    const double B[3] = {F.at({2, 3}).real(), -F.at({1, 3}).real(), F.at({1, 2}).real()};
    const double S[3] = {E[1] * B[2] - E[2] * B[1], E[2] * B[0] - E[0] * B[2], E[0] * B[1] - E[1] * B[0]};
    const Rank2Tensor T = stress_tensor(F);
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(T(0, j + 1) - S[j]));
    const double n = F.norm();
    res.add(rel(worst, n * n));
  }
  return res;
}

GaussianPacketSpec random_packet_spec(Rng& rng, const Signature& sig, int r, int ell, int points) {
  const auto axes = reduced_axes(sig, ell);
  const std::size_t nd = axes.size();
  GaussianPacketSpec spec;
  spec.center.assign(nd, 0.0);
  // Axes of the opposite metric type to ell carry the shell; the rest stay small.
  double big = 0.0;
  for (std::size_t a = 0; a < nd; ++a)
    if (sig.delta(axes[a]) != sig.delta(ell)) {
      spec.center[a] = rng.uniform(-1.0, 1.0);
      big += spec.center[a] * spec.center[a];
    }
  if (big < 0.25) {
    for (std::size_t a = 0; a < nd; ++a)
      if (sig.delta(axes[a]) != sig.delta(ell)) {
        spec.center[a] = big > 0.0 ? spec.center[a] * std::sqrt(0.25 / big) : 0.5;
        break;
      }
    big = 0.0;
    for (std::size_t a = 0; a < nd; ++a)
      if (sig.delta(axes[a]) != sig.delta(ell)) big += spec.center[a] * spec.center[a];
  }
  const double rad = std::sqrt(big);
  for (std::size_t a = 0; a < nd; ++a)
    if (sig.delta(axes[a]) == sig.delta(ell)) spec.center[a] = rng.uniform(-0.3, 0.3) * rad / std::sqrt(double(nd));
  spec.spread = rng.uniform(0.02, 0.05) * rad;
  spec.seed = random_multivector(rng, sig, r - 1);
  spec.grid.assign(nd, GridAxis{4.0 * spec.spread, points});
  return spec;
}

Residual check_gauge(const ModeSet& ms) {
  Residual res;
  const Multivector el = Multivector::blade(ms.sig, IndexList{ms.ell});
  for (const Mode& m : ms.modes) {
    const auto xp = mode_xi_plus(ms, m);
    const Multivector xv = Multivector::vector(ms.sig, xp);
    const double scale = m.amp.norm();
    if (scale == 0.0) continue;
    res.add(rel(left_interior(el, m.amp).max_abs(), scale));
    res.add(rel(left_interior(xv, m.amp).max_abs(), scale * xv.norm()));
    res.add(diff_rel(coulomb_project(m.amp, xp, ms.ell), m.amp, scale));
  }
  return res;
}

SpinTriangle check_spin_triangle(const ModeSet& ms) {
  SpinTriangle out;
  const Multivector S = nls_flux(ms, 0.0).s;
  struct Row {
    double s[4];
    cplx l;
    double lc;
  };
  std::vector<Row> rows;
  double s_scale = 0.0, l_scale = 0.0;
  for (const IndexList& I : enumerate_grade(2, ms.sig)) {
    if (I.contains(ms.ell)) continue;
    Row row{{s_component(ms, I), s_component_circular(ms, I), spin_canonical(ms, I), S.at(I).real()},
            l_component(ms, I), l_component_circular(ms, I)};
    for (double v : row.s) s_scale = std::max(s_scale, std::abs(v));
    l_scale = std::max({l_scale, std::abs(row.l), std::abs(row.lc)});
    rows.push_back(row);
  }
  for (const Row& row : rows) {
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) out.spin.add(rel(std::abs(row.s[a] - row.s[b]), s_scale));
    out.orbital.add(rel(std::abs(row.l.real() - row.lc), l_scale));
    out.l_imag = std::max(out.l_imag, rel(std::abs(row.l.imag()), l_scale));
  }
  if (s_scale == 0.0) out.spin = Residual{0.0, out.spin.trials};
  if (l_scale == 0.0) out.orbital = Residual{0.0, out.orbital.trials}, out.l_imag = 0.0;
  return out;
}

Residual check_ell_exclusion(const ModeSet& ms, double x_ell) {
  Residual res;
  const NLS nls = nls_flux(ms, x_ell);
  const double scale = std::max({nls.n.max_abs(), nls.l.max_abs(), nls.s.max_abs()});
  const auto& masks = grade_masks(ms.sig, 2);
  for (std::size_t p = 0; p < masks.size(); ++p) {
    if (!((masks[p] >> ms.ell) & 1u)) continue;
    res.add(scale == 0.0 ? 0.0 : rel(std::abs(nls.l[p]), scale));
    res.add(scale == 0.0 ? 0.0 : rel(std::abs(nls.s[p]), scale));
  }
  return res;
}

Residual check_alpha_shift(const ModeSet& ms, double x_ell, const SpacetimePoint& alpha) {
  Residual res;
  const SpacetimePoint zero{std::vector<double>(static_cast<std::size_t>(ms.sig.d()), 0.0)};
  const FluxReport r0 = decompose(ms, x_ell, zero);
  const FluxReport ra = decompose(ms, x_ell, alpha);
  const Multivector shift = wedge(alpha.as_vector(ms.sig), r0.pi_part);
  const double scale = std::max({r0.omega.max_abs(), ra.omega.max_abs(), shift.max_abs()});
  res.add(scale == 0.0 ? 0.0 : diff_rel(ra.omega, r0.omega - shift, scale));
  return res;
}

PointSet random_points(Rng& rng, const ModeSet& ms, const std::vector<double>& center,
                       const std::vector<double>& half, const SpacetimePoint& alpha, int count) {
  const std::size_t d = static_cast<std::size_t>(ms.sig.d());
  if (center.size() != d || half.size() != d || alpha.x.size() != d)
    throw DomainError("random_points: center, half and alpha need d entries");
  PointSet ps;
  for (int c = 0; c < count; ++c) {
    SpacetimePoint p{std::vector<double>(d)};
    for (std::size_t i = 0; i < d; ++i) {
      p.x[i] = center[i] + rng.uniform(-1.0, 1.0) * half[i];
      ps.max_arm = std::max(ps.max_arm, std::abs(p.x[i] - alpha.x[i]));
    }
    ps.points.push_back(std::move(p));
  }
  return ps;
}

FieldResiduals check_field(const ModeSet& ms, const PointSet& pts, const SpacetimePoint& alpha) {
  FieldResiduals out;
  double xi_max = 0.0;
  for (const Mode& m : ms.modes)
    for (double v : mode_xi_plus(ms, m)) xi_max = std::max(xi_max, std::abs(v));
  const double k = xi_max;

  std::vector<Multivector> F;
  std::vector<Rank2Tensor> T;
  double f_max = 0.0, t_max = 0.0;
  for (const auto& p : pts.points) {
    F.push_back(field_at(ms, p));
    T.push_back(stress_tensor_at(ms, p));
    f_max = std::max(f_max, F.back().max_abs());
    t_max = std::max(t_max, T.back().max_abs());
  }
  const double f_scale = k * f_max;
  const double t_scale = k * t_max;
  const double m_scale = t_max * (1.0 + k * pts.max_arm);
  for (std::size_t n = 0; n < pts.points.size(); ++n) {
    const auto& p = pts.points[n];
    const auto [div, curl] = maxwell_residuals(ms, p);
    out.maxwell_div.add(f_scale == 0.0 ? 0.0 : rel(div.max_abs(), f_scale));
    out.maxwell_curl.add(f_scale == 0.0 ? 0.0 : rel(curl.max_abs(), f_scale));
    const Multivector dT = stress_divergence_at(ms, p);
    out.stress_div.add(t_scale == 0.0 ? 0.0 : rel(dT.max_abs(), t_scale));
    const Multivector dM = moment_divergence_at(ms, p, alpha);
    out.moment_div.add(m_scale == 0.0 ? 0.0 : rel(dM.max_abs(), m_scale));
    SpacetimePoint arm{p.x};
    for (std::size_t i = 0; i < arm.x.size(); ++i) arm.x[i] -= alpha.x[i];
    const Multivector rhs = wedge(arm.as_vector(ms.sig), dT);
    out.moment_identity.add(m_scale == 0.0 ? 0.0 : diff_rel(dM, rhs, m_scale));
  }
  return out;
}

}  // namespace rvf
