#include "rvfield/angular_momentum.hpp"

#include <cmath>
#include <numbers>

#include "rvfield/parallel.hpp"

namespace rvf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kJ{0.0, 1.0};

void check_alpha(const ModeSet& ms, const SpacetimePoint& p, const char* what) {
  if (p.x.size() != static_cast<std::size_t>(ms.sig.d()))
    throw DomainError(std::string(what) + " needs d coordinates");
}

void check_pair_index(const ModeSet& ms, const IndexList& I, const char* op) {
  check_index_list(I, ms.sig);
  if (I.size() != 2) throw DomainError(std::string(op) + ": I must have two indices");
  if (I.contains(ms.ell)) throw DomainError(std::string(op) + ": I contains ell");
}

Multivector real_vector(const Signature& sig, const std::vector<double>& v) { return Multivector::vector(sig, v); }

Multivector to_multivector(const Signature& sig, int grade, const cplx* v) {
  Multivector m(sig, grade);
  for (std::size_t p = 0; p < m.size(); ++p) m[p] = v[p];
  return m;
}

double parity(int r) { return (r & 1) ? -1.0 : 1.0; }

void require_gradients(const ModeSet& ms, const char* op) {
  if (!ms.has_gradients())
    throw UnsupportedFieldError(std::string(op) + ": mode set carries no analytic d(amp)/d(xi)");
}

}  // namespace

AmpNorm default_amp_norm() { return AmpNorm::Metric; }

const char* amp_norm_name(AmpNorm n) { return n == AmpNorm::Metric ? "metric" : "euclidean"; }

int ell_orientation(const Signature& sig, int ell) {
  const IndexList L{ell};
  return sigma(L, complement(L, sig), sig);
}

Rank3MomentTensor moment_tensor_at(const ModeSet& ms, const SpacetimePoint& x, const SpacetimePoint& alpha) {
  check_alpha(ms, x, "x");
  check_alpha(ms, alpha, "alpha");
  const Multivector arm = real_vector(ms.sig, x.x) - real_vector(ms.sig, alpha.x);
  return boxwedge(arm, stress_tensor(field_at(ms, x)));
}

Multivector moment_divergence_at(const ModeSet& ms, const SpacetimePoint& x, const SpacetimePoint& alpha) {
  check_alpha(ms, x, "x");
  check_alpha(ms, alpha, "alpha");
  const Signature& sig = ms.sig;
  const Multivector arm = real_vector(sig, x.x) - real_vector(sig, alpha.x);
  const Rank2Tensor T = stress_tensor_at(ms, x);
  const auto dT = stress_gradient_at(ms, x);
  Multivector out(sig, 2);
  for (int j = 0; j < sig.d(); ++j) {
    Rank3MomentTensor Mj = boxwedge(Multivector::blade(sig, IndexList{j}), T);
    Mj += boxwedge(arm, dT[j]);
    out += static_cast<double>(sig.delta(j)) * contract_first(j, Mj);
  }
  return out;
}

namespace {

// Complex field sum f(x) = sum_m c_m e^{j theta_m} (j 2 pi xi+ ^ A)_m on the lattice, one row per point.
std::vector<cplx> lattice_field_direct(const ModeSet& ms, double x_ell, const std::vector<int>& ax,
                                       const std::vector<std::vector<double>>& xs, std::size_t W) {
  const Signature& sig = ms.sig;
  const std::size_t M = ms.modes.size();
  const std::size_t D = ax.size();
  std::vector<std::vector<cplx>> G(M);
  std::vector<std::vector<std::vector<cplx>>> E(D);
  for (std::size_t a = 0; a < D; ++a) E[a].assign(xs[a].size(), std::vector<cplx>(M));
  for (std::size_t m = 0; m < M; ++m) {
    const Mode& md = ms.modes[m];
    const auto xp = mode_xi_plus(ms, md);
    const double c = md.weight / (2.0 * mode_chi(ms, md));
    const double th = kTwoPi * sig.delta(ms.ell) * xp[ms.ell] * x_ell;
    const cplx pre = c * cplx(std::cos(th), std::sin(th)) * kJ * kTwoPi;
    const Multivector f = pre * wedge(real_vector(sig, xp), md.amp);
    G[m] = f.coeffs();
    for (std::size_t a = 0; a < D; ++a)
      for (std::size_t p = 0; p < xs[a].size(); ++p) {
        const double ph = kTwoPi * sig.delta(ax[a]) * xp[ax[a]] * xs[a][p];
        E[a][p][m] = {std::cos(ph), std::sin(ph)};
      }
  }
  std::size_t P = 1;
  for (const auto& v : xs) P *= v.size();
  std::vector<cplx> out(P * W);
  const std::size_t nblk = (P + 63) / 64;
  parallel_blocks(nblk, [&](std::size_t b) {
    std::vector<std::size_t> idx(D);
    for (std::size_t pt = b * 64; pt < std::min(P, (b + 1) * 64); ++pt) {
      std::size_t rem = pt;
      for (std::size_t a = D; a-- > 0;) {
        idx[a] = rem % xs[a].size();
        rem /= xs[a].size();
      }
      cplx* o = &out[pt * W];
      for (std::size_t m = 0; m < M; ++m) {
        cplx e = 1.0;
        for (std::size_t a = 0; a < D; ++a) e *= E[a][idx[a]][m];
        for (std::size_t w = 0; w < W; ++w) o[w] += e * G[m][w];
      }
    }
  });
  return out;
}

// Same sum evaluated axis by axis over the packet's rectangular frequency grid.
std::vector<cplx> lattice_field_separable(const ModeSet& ms, double x_ell, const std::vector<int>& ax,
                                          const std::vector<std::vector<double>>& xs, std::size_t W) {
  const Signature& sig = ms.sig;
  const ModeGrid& grid = *ms.grid;
  const std::size_t D = ax.size();
  std::vector<std::size_t> shape(D);
  std::size_t cells = 1;
  for (std::size_t a = 0; a < D; ++a) {
    shape[a] = grid.coords[a].size();
    cells *= shape[a];
  }
  std::vector<cplx> cur(cells * W, cplx{});
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    const Mode& md = ms.modes[m];
    const auto xp = mode_xi_plus(ms, md);
    const double c = md.weight / (2.0 * mode_chi(ms, md));
    const double th = kTwoPi * sig.delta(ms.ell) * xp[ms.ell] * x_ell;
    const cplx pre = c * cplx(std::cos(th), std::sin(th)) * kJ * kTwoPi;
    const Multivector f = pre * wedge(real_vector(sig, xp), md.amp);
    for (std::size_t w = 0; w < W; ++w) cur[grid.cell[m] * W + w] = f[w];
  }
  for (std::size_t a = 0; a < D; ++a) {
    const std::size_t nq = shape[a];
    const std::size_t np = xs[a].size();
    std::size_t outer = 1, inner = W;
    for (std::size_t b = 0; b < a; ++b) outer *= shape[b];
    for (std::size_t b = a + 1; b < D; ++b) inner *= shape[b];
    std::vector<cplx> E(np * nq);
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t q = 0; q < nq; ++q) {
        const double ph = kTwoPi * sig.delta(ax[a]) * grid.coords[a][q] * xs[a][p];
        E[p * nq + q] = {std::cos(ph), std::sin(ph)};
      }
    std::vector<cplx> next(outer * np * inner, cplx{});
    parallel_blocks(outer * np, [&](std::size_t op) {
      const std::size_t o = op / np, p = op % np;
      cplx* dst = &next[(o * np + p) * inner];
      for (std::size_t q = 0; q < nq; ++q) {
        const cplx e = E[p * nq + q];
        const cplx* src = &cur[(o * nq + q) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += e * src[i];
      }
    });
    cur.swap(next);
    shape[a] = np;
  }
  return cur;
}

bool grid_usable(const ModeSet& ms) {
  if (!ms.grid) return false;
  const ModeGrid& g = *ms.grid;
  if (g.axes != reduced_axes(ms.sig, ms.ell) || g.cell.size() != ms.modes.size()) return false;
  std::size_t cells = 1;
  for (const auto& c : g.coords) cells *= c.size();
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    if (g.cell[m] >= cells) return false;
    std::size_t rem = g.cell[m];
    for (std::size_t a = g.axes.size(); a-- > 0;) {
      if (ms.modes[m].xi_bar[g.axes[a]] != g.coords[a][rem % g.coords[a].size()]) return false;
      rem /= g.coords[a].size();
    }
  }
  return true;
}

}  // namespace

RealspaceFlux realspace_omega_flux(const ModeSet& ms, int ell, double x_ell, const SpacetimePoint& alpha,
                                   const Lattice& lattice, bool allow_separable) {
  ms.validate();
  if (ell != ms.ell) throw DomainError("realspace_omega_flux: ell differs from the mode set");
  check_alpha(ms, alpha, "alpha");
  const Signature& sig = ms.sig;
  const int d = sig.d();
  const auto ax = reduced_axes(sig, ell);
  const std::size_t D = ax.size();
  if (lattice.center.size() != D || lattice.half_width.size() != D || lattice.points.size() != D)
    throw DomainError("lattice needs d-1 entries per field");

  RealspaceFlux res;
  res.lattice = lattice;
  std::vector<std::vector<double>> xs(D);
  double vol = 1.0;
  std::size_t P = 1;
  for (std::size_t a = 0; a < D; ++a) {
    if (lattice.points[a] < 1 || !(lattice.half_width[a] > 0.0)) throw DomainError("lattice: bad axis");
    const double h = 2.0 * lattice.half_width[a] / lattice.points[a];
    res.spacing.push_back(h);
    vol *= h;
    for (int p = 0; p < lattice.points[a]; ++p)
      xs[a].push_back(lattice.center[a] - lattice.half_width[a] + (p + 0.5) * h);
    P *= xs[a].size();
  }

  const std::size_t W = static_cast<std::size_t>(binomial(d, ms.r));
  res.separable = allow_separable && grid_usable(ms);
  const std::vector<cplx> f = res.separable ? lattice_field_separable(ms, x_ell, ax, xs, W)
                                            : lattice_field_direct(ms, x_ell, ax, xs, W);

  // accumulators: Z_j (d), Y_{a j} (D*d), boundary |T_ll|, total |T_ll|
  const std::size_t width = static_cast<std::size_t>(d) * (D + 1) + 2;
  auto acc = tree_sum<double>(P, width, [&](std::size_t pt, double* s) {
    Multivector F(sig, ms.r);
    for (std::size_t w = 0; w < W; ++w) F[w] = 2.0 * f[pt * W + w].real();
    const Rank2Tensor T = stress_tensor(F);
    std::size_t rem = pt;
    bool edge = false;
    std::vector<double> x(D);
    for (std::size_t a = D; a-- > 0;) {
      const std::size_t n = xs[a].size();
      const std::size_t q = rem % n;
      edge = edge || q == 0 || q + 1 == n;
      x[a] = xs[a][q];
      rem /= n;
    }
    for (int j = 0; j < d; ++j) {
      const double t = T(ell, j).real();
      s[j] += t;
      for (std::size_t a = 0; a < D; ++a) s[static_cast<std::size_t>(d) * (a + 1) + static_cast<std::size_t>(j)] += x[a] * t;
    }
    const double tll = std::abs(T(ell, ell).real());
    if (edge) s[width - 2] += tll;
    s[width - 1] += tll;
  });

  const double so = ell_orientation(sig, ell);
  std::vector<double> Z(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) Z[j] = acc[j];
  auto moment = [&](int i, int j) {
    if (i == ell) return x_ell * Z[j];
    const std::size_t a = static_cast<std::size_t>(i < ell ? i : i - 1);
    return acc[static_cast<std::size_t>(d) * (a + 1) + static_cast<std::size_t>(j)];
  };
  res.pi = Multivector(sig, 1);
  for (int j = 0; j < d; ++j) res.pi[j] = so * vol * Z[j];
  res.omega = Multivector(sig, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const std::uint32_t bi = std::uint32_t{1} << i, bj = std::uint32_t{1} << j;
      const double v = so * sigma_mask(bi, bj) * vol * (moment(i, j) - alpha.x[i] * Z[j]);
      res.omega[grade_position(sig, bi | bj)] += v;
    }
  res.edge_fraction = acc[width - 1] > 0.0 ? acc[width - 2] / acc[width - 1] : 0.0;
  res.undersized = res.edge_fraction > 1e-6;
  return res;
}

Multivector pi_flux(const ModeSet& ms, AmpNorm norm) {
  ms.validate();
  const Signature& sig = ms.sig;
  const int d = sig.d();
  const double pref = 4.0 * kPi * kPi * parity(ms.r) * ell_orientation(sig, ms.ell);
  const auto v = tree_sum<double>(ms.modes.size(), static_cast<std::size_t>(d), [&](std::size_t i, double* acc) {
    const Mode& m = ms.modes[i];
    const auto xp = mode_xi_plus(ms, m);
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    const auto& masks = m.amp.masks();
    double a2 = 0.0;
    for (std::size_t p = 0; p < masks.size(); ++p)
      a2 += (norm == AmpNorm::Metric ? metric_delta_mask(masks[p], sig) : 1) * std::norm(m.amp[p]);
    for (int t = 0; t < d; ++t) acc[t] += pref * c * xp[t] * a2;
  });
  return Multivector::vector(sig, v);
}

namespace {

// Antisymmetric (A* odot A - cc) read as a bivector, for one mode.
Multivector spin_density(const Mode& m) {
  const Signature& sig = m.amp.sig();
  Multivector out(sig, 2);
  if (m.amp.grade() < 1) return out;
  const Rank2Tensor X = odot(m.amp.conj(), m.amp);
  const auto& masks = out.masks();
  for (std::size_t p = 0; p < masks.size(); ++p) {
    const int i = std::countr_zero(masks[p]);
    const int j = 31 - std::countl_zero(masks[p]);
    out[p] = X(i, j) - std::conj(X(i, j));
  }
  return out;
}

// V - cc with V = sum_t Delta_tt e_t (d_t A*) . A
Multivector orbital_vector(const ModeSet& ms, const Mode& m) {
  const Signature& sig = ms.sig;
  Multivector V(sig, 1);
  for (int t = 0; t < sig.d(); ++t) {
    if (t == ms.ell) continue;
    const cplx v = static_cast<double>(sig.delta(t)) * dot(m.amp_grad[t].conj(), m.amp);
    V[t] = v - std::conj(v);
  }
  return V;
}

// The spectrum on the surface at x_ell: B = e^{j 2 pi D_ll xi_l x_ell} A, with
// d_t B picking up the xi-dependence of chi through the phase.
Mode surface_mode(const ModeSet& ms, const Mode& m, double x_ell) {
  if (x_ell == 0.0) return m;
  const Signature& sig = ms.sig;
  const double chi = mode_chi(ms, m);
  const double dl = sig.delta(ms.ell);
  const double th = kTwoPi * dl * (chi + m.detune) * x_ell;
  const cplx e(std::cos(th), std::sin(th));
  Mode b = m;
  b.amp = e * m.amp;
  for (int t = 0; t < sig.d(); ++t) {
    if (t == ms.ell) continue;
    const double dchi = -dl * sig.delta(t) * m.xi_bar[t] / chi;
    b.amp_grad[t] = e * (m.amp_grad[t] + (kJ * (kTwoPi * dl * x_ell * dchi)) * m.amp);
  }
  return b;
}

}  // namespace

NLS nls_flux(const ModeSet& ms, double x_ell) {
  ms.validate();
  require_gradients(ms, "nls_flux");
  const Signature& sig = ms.sig;
  const std::size_t B = static_cast<std::size_t>(binomial(sig.d(), 2));
  const double so = ell_orientation(sig, ms.ell);
  const cplx pref_nl = kJ * kPi * parity(ms.r) * so;
  const cplx pref_s = -kJ * kTwoPi * so;
  const Multivector eell = Multivector::blade(sig, IndexList{ms.ell});
  const auto v = tree_sum<cplx>(ms.modes.size(), 3 * B, [&](std::size_t i, cplx* acc) {
    const Mode m = surface_mode(ms, ms.modes[i], x_ell);
    const double chi = mode_chi(ms, m);
    const double c = m.weight / (2.0 * chi);
    const Multivector W = orbital_vector(ms, m);
    const Multivector n = (pref_nl * c * chi) * wedge(eell, W);
    const Multivector l = (pref_nl * c) * wedge(real_vector(sig, m.xi_bar), W);
    const Multivector s = (pref_s * c) * spin_density(m);
    for (std::size_t p = 0; p < B; ++p) {
      acc[p] += n[p];
      acc[B + p] += l[p];
      acc[2 * B + p] += s[p];
    }
  });
  NLS out{to_multivector(sig, 2, v.data()), to_multivector(sig, 2, v.data() + B),
          to_multivector(sig, 2, v.data() + 2 * B)};
  out.n += wedge(x_ell * eell, pi_flux(ms));
  return out;
}

Multivector spin_flux(const ModeSet& ms) {
  ms.validate();
  const Signature& sig = ms.sig;
  const std::size_t B = static_cast<std::size_t>(binomial(sig.d(), 2));
  const cplx pref = -kJ * kTwoPi * static_cast<double>(ell_orientation(sig, ms.ell));
  const auto v = tree_sum<cplx>(ms.modes.size(), B, [&](std::size_t i, cplx* acc) {
    const Mode& m = ms.modes[i];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    const Multivector s = spin_density(m);
    for (std::size_t p = 0; p < B; ++p) acc[p] += pref * c * s[p];
  });
  return to_multivector(sig, 2, v.data());
}

cplx l_component(const ModeSet& ms, const IndexList& I) {
  ms.validate();
  check_pair_index(ms, I, "l_component");
  require_gradients(ms, "l_component");
  const Signature& sig = ms.sig;
  const auto idx = I.indices();
  const int i = idx[0], j = idx[1];
  const cplx pref = kJ * kPi * parity(ms.r) * static_cast<double>(ell_orientation(sig, ms.ell));
  const auto v = tree_sum<cplx>(ms.modes.size(), 1, [&](std::size_t n, cplx* acc) {
    const Mode& m = ms.modes[n];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    const auto& masks = m.amp.masks();
    cplx s{};
    for (std::size_t K = 0; K < masks.size(); ++K) {
      const double dk = metric_delta_mask(masks[K], sig);
      const cplx a = m.amp[K];
      s += dk * (static_cast<double>(sig.delta(j)) * m.xi_bar[i] * std::conj(m.amp_grad[j][K]) * a -
                 static_cast<double>(sig.delta(i)) * m.xi_bar[j] * std::conj(m.amp_grad[i][K]) * a);
    }
    acc[0] += pref * c * (s - std::conj(s));
  });
  return v[0];
}

double l_component_circular(const ModeSet& ms, const IndexList& I) {
  ms.validate();
  check_pair_index(ms, I, "l_component_circular");
  require_gradients(ms, "l_component_circular");
  const Signature& sig = ms.sig;
  const auto idx = I.indices();
  const int i = idx[0], j = idx[1];
  const double rt = 1.0 / std::sqrt(2.0);
  const double pref = kTwoPi * parity(ms.r) * ell_orientation(sig, ms.ell);
  const auto v = tree_sum<double>(ms.modes.size(), 1, [&](std::size_t n, double* acc) {
    const Mode& m = ms.modes[n];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    const cplx xi_p = rt * cplx(m.xi_bar[i], -m.xi_bar[j]);
    const cplx xi_m = rt * cplx(-m.xi_bar[i], -m.xi_bar[j]);
    const Multivector di = static_cast<double>(sig.delta(i)) * m.amp_grad[i];
    const Multivector dj = static_cast<double>(sig.delta(j)) * m.amp_grad[j];
    const Multivector dp = rt * (di - kJ * dj);
    const Multivector dm = rt * (-di - kJ * dj);
    const cplx val = xi_p * dot(dp.conj(), m.amp) - xi_m * dot(dm.conj(), m.amp);
    acc[0] += pref * c * val.real();
  });
  return v[0];
}

double s_component(const ModeSet& ms, const IndexList& I) {
  ms.validate();
  check_pair_index(ms, I, "s_component");
  const Signature& sig = ms.sig;
  if (ms.r < 2) return 0.0;
  const auto idx = I.indices();
  const std::uint32_t bi = std::uint32_t{1} << idx[0], bj = std::uint32_t{1} << idx[1];
  const auto& lists = grade_masks(sig, ms.r - 2);
  const cplx pref = -kJ * kTwoPi * static_cast<double>(ell_orientation(sig, ms.ell));
  const auto v = tree_sum<cplx>(ms.modes.size(), 1, [&](std::size_t n, cplx* acc) {
    const Mode& m = ms.modes[n];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    cplx s{};
    for (std::uint32_t L : lists) {
      if (L & (bi | bj)) continue;
      const int sg = metric_delta_mask(L, sig) * sigma_mask(L, bi) * sigma_mask(bj, L);
      s += static_cast<double>(sg) * std::conj(m.amp[grade_position(sig, L | bi)]) *
           m.amp[grade_position(sig, L | bj)];
    }
    acc[0] += pref * c * (s - std::conj(s));
  });
  return v[0].real();
}

std::pair<Multivector, Multivector> circular_basis(const Signature& sig, const IndexList& I, double phi) {
  check_index_list(I, sig);
  if (I.size() != 2) throw DomainError("circular_basis: I must have two indices");
  const auto idx = I.indices();
  const int i = idx[0], j = idx[1];
  const double c = std::cos(phi), s = std::sin(phi);
  Multivector ep(sig, 1), em(sig, 1);
  ep[i] = c * sig.delta(i);
  ep[j] = -kJ * (s * sig.delta(j));
  em[i] = -s * sig.delta(i);
  em[j] = -kJ * (c * sig.delta(j));
  return {ep, em};
}

double s_component_circular(const ModeSet& ms, const IndexList& I) {
  ms.validate();
  check_pair_index(ms, I, "s_component_circular");
  if (ms.r < 2) return 0.0;
  const Signature& sig = ms.sig;
  const auto [ep, em] = circular_basis(sig, I, kPi / 4.0);
  const Multivector epc = ep.conj(), emc = em.conj();
  const double pref = kTwoPi * ell_orientation(sig, ms.ell);
  const auto v = tree_sum<double>(ms.modes.size(), 1, [&](std::size_t n, double* acc) {
    const Mode& m = ms.modes[n];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    const Multivector ac = m.amp.conj();
    const cplx right = dot(left_interior(epc, ac), right_interior(m.amp, ep));
    const cplx left = dot(left_interior(emc, ac), right_interior(m.amp, em));
    acc[0] += pref * c * (right - left).real();
  });
  return v[0];
}

double spin_canonical(const ModeSet& ms, const IndexList& I) {
  ms.validate();
  check_pair_index(ms, I, "spin_canonical");
  if (ms.r < 2) return 0.0;
  const Signature& sig = ms.sig;
  const auto idx = I.indices();
  const std::uint32_t bi = std::uint32_t{1} << idx[0], bj = std::uint32_t{1} << idx[1];
  const std::uint32_t excl = bi | bj | (std::uint32_t{1} << ms.ell);
  const auto& lists = grade_masks(sig, ms.r - 2);
  std::vector<std::uint32_t> keep;
  for (std::uint32_t L : lists)
    if (!(L & excl)) keep.push_back(L);
  const cplx pref = kJ * kTwoPi * static_cast<double>(ell_orientation(sig, ms.ell));
  const auto v = tree_sum<cplx>(ms.modes.size(), 1, [&](std::size_t n, cplx* acc) {
    const Mode& m = ms.modes[n];
    const double c = m.weight / (2.0 * mode_chi(ms, m));
    cplx s{};
    for (std::uint32_t L : keep) {
      const cplx ai = m.amp[grade_position(sig, L | bi)];
      const cplx aj = m.amp[grade_position(sig, L | bj)];
      const cplx t = ai * std::conj(aj);
      s += static_cast<double>(metric_delta_mask(L, sig) * sigma_mask(L, bi) * sigma_mask(bj, L)) * (t - std::conj(t));
    }
    acc[0] += pref * c * s;
  });
  return v[0].real();
}

FluxReport decompose(const ModeSet& ms, double x_ell, const SpacetimePoint& alpha) {
  ms.validate();
  check_alpha(ms, alpha, "alpha");
  FluxReport rep;
  rep.sig = ms.sig;
  rep.r = ms.r;
  rep.ell = ms.ell;
  rep.modes = ms.modes.size();
  rep.dropped = ms.dropped;
  rep.alpha = alpha;
  rep.x_ell = x_ell;
  rep.amp_norm = amp_norm_name(default_amp_norm());
  rep.reduction = "pairwise-tree/leaf" + std::to_string(kLeafSize);
  rep.pi_part = pi_flux(ms);
  NLS nls = nls_flux(ms, x_ell);
  rep.n_part = std::move(nls.n);
  rep.l_part = std::move(nls.l);
  rep.s_part = std::move(nls.s);
  rep.omega = rep.n_part + rep.l_part + rep.s_part - wedge(real_vector(ms.sig, alpha.x), rep.pi_part);
  for (Multivector* m : {&rep.omega, &rep.n_part, &rep.l_part, &rep.s_part, &rep.pi_part}) {
    rep.max_imag = std::max(rep.max_imag, m->max_imag());
    for (auto& v : m->coeffs()) v = v.real();
  }
  return rep;
}

}  // namespace rvf
