#include "rvfield/field_config.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rvfield/parallel.hpp"

namespace rvf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kJ{0.0, 1.0};

void check_ell(const Signature& sig, int ell) {
  if (ell < 0 || ell >= sig.d()) throw DomainError("ell out of range");
}

}  // namespace

bool ModeSet::has_gradients() const {
  for (const auto& m : modes)
    if (m.amp_grad.size() != static_cast<std::size_t>(sig.d())) return false;
  return true;
}

void ModeSet::validate() const {
  const int d = sig.d();
  check_ell(sig, ell);
  if (r < 1 || r > d - 1) throw DomainError("mode set: need 1 <= r <= d-1");
  for (const auto& m : modes) {
    if (m.xi_bar.size() != static_cast<std::size_t>(d)) throw DomainError("mode: xi_bar needs d entries");
    if (m.xi_bar[ell] != 0.0) throw DomainError("mode: xi_bar has a nonzero ell component");
    if (!(m.amp.sig() == sig) || m.amp.grade() != r - 1) throw DomainError("mode: amplitude must have grade r-1");
    if (!std::isfinite(m.weight)) throw DomainError("mode: weight must be finite");
    if (!m.amp_grad.empty() && m.amp_grad.size() != static_cast<std::size_t>(d))
      throw DomainError("mode: amp_grad needs d entries");
  }
}

std::vector<int> reduced_axes(const Signature& sig, int ell) {
  check_ell(sig, ell);
  std::vector<int> ax;
  for (int t = 0; t < sig.d(); ++t)
    if (t != ell) ax.push_back(t);
  return ax;
}

std::vector<double> embed_reduced(const std::vector<double>& reduced, const Signature& sig, int ell) {
  const auto ax = reduced_axes(sig, ell);
  if (reduced.size() != ax.size()) throw DomainError("reduced vector needs d-1 entries");
  std::vector<double> x(static_cast<std::size_t>(sig.d()), 0.0);
  for (std::size_t a = 0; a < ax.size(); ++a) x[ax[a]] = reduced[a];
  return x;
}

double chi_ell(const std::vector<double>& xi_bar, int ell, const Signature& sig) {
  check_ell(sig, ell);
  if (xi_bar.size() != static_cast<std::size_t>(sig.d())) throw DomainError("chi_ell: xi_bar needs d entries");
  if (xi_bar[ell] != 0.0) throw DomainError("chi_ell: xi_bar has a nonzero ell component");
  double q = 0.0, scale = 0.0;
  for (int t = 0; t < sig.d(); ++t) {
    q += sig.delta(t) * xi_bar[t] * xi_bar[t];
    scale += xi_bar[t] * xi_bar[t];
  }
  q *= -sig.delta(ell);
  if (q < -1e-14 * scale) throw OutsideShellError("chi_ell: frequency lies outside the null shell");
  return std::sqrt(std::max(q, 0.0));
}

std::vector<double> xi_plus(const std::vector<double>& xi_bar, int ell, const Signature& sig, double detune) {
  std::vector<double> xp = xi_bar;
  xp[ell] = chi_ell(xi_bar, ell, sig) + detune;
  return xp;
}

double mode_chi(const ModeSet& ms, const Mode& m) { return chi_ell(m.xi_bar, ms.ell, ms.sig); }

std::vector<double> mode_xi_plus(const ModeSet& ms, const Mode& m) {
  return xi_plus(m.xi_bar, ms.ell, ms.sig, m.detune);
}

namespace {

struct Projector {
  Multivector qa;    // amp with ell-blades removed
  Multivector nhat;  // unit Euclidean normal of the constraint
  double unorm = 0;
  int s = 0;
};

Projector make_projector(const Multivector& amp, const std::vector<double>& xp, int ell) {
  const Signature& sig = amp.sig();
  const int d = sig.d();
  check_ell(sig, ell);
  if (xp.size() != static_cast<std::size_t>(d)) throw DomainError("coulomb_project: xi needs d entries");
  Projector p{amp, Multivector(sig, 1), 0.0, amp.grade()};
  const auto& masks = amp.masks();
  for (std::size_t q = 0; q < masks.size(); ++q)
    if ((masks[q] >> ell) & 1u) p.qa[q] = 0.0;
  double n2 = 0;
  for (int t = 0; t < d; ++t)
    if (t != ell) n2 += xp[t] * xp[t];
  p.unorm = std::sqrt(n2);
  if (p.unorm == 0.0 || std::abs(xp[ell]) <= 1e-15 * p.unorm)
    throw DegenerateDirectionError("coulomb_project: chi = 0, constraint direction undefined");
  for (int t = 0; t < d; ++t)
    if (t != ell) p.nhat[t] = sig.delta(t) * xp[t] / p.unorm;
  return p;
}

}  // namespace

Multivector coulomb_project(const Multivector& amp, const std::vector<double>& xp, int ell) {
  Projector p = make_projector(amp, xp, ell);
  if (p.s == 0) return p.qa;
  Multivector out = p.qa;
  Multivector corr = wedge(p.nhat, euclidean_left_interior(p.nhat, p.qa));
  if (p.s & 1)
    out -= corr;
  else
    out += corr;
  return out;
}

std::vector<Multivector> coulomb_project_gradient(const Multivector& amp, const std::vector<double>& xp,
                                                  int ell) {
  Projector p = make_projector(amp, xp, ell);
  const Signature& sig = amp.sig();
  const int d = sig.d();
  std::vector<Multivector> out(static_cast<std::size_t>(d), Multivector(sig, amp.grade()));
  if (p.s == 0) return out;
  const Multivector y = euclidean_left_interior(p.nhat, p.qa);
  const double sgn = (p.s & 1) ? -1.0 : 1.0;
  for (int t = 0; t < d; ++t) {
    if (t == ell) continue;
    Multivector dn = (-p.nhat[t].real()) * p.nhat;
    dn[t] += 1.0;
    dn *= sig.delta(t) / p.unorm;
    Multivector g = wedge(dn, y) + wedge(p.nhat, euclidean_left_interior(dn, p.qa));
    out[t] = sgn * g;
  }
  return out;
}

ModeSet make_gaussian_packet(const GaussianPacketSpec& spec, int ell) {
  const Signature sig = spec.seed.sig();
  const int d = sig.d();
  ModeSet ms;
  ms.sig = sig;
  ms.r = spec.seed.grade() + 1;
  ms.ell = ell;
  check_ell(sig, ell);
  if (ms.r > d - 1) throw DomainError("gaussian packet: seed grade must be at most d-2");
  const std::size_t nd = static_cast<std::size_t>(d - 1);
  if (spec.center.size() != nd || spec.grid.size() != nd)
    throw DomainError("gaussian packet: center and grid need d-1 entries");
  if (!(spec.spread > 0.0) || !std::isfinite(spec.spread)) throw DomainError("gaussian packet: spread must be > 0");

  ModeGrid grid;
  grid.axes = reduced_axes(sig, ell);
  double cell_volume = 1.0, scale = 0.0;
  std::size_t total = 1;
  for (std::size_t a = 0; a < nd; ++a) {
    const GridAxis& g = spec.grid[a];
    if (g.points < 1) throw DomainError("gaussian packet: grid needs at least one point per axis");
    if (g.half_width < 4.0 * spec.spread * (1.0 - 1e-12))
      throw DomainError("gaussian packet: grid must cover at least 4 spreads around the center");
    const double h = 2.0 * g.half_width / g.points;
    std::vector<double> c(static_cast<std::size_t>(g.points));
    for (int m = 0; m < g.points; ++m) c[m] = spec.center[a] - g.half_width + (m + 0.5) * h;
    grid.coords.push_back(std::move(c));
    cell_volume *= h;
    scale = std::max(scale, std::abs(spec.center[a]) + g.half_width);
    total *= static_cast<std::size_t>(g.points);
  }
  const double chi_min = 1e-9 * scale;
  const double inv_s2 = 1.0 / (spec.spread * spec.spread);

  for (std::size_t f = 0; f < total; ++f) {
    std::vector<double> red(nd);
    std::size_t rem = f;
    for (std::size_t a = nd; a-- > 0;) {
      const std::size_t np = grid.coords[a].size();
      red[a] = grid.coords[a][rem % np];
      rem /= np;
    }
    Mode m;
    m.xi_bar = embed_reduced(red, sig, ell);
    double q = 0.0;
    for (int t = 0; t < d; ++t) q += sig.delta(t) * m.xi_bar[t] * m.xi_bar[t];
    q *= -sig.delta(ell);
    if (q <= chi_min * chi_min) {
      ++ms.dropped;
      continue;
    }
    const double chi = std::sqrt(q);
    if (chi <= chi_min) {
      ++ms.dropped;
      continue;
    }
    std::vector<double> xp = m.xi_bar;
    xp[ell] = chi;
    double r2 = 0.0;
    for (std::size_t a = 0; a < nd; ++a) r2 += (red[a] - spec.center[a]) * (red[a] - spec.center[a]);
    const double env = std::exp(-0.5 * r2 * inv_s2);
    const Multivector proj = coulomb_project(spec.seed, xp, ell);
    const auto dproj = coulomb_project_gradient(spec.seed, xp, ell);
    m.weight = cell_volume;
    m.amp = env * proj;
    m.amp_grad.assign(static_cast<std::size_t>(d), Multivector(sig, ms.r - 1));
    for (std::size_t a = 0; a < nd; ++a) {
      const int t = grid.axes[a];
      const double denv = -(red[a] - spec.center[a]) * inv_s2 * env;
      m.amp_grad[t] = denv * proj + env * dproj[t];
    }
    ms.modes.push_back(std::move(m));
    grid.cell.push_back(f);
  }
  if (ms.modes.empty()) throw EmptyFieldError("gaussian packet: every grid point was dropped");
  ms.grid = std::move(grid);
  return ms;
}

long long admissible_dimension(const Signature& sig, int r) {
  if (sig.d() >= 4 && r >= 2) return binomial(sig.d() - 4, r - 2);
  return spin_subspace_rank(sig, r);
}

int spin_subspace_rank(const Signature& sig, int r) {
  const int d = sig.d();
  if (r < 2 || d < 4 || r > d - 1) return 0;
  if (sig.k == 0 || sig.n == 0) throw DomainError("spin_subspace_rank: a definite signature has no null shell");
  // ell temporal, m spatial carries the frequency, (i, j) transverse to both
  const int ell = 0, m = d - 1;
  std::vector<int> rest;
  for (int t = 1; t < m; ++t) rest.push_back(t);
  const int i = rest[0], j = rest[1];
  std::vector<double> xb(static_cast<std::size_t>(d), 0.0);
  xb[m] = 1.0;
  for (std::size_t q = 2; q < rest.size(); ++q) xb[rest[q]] = (rest[q] < sig.k ? 0.05 : 0.3) * (1.0 + 0.37 * q);
  const auto xp = xi_plus(xb, ell, sig);
  const std::uint32_t I = (std::uint32_t{1} << i) | (std::uint32_t{1} << j);
  std::vector<Multivector> cols;
  for (std::uint32_t L : grade_masks(sig, r - 2)) {
    if (L & I) continue;
    cols.push_back(coulomb_project(
        Multivector::blade(sig, IndexList::from_mask(L | (std::uint32_t{1} << i)), 1.0), xp, ell));
  }
  if (cols.empty()) return 0;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(cols[0].size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t p = 0; p < cols[c].size(); ++p)
      A(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = cols[c][p].real();
  // columns are projected unit blades, so an absolute cutoff is meaningful
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  return static_cast<int>((sv.array() > 1e-10).count());
}

namespace {

struct Term {
  double c = 0;             // weight / (2 chi)
  std::vector<double> xp;   // xi_plus
  Multivector amp;          // A hat
  Multivector famp;         // j 2 pi xi+ ^ A hat
};

std::vector<Term> prepare(const ModeSet& ms, bool need_field) {
  ms.validate();
  std::vector<Term> out;
  out.reserve(ms.modes.size());
  for (const auto& m : ms.modes) {
    Term t;
    const double chi = mode_chi(ms, m);
    t.c = m.weight / (2.0 * chi);
    t.xp = mode_xi_plus(ms, m);
    t.amp = m.amp;
    if (need_field) t.famp = (kJ * kTwoPi) * wedge(Multivector::vector(ms.sig, t.xp), m.amp);
    out.push_back(std::move(t));
  }
  return out;
}

cplx phase(const Signature& sig, const std::vector<double>& xp, const std::vector<double>& x) {
  double th = 0.0;
  for (int t = 0; t < sig.d(); ++t) th += sig.delta(t) * xp[t] * x[t];
  th *= kTwoPi;
  return {std::cos(th), std::sin(th)};
}

void check_point(const ModeSet& ms, const SpacetimePoint& x) {
  if (x.x.size() != static_cast<std::size_t>(ms.sig.d())) throw DomainError("point needs d coordinates");
}

Multivector from_real(const Signature& sig, int grade, const double* v) {
  Multivector m(sig, grade);
  for (std::size_t p = 0; p < m.size(); ++p) m[p] = v[p];
  return m;
}

// Evaluates sum_m c_m 2 Re[e^{j theta} X_m] together with its d gradient
// components when grad is set. Output layout: [value | d_0 | ... | d_{d-1}].
std::vector<double> eval_real(const ModeSet& ms, const std::vector<Term>& terms, const SpacetimePoint& x,
                              bool use_field, bool grad) {
  const Signature& sig = ms.sig;
  const int d = sig.d();
  const int grade = use_field ? ms.r : ms.r - 1;
  const std::size_t w = static_cast<std::size_t>(binomial(d, grade));
  const std::size_t blocks = grad ? static_cast<std::size_t>(d) + 1 : 1;
  return tree_sum<double>(terms.size(), w * blocks, [&](std::size_t i, double* acc) {
    const Term& t = terms[i];
    const Multivector& X = use_field ? t.famp : t.amp;
    const cplx e = phase(sig, t.xp, x.x);
    for (std::size_t p = 0; p < w; ++p) {
      const cplx v = e * X[p];
      acc[p] += 2.0 * t.c * v.real();
      if (!grad) continue;
      for (int k = 0; k < d; ++k) {
        const cplx dv = (kJ * (kTwoPi * sig.delta(k) * t.xp[k])) * v;
        acc[w * (static_cast<std::size_t>(k) + 1) + p] += 2.0 * t.c * dv.real();
      }
    }
  });
}

std::vector<Multivector> split(const ModeSet& ms, int grade, const std::vector<double>& v, std::size_t blocks) {
  const std::size_t w = static_cast<std::size_t>(binomial(ms.sig.d(), grade));
  std::vector<Multivector> out;
  for (std::size_t b = 0; b < blocks; ++b) out.push_back(from_real(ms.sig, grade, v.data() + b * w));
  return out;
}

}  // namespace

Multivector potential_at(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const auto terms = prepare(ms, false);
  return split(ms, ms.r - 1, eval_real(ms, terms, x, false, false), 1)[0];
}

Multivector field_at(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const auto terms = prepare(ms, true);
  return split(ms, ms.r, eval_real(ms, terms, x, true, false), 1)[0];
}

std::vector<Multivector> potential_gradient_at(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const auto terms = prepare(ms, false);
  auto all = split(ms, ms.r - 1, eval_real(ms, terms, x, false, true), static_cast<std::size_t>(ms.sig.d()) + 1);
  all.erase(all.begin());
  return all;
}

std::vector<Multivector> field_gradient_at(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const auto terms = prepare(ms, true);
  auto all = split(ms, ms.r, eval_real(ms, terms, x, true, true), static_cast<std::size_t>(ms.sig.d()) + 1);
  all.erase(all.begin());
  return all;
}

std::pair<Multivector, Multivector> maxwell_residuals(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const Signature& sig = ms.sig;
  const auto terms = prepare(ms, true);
  std::vector<Multivector> div, curl;
  for (const auto& t : terms) {
    const Multivector xi = Multivector::vector(sig, t.xp);
    div.push_back((kJ * kTwoPi) * left_interior(xi, t.famp));
    curl.push_back((kJ * kTwoPi) * wedge(xi, t.famp));
  }
  const std::size_t wd = div.empty() ? static_cast<std::size_t>(binomial(sig.d(), ms.r - 1)) : div[0].size();
  const std::size_t wc = static_cast<std::size_t>(binomial(sig.d(), ms.r + 1));
  auto v = tree_sum<double>(terms.size(), wd + wc, [&](std::size_t i, double* acc) {
    const cplx e = phase(sig, terms[i].xp, x.x);
    for (std::size_t p = 0; p < wd; ++p) acc[p] += 2.0 * terms[i].c * (e * div[i][p]).real();
    for (std::size_t p = 0; p < wc; ++p) acc[wd + p] += 2.0 * terms[i].c * (e * curl[i][p]).real();
  });
  return {from_real(sig, ms.r - 1, v.data()), from_real(sig, ms.r + 1, v.data() + wd)};
}

double lagrangian_density(const Multivector& F, const Multivector& A, const Multivector& J) {
  const int r = F.grade();
  if (r < 1 || A.grade() != r - 1 || J.grade() != r - 1)
    throw DomainError("lagrangian_density: need grades r, r-1, r-1");
  const double pref = ((r - 1) & 1) ? -0.5 : 0.5;
  return (pref * dot(F, F) + dot(A, J)).real();
}

Multivector lorentz_force(const Multivector& J, const Multivector& F) {
  if (J.grade() + 1 != F.grade()) throw DomainError("lorentz_force: J must have grade r-1");
  return left_interior(J, F);
}

Rank2Tensor stress_tensor_at(const ModeSet& ms, const SpacetimePoint& x) {
  return stress_tensor(field_at(ms, x));
}

std::vector<Rank2Tensor> stress_gradient_at(const ModeSet& ms, const SpacetimePoint& x) {
  check_point(ms, x);
  const auto terms = prepare(ms, true);
  const int d = ms.sig.d();
  auto all = split(ms, ms.r, eval_real(ms, terms, x, true, true), static_cast<std::size_t>(d) + 1);
  const Multivector& F = all[0];
  std::vector<Rank2Tensor> out;
  for (int k = 0; k < d; ++k) {
    const Multivector& dF = all[static_cast<std::size_t>(k) + 1];
    Rank2Tensor t = odot(dF, F) + odot(F, dF) + owedge(dF, F) + owedge(F, dF);
    out.push_back(t *= -0.5);
  }
  return out;
}

Multivector stress_divergence_at(const ModeSet& ms, const SpacetimePoint& x) {
  const auto g = stress_gradient_at(ms, x);
  const int d = ms.sig.d();
  Multivector out(ms.sig, 1);
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j) out[l] += g[j](j, l);
  return out;
}

void write_modeset(std::ostream& os, const ModeSet& ms) {
  ms.validate();
  const auto ax = reduced_axes(ms.sig, ms.ell);
  os << fmt::format("modeset {} {} {} {} 1\n", ms.sig.k, ms.sig.n, ms.r, ms.ell);
  for (const auto& m : ms.modes) {
    if (m.detune != 0.0) throw IoError("write_modeset: off-shell modes cannot be serialized");
    std::string line;
    for (int a : ax) line += fmt::format("{:.17g} ", m.xi_bar[a]);
    line += fmt::format("{:.17g}", m.weight);
    for (const auto& c : m.amp.coeffs()) line += fmt::format(" {:.17g} {:.17g}", c.real(), c.imag());
    os << line << '\n';
  }
  if (!os) throw IoError("write_modeset: stream error");
}

ModeSet read_modeset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("read_modeset: missing header");
  std::istringstream hs(line);
  std::string tag;
  int k = -1, n = -1, r = -1, ell = -1, ver = -1;
  if (!(hs >> tag >> k >> n >> r >> ell >> ver) || tag != "modeset")
    throw IoError("read_modeset: malformed header");
  if (ver != 1) throw IoError("read_modeset: unsupported format version");
  ModeSet ms;
  ms.sig = Signature(k, n);
  ms.r = r;
  ms.ell = ell;
  check_ell(ms.sig, ell);
  if (r < 1 || r > ms.sig.d() - 1) throw IoError("read_modeset: bad grade");
  const auto ax = reduced_axes(ms.sig, ell);
  const std::size_t na = static_cast<std::size_t>(binomial(ms.sig.d(), r - 1));
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> red(ax.size());
    Mode m;
    for (auto& v : red)
      if (!(ls >> v)) throw IoError("read_modeset: line " + std::to_string(lineno) + ": short record");
    if (!(ls >> m.weight)) throw IoError("read_modeset: line " + std::to_string(lineno) + ": missing weight");
    m.xi_bar = embed_reduced(red, ms.sig, ell);
    m.amp = Multivector(ms.sig, r - 1);
    for (std::size_t p = 0; p < na; ++p) {
      double re, im;
      if (!(ls >> re >> im)) throw IoError("read_modeset: line " + std::to_string(lineno) + ": short amplitude");
      m.amp[p] = {re, im};
    }
    std::string extra;
    if (ls >> extra) throw IoError("read_modeset: line " + std::to_string(lineno) + ": trailing data");
    ms.modes.push_back(std::move(m));
  }
  ms.validate();
  return ms;
}

}  // namespace rvf
