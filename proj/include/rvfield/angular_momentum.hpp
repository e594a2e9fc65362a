#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvfield/field_config.hpp"

namespace rvf {

// How |A hat|^2 is contracted inside the energy-momentum flux.
enum class AmpNorm {
  Metric,     // sum_K Delta_KK |A_K|^2
  Euclidean,  // sum_K |A_K|^2
};

AmpNorm default_amp_norm();
const char* amp_norm_name(AmpNorm n);

struct FluxReport {
  Multivector omega;
  Multivector n_part;
  Multivector l_part;
  Multivector s_part;
  Multivector pi_part;
  SpacetimePoint alpha;
  double x_ell = 0.0;

  Signature sig;
  int r = 2;
  int ell = 0;
  std::size_t modes = 0;
  std::size_t dropped = 0;
  std::string amp_norm;
  std::string reduction;
  double max_imag = 0.0;  // largest imaginary residue before the parts were made real
};

// Midpoint lattice over the ell^c coordinates, d-1 entries each.
struct Lattice {
  std::vector<double> center;
  std::vector<double> half_width;
  std::vector<int> points;
};

struct RealspaceFlux {
  Multivector omega;
  Multivector pi;          // same-lattice sum of sigma T_{eps(ell,j)} e_j
  std::vector<double> spacing;
  Lattice lattice;
  double edge_fraction = 0.0;  // share of |T_{ell ell}| on the lattice boundary
  bool undersized = false;
  bool separable = false;
};

Rank3MomentTensor moment_tensor_at(const ModeSet& ms, const SpacetimePoint& x, const SpacetimePoint& alpha);
// sum_j d_j M[j][I] e_I, via the product rule on (x - alpha) boxwedge T
Multivector moment_divergence_at(const ModeSet& ms, const SpacetimePoint& x, const SpacetimePoint& alpha);

RealspaceFlux realspace_omega_flux(const ModeSet& ms, int ell, double x_ell, const SpacetimePoint& alpha,
                                   const Lattice& lattice, bool allow_separable = true);

Multivector pi_flux(const ModeSet& ms, AmpNorm norm = default_amp_norm());

struct NLS {
  Multivector n;
  Multivector l;
  Multivector s;
};

NLS nls_flux(const ModeSet& ms, double x_ell);
Multivector spin_flux(const ModeSet& ms);

cplx l_component(const ModeSet& ms, const IndexList& I);
double l_component_circular(const ModeSet& ms, const IndexList& I);
double s_component(const ModeSet& ms, const IndexList& I);
double s_component_circular(const ModeSet& ms, const IndexList& I);
double spin_canonical(const ModeSet& ms, const IndexList& I);

std::pair<Multivector, Multivector> circular_basis(const Signature& sig, const IndexList& I, double phi);

FluxReport decompose(const ModeSet& ms, double x_ell, const SpacetimePoint& alpha);

// sigma((ell), ell^c)
int ell_orientation(const Signature& sig, int ell);

}  // namespace rvf
