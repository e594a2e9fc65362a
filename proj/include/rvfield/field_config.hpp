#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "rvfield/tensor_algebra.hpp"

namespace rvf {

// One null-shell mode, + branch. The - branch is implied by hermiticity.
struct Mode {
  std::vector<double> xi_bar;          // d entries, xi_bar[ell] == 0
  double weight = 0.0;                 // quadrature weight for d xi_{ell^c}
  Multivector amp;                     // grade r-1
  std::vector<Multivector> amp_grad;   // d(amp)/d(xi_t), d entries (entry ell zero), or empty
  double detune = 0.0;                 // added to chi in the ell component; off-shell tests only
};

// Rectangular layout of a mode set built on a grid (enables separable evaluation).
struct ModeGrid {
  std::vector<int> axes;                    // ell^c indices, ascending
  std::vector<std::vector<double>> coords;  // frequency values per axis
  std::vector<std::size_t> cell;            // per mode: row-major flat grid index
};

struct ModeSet {
  Signature sig;
  int r = 2;
  int ell = 0;
  std::vector<Mode> modes;
  std::size_t dropped = 0;
  std::optional<ModeGrid> grid;

  bool has_gradients() const;
  void validate() const;
};

struct GridAxis {
  double half_width = 0.0;
  int points = 1;
};

struct GaussianPacketSpec {
  std::vector<double> center;  // d-1 entries, ell^c order
  double spread = 1.0;
  Multivector seed;            // grade r-1, constant over the packet
  std::vector<GridAxis> grid;  // d-1 entries, ell^c order; midpoint cells
};

// ell^c indices in ascending order.
std::vector<int> reduced_axes(const Signature& sig, int ell);
// Places d-1 reduced components into a d-vector with zero at ell.
std::vector<double> embed_reduced(const std::vector<double>& reduced, const Signature& sig, int ell);

double chi_ell(const std::vector<double>& xi_bar, int ell, const Signature& sig);
std::vector<double> xi_plus(const std::vector<double>& xi_bar, int ell, const Signature& sig,
                            double detune = 0.0);
double mode_chi(const ModeSet& ms, const Mode& m);
std::vector<double> mode_xi_plus(const ModeSet& ms, const Mode& m);

ModeSet make_gaussian_packet(const GaussianPacketSpec& spec, int ell);

Multivector coulomb_project(const Multivector& amp, const std::vector<double>& xi_plus, int ell);
// d(P amp)/d(xi_t) for fixed amp, t over all d indices (entry ell is zero).
std::vector<Multivector> coulomb_project_gradient(const Multivector& amp,
                                                  const std::vector<double>& xi_plus, int ell);

long long admissible_dimension(const Signature& sig, int r);
// Numerical rank of the projected span of {e_i ^ e_L : L disjoint from (i,j)}.
int spin_subspace_rank(const Signature& sig, int r);

Multivector potential_at(const ModeSet& ms, const SpacetimePoint& x);
Multivector field_at(const ModeSet& ms, const SpacetimePoint& x);
// d_i A and d_i F at x, i in [0,d)
std::vector<Multivector> potential_gradient_at(const ModeSet& ms, const SpacetimePoint& x);
std::vector<Multivector> field_gradient_at(const ModeSet& ms, const SpacetimePoint& x);

// (d _| F, d ^ F)
std::pair<Multivector, Multivector> maxwell_residuals(const ModeSet& ms, const SpacetimePoint& x);

double lagrangian_density(const Multivector& F, const Multivector& A, const Multivector& J);
Multivector lorentz_force(const Multivector& J, const Multivector& F);

Rank2Tensor stress_tensor_at(const ModeSet& ms, const SpacetimePoint& x);
// d_k T for k in [0,d)
std::vector<Rank2Tensor> stress_gradient_at(const ModeSet& ms, const SpacetimePoint& x);
// (d _| T)_l = sum_j d_j T_jl
Multivector stress_divergence_at(const ModeSet& ms, const SpacetimePoint& x);

// Line-oriented text format; gradients and detuning are not serialized.
void write_modeset(std::ostream& os, const ModeSet& ms);
ModeSet read_modeset(std::istream& is);

}  // namespace rvf
