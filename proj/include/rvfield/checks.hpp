#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rvfield/angular_momentum.hpp"

namespace rvf {

// std::mt19937_64 stream; doubles are (x >> 11) * 2^-53, integers x mod span.
// Both maps are fixed so other implementations can reproduce the draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t next() { return g_(); }
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(g_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  cplx unit_square() {
    const double re = uniform(-1.0, 1.0);
    return {re, uniform(-1.0, 1.0)};
  }

 private:
  std::mt19937_64 g_;
};

Multivector random_multivector(Rng& rng, const Signature& sig, int grade, bool complex_coeffs = true);

// Largest residual seen over a batch, already divided by its scale.
struct Residual {
  double max_rel = 0.0;
  long trials = 0;
  void add(double v) {
    if (v > max_rel || v != v) max_rel = v;
    ++trials;
  }
  void merge(const Residual& o) {
    add(o.max_rel);
    trials += o.trials - 1;
  }
};

enum class Identity {
  InteriorAnticommute,  // u _| (v _| w) = -v _| (u _| w)
  InteriorOfWedge,      // u _| (v ^ w) = (-1)^r (u.v) w + v ^ (u _| w)
  DotExchange,          // (v^w).(v'^w') + (v'_|w).(v_|w') = (v.v')(w.w')
  Adjoint,              // (u^v).w = (-1)^{r-1} (u_|w).v
};

const char* identity_name(Identity id);
// Whether the identity is defined for an r-vector w in dimension d.
bool identity_applies(Identity id, int d, int r);
Residual check_identity(Identity id, Rng& rng, const Signature& sig, int r, long trials);

Residual check_odot_owedge_symmetry(Rng& rng, const Signature& sig, int r, long trials);
Residual check_stress_oracle(Rng& rng, const Signature& sig, int r, long trials);
// (1,3), r = 2: T_0j against (E x B)_j
Residual check_poynting(Rng& rng, long trials);

// Packet with its center well inside the null shell and a random constant seed.
GaussianPacketSpec random_packet_spec(Rng& rng, const Signature& sig, int r, int ell, int points);

// Largest gauge residual over all modes, and projection idempotence.
Residual check_gauge(const ModeSet& ms);

struct SpinTriangle {
  Residual spin;     // pairwise spread of the four spin routes over max |S_I|
  Residual orbital;  // l_component vs l_component_circular over max |L_I|
  double l_imag = 0; // largest |Im l_component| over max |L_I|
};
SpinTriangle check_spin_triangle(const ModeSet& ms);

// L and S components on lists containing ell, relative to the bivector scale.
Residual check_ell_exclusion(const ModeSet& ms, double x_ell);
Residual check_alpha_shift(const ModeSet& ms, double x_ell, const SpacetimePoint& alpha);

struct PointSet {
  std::vector<SpacetimePoint> points;
  double max_arm = 0.0;  // largest |x - alpha|_inf
};
// Points scattered over a box around the packet.
PointSet random_points(Rng& rng, const ModeSet& ms, const std::vector<double>& center,
                       const std::vector<double>& half, const SpacetimePoint& alpha, int count);

struct FieldResiduals {
  Residual maxwell_div;    // |d _| F| / (max|xi| max|F|)
  Residual maxwell_curl;   // |d ^ F| / same
  Residual stress_div;     // |d _| T| / (max|T| max|xi|)
  Residual moment_div;     // |d x M| / (max|T| (1 + max|xi| max|x - alpha|))
  Residual moment_identity;// |d x M - (x - alpha) ^ (d _| T)| / same
};
FieldResiduals check_field(const ModeSet& ms, const PointSet& pts, const SpacetimePoint& alpha);

}  // namespace rvf
