#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvfield/checks.hpp"

namespace rvf {

enum class Polarization { Random, Circular, Linear, Explicit, Zero };

struct PacketConfig {
  std::string section;
  std::vector<double> center;       // d-1, ell^c order
  double spread = 0.1;
  std::vector<double> half_width;   // d-1; defaults to 4 * spread
  std::vector<int> points;          // d-1
  Polarization polarization = Polarization::Random;
  std::vector<cplx> amp;            // explicit seed, canonical order of grade r-1
  std::vector<int> plane;           // two indices for circular / linear
  int handedness = 1;
  double scale = 1.0;
};

struct LatticeConfig {
  bool enabled = true;
  double half_width_sigmas = 6.0;
  int points = 48;
  std::optional<std::vector<double>> center;  // d-1; defaults to the group-velocity drift of packet 1
};

struct VerifyConfig {
  long trials = 1000;
  int points = 100;
  bool off_shell = false;
  std::vector<std::string> suites;  // empty means all
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  Signature sig{1, 3};
  int r = 2;
  int ell = 0;
  double x_ell = 0.0;
  std::vector<SpacetimePoint> alphas;  // at least one
  std::vector<PacketConfig> packets;
  LatticeConfig lattice;
  VerifyConfig verify;
};

// Throws ConfigError with the offending line and key.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);

// Builds every packet and merges them; an all-dropped packet set yields an empty ModeSet.
// The seed stream is advanced once per random seed polarization, in packet order.
struct BuiltField {
  ModeSet modes;
  std::vector<std::string> warnings;
  double sigma_x = 0.0;  // 1 / (2 pi spread) of packet 1
};
BuiltField build_field(const ScenarioConfig& cfg);

// Lattice from cfg.lattice around the packet drift at x_ell.
Lattice scenario_lattice(const ScenarioConfig& cfg, const BuiltField& field);

enum class Format { Csv, JsonLines };
Format parse_format(const std::string& s);
const char* format_extension(Format f);

struct CheckLine {
  std::string name;
  bool pass = true;
  double max_residual = 0.0;
  double tolerance = 0.0;
  long trials = 0;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckLine> checks;
  std::vector<std::string> warnings;
  bool all_pass() const;
};

VerifyReport run_verify(const ScenarioConfig& cfg);

struct DecomposeResult {
  ModeSet modes;
  std::vector<FluxReport> reports;           // one per alpha
  std::vector<RealspaceFlux> realspace;      // empty when the lattice is disabled
  std::vector<std::string> warnings;
};

DecomposeResult run_decompose(const ScenarioConfig& cfg, bool frequency = true, bool real = true);

// Writes modeset / flux_report / realspace / comparison files into dir; returns the written paths.
std::vector<std::string> write_decompose(const DecomposeResult& res, const std::string& dir, Format fmt);
std::vector<std::string> write_verify(const VerifyReport& rep, const std::string& dir, Format fmt);

// Emitters and the matching parsers.
void emit_flux_reports(std::ostream& os, const std::vector<FluxReport>& reps, Format fmt);
std::vector<FluxReport> parse_flux_reports(std::istream& is, Format fmt);
void emit_modeset_jsonl(std::ostream& os, const ModeSet& ms);
ModeSet parse_modeset_jsonl(std::istream& is);

// "%.17g" for every float in the output files.
std::string fmt17(double v);

}  // namespace rvf
