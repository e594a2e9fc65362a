#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rvfield/parallel.hpp"
#include "rvfield/scenario.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct Options {
  std::string config;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

rvf::ScenarioConfig load(const Options& o) {
  rvf::ScenarioConfig cfg = rvf::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "WARNING " << s << "\n";
}

int cmd_verify(const Options& o) {
  const auto cfg = load(o);
  const auto rep = rvf::run_verify(cfg);
  print_warnings(rep.warnings);
  for (const auto& c : rep.checks) {
    std::cout << fmt::format("{} {} max_residual={:.3e} tol={:.0e} trials={}", c.pass ? "PASS" : "FAIL", c.name,
                             c.max_residual, c.tolerance, c.trials);
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << "\n";
  }
  if (!o.out.empty())
    for (const auto& p : rvf::write_verify(rep, o.out, rvf::parse_format(o.format))) std::cerr << "wrote " << p << "\n";
  return rep.all_pass() ? kPass : kCheckFailed;
}

int cmd_decompose(const Options& o, bool frequency, bool real) {
  const auto cfg = load(o);
  const auto fmt = rvf::parse_format(o.format);
  const auto res = rvf::run_decompose(cfg, frequency, real);
  print_warnings(res.warnings);
  for (const auto& p : rvf::write_decompose(res, o.out, fmt)) std::cerr << "wrote " << p << "\n";
  return kPass;
}

void print_part(const char* name, const rvf::Multivector& m) {
  std::cout << fmt::format("  {:<6}", name);
  const auto& masks = m.masks();
  for (std::size_t p = 0; p < masks.size(); ++p)
    std::cout << fmt::format(" {}={:+.6e}", rvf::IndexList::from_mask(masks[p]).str(), m[p].real());
  std::cout << "\n";
}

int cmd_report(const Options& o) {
  const auto cfg = load(o);
  const auto res = rvf::run_decompose(cfg, true, true);
  print_warnings(res.warnings);
  for (std::size_t a = 0; a < res.reports.size(); ++a) {
    const auto& r = res.reports[a];
    std::string alpha;
    for (double v : r.alpha.x) alpha += fmt::format("{}{:g}", alpha.empty() ? "" : ",", v);
    std::cout << fmt::format("signature {} r={} ell={} x_ell={:g} alpha=({}) modes={} dropped={} norm={}\n",
                             r.sig.str(), r.r, r.ell, r.x_ell, alpha, r.modes, r.dropped, r.amp_norm);
    print_part("Omega", r.omega);
    print_part("N", r.n_part);
    print_part("L", r.l_part);
    print_part("S", r.s_part);
    print_part("Pi", r.pi_part);
    if (a < res.realspace.size()) {
      const auto& rs = res.realspace[a];
      print_part("Omega*", rs.omega);
      double worst = 0.0, scale = r.omega.max_abs();
      for (std::size_t p = 0; p < r.omega.size(); ++p) worst = std::max(worst, std::abs(r.omega[p] - rs.omega[p]));
      std::cout << fmt::format("  real-space max relative difference {:.3e} (edge fraction {:.2e})\n",
                               scale > 0.0 ? worst / scale : worst, rs.edge_fraction);
    }
  }
  if (!o.out.empty())
    for (const auto& p : rvf::write_decompose(res, o.out, rvf::parse_format(o.format))) std::cerr << "wrote " << p << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-momentum and angular-momentum fluxes of r-vector fields"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool need_out) {
    sub->add_option("--config", o.config, "scenario file")->required()->check(CLI::ExistingFile);
    auto* out = sub->add_option("--out", o.out, "output directory");
    if (need_out) out->required();
    sub->add_option("--format", o.format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", seed, "override the scenario seed");
  };
  auto* verify = app.add_subcommand("verify", "run the identity and oracle suites");
  auto* decompose = app.add_subcommand("decompose", "frequency-space decomposition and real-space comparison");
  auto* flux = app.add_subcommand("flux", "real-space flux only");
  auto* report = app.add_subcommand("report", "print the decomposition as a table");
  add_common(verify, false);
  add_common(decompose, true);
  add_common(flux, true);
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  for (auto* sub : {verify, decompose, flux, report})
    if (sub->parsed() && sub->count("--seed")) o.seed = seed;

  try {
    rvf::set_num_threads(o.threads);
    if (verify->parsed()) return cmd_verify(o);
    if (decompose->parsed()) return cmd_decompose(o, true, true);
    if (flux->parsed()) return cmd_decompose(o, false, true);
    return cmd_report(o);
  } catch (const rvf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
