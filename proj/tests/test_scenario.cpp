#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rvfield/parallel.hpp"
#include "rvfield/scenario.hpp"

using namespace rvf;

namespace {

const char* kSmall = R"([scenario]
seed = 5
k = 1
n = 3
r = 2
ell = 0
x_ell = 0.25
alpha = 0,0,0,0; 0,0.3,-0.2,0.1; 0.5,1,2,-1

[packet]
center = 0.15, -0.1, 1.0
spread = 0.1
points = 6
polarization = circular
plane = 1, 2

[lattice]
half_width_sigmas = 6
points = 16

[verify]
trials = 50
points = 10
)";

ScenarioConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("parse a scenario") {
  const ScenarioConfig cfg = parse(kSmall);
  CHECK(cfg.seed == 5);
  CHECK(cfg.sig.k == 1);
  CHECK(cfg.sig.n == 3);
  CHECK(cfg.x_ell == 0.25);
  REQUIRE(cfg.alphas.size() == 3);
  CHECK(cfg.alphas[2].x == std::vector<double>{0.5, 1, 2, -1});
  REQUIRE(cfg.packets.size() == 1);
  CHECK(cfg.packets[0].polarization == Polarization::Circular);
  CHECK(cfg.packets[0].half_width == std::vector<double>(3, 0.4));
  CHECK(cfg.lattice.points == 16);
  CHECK(cfg.verify.trials == 50);
}

TEST_CASE("config errors carry the line") {
  CHECK(error_line(replace(kSmall, "spread = 0.1", "spread = -0.1")) == 12);
  CHECK(error_line(replace(kSmall, "points = 6", "pionts = 6")) == 13);
  CHECK(error_line(replace(kSmall, "[lattice]", "[latice]")) == 17);
  CHECK(error_line(replace(kSmall, "ell = 0\n", "ell = 7\n")) == 6);
  CHECK(error_line(replace(kSmall, "plane = 1, 2", "plane = 0, 2")) == 15);
  CHECK(error_line(replace(kSmall, "seed = 5\n", "")) >= 0);
  CHECK_THROWS_AS(parse(replace(kSmall, "alpha = 0,0,0,0;", "alpha = 0,0,0;")), ConfigError);
  CHECK_THROWS_AS(parse(replace(kSmall, "points = 10", "points = 0")), ConfigError);
  CHECK_THROWS_AS(parse("[scenario]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.ini"), ConfigError);
}

TEST_CASE("fuzzed configs fail only with config errors") {
  const std::string base = kSmall;
  std::vector<std::string> lines;
  {
    std::istringstream is(base);
    for (std::string l; std::getline(is, l);) lines.push_back(l);
  }
  const std::vector<std::string> tokens = {"",    "-1",  "0",   "1e308", "nan", "inf",  "abc", "1,2", "3;4",
                                           "0:1", "=",   "[",   "]",     "1.5", "9999", "-0",  "true", "0x10",
                                           "1, 2, 3, 4, 5", "1e-300", "  ", "\"q\""};
  Rng rng(2024);
  int parsed = 0, built = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> m = lines;
    const int edits = rng.integer(1, 3);
    for (int e = 0; e < edits; ++e) {
      const int i = rng.integer(0, static_cast<int>(m.size()) - 1);
      switch (rng.integer(0, 4)) {
        case 0: m.erase(m.begin() + i); break;
        case 1: m.insert(m.begin() + i, m[static_cast<std::size_t>(i)]); break;
        case 2: {
          const auto eq = m[i].find('=');
          if (eq != std::string::npos) m[i] = m[i].substr(0, eq + 1) + " " + tokens[rng.integer(0, 21)];
          break;
        }
        case 3: m[i] = m[i].substr(0, static_cast<std::size_t>(rng.integer(0, static_cast<int>(m[i].size())))); break;
        default: m.insert(m.begin() + i, tokens[rng.integer(0, 21)] + " = " + tokens[rng.integer(0, 21)]); break;
      }
      if (m.empty()) m.push_back("");
    }
    std::string text;
    for (const auto& l : m) text += l + "\n";
    try {
      const ScenarioConfig cfg = parse(text);
      ++parsed;
      std::size_t total = 1;
      for (const auto& p : cfg.packets)
        for (int q : p.points) total *= static_cast<std::size_t>(q);
      if (total <= 20000) {
        build_field(cfg);
        ++built;
      }
    } catch (const ConfigError&) {
    } catch (const std::exception& e) {
      FAIL("mutation " << t << " threw a non-config error: " << e.what() << "\n" << text);
    }
  }
  CHECK(parsed > 50);
  CHECK(built > 50);
}

TEST_CASE("verify the shipped scenarios") {
  for (const char* name : {"default", "circular", "lorentzian_1_5"}) {
    ScenarioConfig cfg = load_config(std::string(RVFIELD_SOURCE_DIR) + "/scenarios/" + name + ".ini");
    cfg.verify.trials = 50;
    cfg.verify.points = 10;
    const VerifyReport rep = run_verify(cfg);
    INFO(name);
    for (const auto& c : rep.checks) {
      INFO(c.name << " " << c.max_residual);
      CHECK(c.pass);
    }
  }

  const VerifyReport off = run_verify(load_config(std::string(RVFIELD_SOURCE_DIR) + "/scenarios/off_shell.ini"));
  CHECK_FALSE(off.all_pass());
  for (const auto& c : off.checks) {
    if (c.name == "maxwell.div" || c.name == "conservation.stress_div") CHECK_FALSE(c.pass);
    if (c.name == "conservation.moment_identity" || c.name.rfind("identities.", 0) == 0) CHECK(c.pass);
  }

  const VerifyReport empty = run_verify(load_config(std::string(RVFIELD_SOURCE_DIR) + "/scenarios/empty.ini"));
  CHECK(empty.all_pass());
  REQUIRE_FALSE(empty.warnings.empty());
  CHECK(empty.warnings[0].find("empty field") != std::string::npos);
}

TEST_CASE("decompose output") {
  const ScenarioConfig cfg = parse(kSmall);
  set_num_threads(1);
  const DecomposeResult a = run_decompose(cfg);
  set_num_threads(4);
  const DecomposeResult b = run_decompose(cfg);
  set_num_threads(1);
  REQUIRE(a.reports.size() == 3);
  REQUIRE(a.realspace.size() == 3);
  // 6 points over +-0.4 repeat every 7.5 in x, inside the +-9.5 lattice
  REQUIRE_FALSE(a.warnings.empty());
  CHECK(a.warnings[0].find("aliasing period") != std::string::npos);
  CHECK(run_decompose(parse(replace(kSmall, "points = 6", "points = 16")), false, true).warnings.empty());

  for (Format f : {Format::Csv, Format::JsonLines}) {
    std::ostringstream sa, sb;
    emit_flux_reports(sa, a.reports, f);
    emit_flux_reports(sb, b.reports, f);
    CHECK(sa.str() == sb.str());
    if (f == Format::Csv) CHECK(sa.str().rfind("record,key,value\n", 0) == 0);
    std::istringstream in(sa.str());
    const auto back = parse_flux_reports(in, f);
    REQUIRE(back.size() == a.reports.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK((back[i].omega - a.reports[i].omega).max_abs() == 0.0);
      CHECK((back[i].s_part - a.reports[i].s_part).max_abs() == 0.0);
      CHECK((back[i].pi_part - a.reports[i].pi_part).max_abs() == 0.0);
      CHECK(back[i].alpha.x == a.reports[i].alpha.x);
      CHECK(back[i].x_ell == a.reports[i].x_ell);
      CHECK(back[i].modes == a.reports[i].modes);
    }
  }

  // alpha sweep: Omega_a = Omega_0 - (a - a0) ^ Pi
  const FluxReport& r0 = a.reports[0];
  for (std::size_t i = 1; i < a.reports.size(); ++i) {
    const Multivector want = r0.omega - wedge(a.reports[i].alpha.as_vector(cfg.sig), r0.pi_part);
    CHECK((a.reports[i].omega - want).max_abs() <= 1e-12 * r0.omega.max_abs());
  }

  const auto dir = std::filesystem::temp_directory_path() / "rvfield_test_out";
  std::filesystem::remove_all(dir);
  const auto paths = write_decompose(a, dir.string(), Format::Csv);
  CHECK(paths.size() == 4);
  for (const auto& p : paths) CHECK(std::filesystem::file_size(p) > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("modeset json-lines round trip keeps gradients") {
  const BuiltField f = build_field(parse(kSmall));
  REQUIRE(f.modes.has_gradients());
  std::ostringstream os;
  emit_modeset_jsonl(os, f.modes);
  std::istringstream is(os.str());
  const ModeSet back = parse_modeset_jsonl(is);
  REQUIRE(back.modes.size() == f.modes.modes.size());
  CHECK(back.has_gradients());
  for (std::size_t i = 0; i < back.modes.size(); ++i) {
    CHECK(back.modes[i].xi_bar == f.modes.modes[i].xi_bar);
    CHECK(back.modes[i].weight == f.modes.modes[i].weight);
    CHECK((back.modes[i].amp - f.modes.modes[i].amp).max_abs() == 0.0);
    for (std::size_t t = 0; t < back.modes[i].amp_grad.size(); ++t)
      CHECK((back.modes[i].amp_grad[t] - f.modes.modes[i].amp_grad[t]).max_abs() == 0.0);
  }
}

TEST_CASE("zero polarization gives an all-zero report") {
  ScenarioConfig cfg = parse(replace(replace(kSmall, "polarization = circular\nplane = 1, 2", "polarization = zero"),
                                     "alpha = 0,0,0,0; 0,0.3,-0.2,0.1; 0.5,1,2,-1", "alpha = 0,0.3,-0.2,0.1"));
  const DecomposeResult res = run_decompose(cfg);
  REQUIRE(res.reports.size() == 1);
  const FluxReport& r = res.reports[0];
  CHECK(r.omega.max_abs() == 0.0);
  CHECK(r.n_part.max_abs() == 0.0);
  CHECK(r.l_part.max_abs() == 0.0);
  CHECK(r.s_part.max_abs() == 0.0);
  CHECK(r.pi_part.max_abs() == 0.0);
  CHECK(res.realspace[0].omega.max_abs() == 0.0);
}

TEST_CASE("formats") {
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("json-lines") == Format::JsonLines);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
  CHECK(fmt17(0.1) == "0.10000000000000001");
}
