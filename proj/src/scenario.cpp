#include "rvfield/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace rvf {

namespace {

namespace pt = boost::property_tree;

constexpr int kMaxConfigDim = 8;
constexpr int kMaxAxisPoints = 64;
constexpr std::size_t kMaxModes = 200000;
constexpr int kMaxLatticePoints = 256;
constexpr std::size_t kMaxLatticeTotal = std::size_t{1} << 22;
constexpr std::size_t kMaxPackets = 8;
constexpr std::size_t kMaxAlphas = 16;
constexpr long kMaxTrials = 1000000;
constexpr int kMaxVerifyPoints = 10000;

const std::vector<std::string> kSuites = {"identities", "products", "gauge",    "maxwell",
                                          "conservation", "triangle", "structure"};

// Source line of every section header and key, for diagnostics.
class LineMap {
 public:
  explicit LineMap(const std::string& text) {
    std::istringstream is(text);
    std::string line, section;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
      if (line[b] == '[') {
        const auto e = line.find(']', b);
        section = line.substr(b + 1, e == std::string::npos ? std::string::npos : e - b - 1);
        lines_.emplace(section, no);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(b, eq - b);
      key.erase(key.find_last_not_of(" \t") + 1);
      lines_.emplace(section + "\x1f" + key, no);
    }
  }
  int at(const std::string& section, const std::string& key = {}) const {
    const auto it = lines_.find(key.empty() ? section : section + "\x1f" + key);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  std::map<std::string, int> lines_;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// One section of the config, with every key read at most once and the rest reported.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree, const LineMap& lines)
      : name_(std::move(name)), tree_(tree), lines_(lines) {}

  const std::string& name() const { return name_; }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : tree_) {
      if (!v.empty()) fail(k, "nested keys are not supported");
      if (!ok.count(k)) fail(k, "unknown key");
    }
  }

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string str(const std::string& key) const {
    const auto it = tree_.find(key);
    if (it == tree_.not_found()) fail(key, "missing");
    return trim(it->second.data());
  }

  double real(const std::string& key) const { return to_real(key, str(key)); }
  long integer(const std::string& key, long lo, long hi) const { return to_int(key, str(key), lo, hi); }

  bool boolean(const std::string& key) const {
    const std::string s = str(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& p : split(str(key), ',')) out.push_back(to_real(key, p));
    return out;
  }

  std::vector<long> integers(const std::string& key, long lo, long hi) const {
    std::vector<long> out;
    for (const auto& p : split(str(key), ',')) out.push_back(to_int(key, p, lo, hi));
    return out;
  }

  double to_real(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (s.empty() || ec != std::errc() || p != e) fail(key, "expected a number, got '" + s + "'");
    if (!std::isfinite(v)) fail(key, "value must be finite");
    return v;
  }

  long to_int(const std::string& key, const std::string& s, long lo, long hi) const {
    long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (s.empty() || ec != std::errc() || p != e) fail(key, "expected an integer, got '" + s + "'");
    if (v < lo || v > hi) fail(key, fmt::format("must lie in [{}, {}]", lo, hi));
    return v;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const int line = key.empty() ? lines_.at(name_) : lines_.at(name_, key);
    throw ConfigError(key.empty() ? name_ : name_ + "." + key, msg, line);
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
  const LineMap& lines_;
};

std::uint64_t parse_seed(const Section& s) {
  const std::string v = s.str("seed");
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    s.fail("seed", "expected a non-negative 64-bit integer, got '" + v + "'");
  return out;
}

cplx parse_complex(const Section& s, const std::string& key, const std::string& tok) {
  const auto parts = split(tok, ':');
  if (parts.size() == 1) return {s.to_real(key, parts[0]), 0.0};
  if (parts.size() == 2) return {s.to_real(key, parts[0]), s.to_real(key, parts[1])};
  s.fail(key, "complex entries are 're' or 're:im', got '" + tok + "'");
}

Polarization parse_polarization(const Section& s) {
  const std::string v = s.str("polarization");
  if (v == "random") return Polarization::Random;
  if (v == "circular") return Polarization::Circular;
  if (v == "linear") return Polarization::Linear;
  if (v == "explicit") return Polarization::Explicit;
  if (v == "zero") return Polarization::Zero;
  s.fail("polarization", "expected random, circular, linear, explicit or zero, got '" + v + "'");
}

std::vector<double> broadcast(const Section& s, const std::string& key, std::vector<double> v, std::size_t n) {
  if (v.size() == 1) v.assign(n, v[0]);
  if (v.size() != n) s.fail(key, fmt::format("needs 1 or {} entries", n));
  return v;
}

PacketConfig parse_packet(const Section& s, const ScenarioConfig& cfg) {
  s.allow({"center", "spread", "half_width", "points", "polarization", "amp", "plane", "handedness", "scale"});
  const int d = cfg.sig.d();
  const std::size_t nd = static_cast<std::size_t>(d - 1);
  PacketConfig p;
  p.section = s.name();
  p.center = s.reals("center");
  if (p.center.size() != nd) s.fail("center", fmt::format("needs d-1 = {} entries", nd));
  p.spread = s.real("spread");
  if (!(p.spread > 0.0)) s.fail("spread", "must be > 0");
  p.half_width = s.has("half_width") ? broadcast(s, "half_width", s.reals("half_width"), nd)
                                     : std::vector<double>(nd, 4.0 * p.spread);
  for (double h : p.half_width)
    if (h < 4.0 * p.spread * (1.0 - 1e-12)) s.fail("half_width", "must be at least 4 * spread");
  if (s.has("points")) {
    const auto pts = s.integers("points", 1, kMaxAxisPoints);
    if (pts.size() != 1 && pts.size() != nd) s.fail("points", fmt::format("needs 1 or {} entries", nd));
    for (std::size_t a = 0; a < nd; ++a) p.points.push_back(static_cast<int>(pts.size() == 1 ? pts[0] : pts[a]));
  } else {
    p.points.assign(nd, 8);
  }
  p.polarization = s.has("polarization") ? parse_polarization(s) : Polarization::Random;
  if (s.has("scale")) p.scale = s.real("scale");
  if (s.has("handedness")) {
    const long h = s.integer("handedness", -1, 1);
    if (h == 0) s.fail("handedness", "must be +1 or -1");
    p.handedness = static_cast<int>(h);
  }
  if (s.has("amp")) {
    if (p.polarization != Polarization::Explicit) s.fail("amp", "only allowed with polarization = explicit");
    for (const auto& tok : split(s.str("amp"), ',')) p.amp.push_back(parse_complex(s, "amp", tok));
  }
  if (p.polarization == Polarization::Explicit) {
    const auto want = static_cast<std::size_t>(binomial(d, cfg.r - 1));
    if (p.amp.size() != want) s.fail("amp", fmt::format("needs C(d, r-1) = {} entries", want));
  }
  const bool planar = p.polarization == Polarization::Circular || p.polarization == Polarization::Linear;
  if (s.has("plane") && !planar) s.fail("plane", "only allowed with circular or linear polarization");
  if (s.has("handedness") && p.polarization != Polarization::Circular)
    s.fail("handedness", "only allowed with circular polarization");
  if (planar) {
    if (cfg.r < 2) s.fail("polarization", "circular and linear seeds need r >= 2");
    if (cfg.r - 2 > d - 3) s.fail("polarization", "circular and linear seeds need r <= d-1 with a free plane");
    if (s.has("plane")) {
      const auto pl = s.integers("plane", 0, d - 1);
      if (pl.size() != 2 || pl[0] == pl[1]) s.fail("plane", "needs two distinct indices");
      if (pl[0] == cfg.ell || pl[1] == cfg.ell) s.fail("plane", "must not contain ell");
      p.plane = {static_cast<int>(pl[0]), static_cast<int>(pl[1])};
    } else {
      for (int t = 0; t < d && p.plane.size() < 2; ++t)
        if (t != cfg.ell) p.plane.push_back(t);
    }
  }
  return p;
}

void parse_alpha(const Section& s, ScenarioConfig& cfg) {
  const int d = cfg.sig.d();
  cfg.alphas.clear();
  if (!s.has("alpha")) {
    cfg.alphas.push_back(SpacetimePoint{std::vector<double>(static_cast<std::size_t>(d), 0.0)});
    return;
  }
  const auto pts = split(s.str("alpha"), ';');
  if (pts.size() > kMaxAlphas) s.fail("alpha", fmt::format("at most {} points", kMaxAlphas));
  for (const auto& p : pts) {
    std::vector<double> x;
    for (const auto& c : split(p, ',')) x.push_back(s.to_real("alpha", c));
    if (x.size() != static_cast<std::size_t>(d)) s.fail("alpha", fmt::format("each point needs d = {} coordinates", d));
    cfg.alphas.push_back(SpacetimePoint{std::move(x)});
  }
}

// Component label "part[i,j]".
std::string label(const std::string& part, std::uint32_t mask) {
  std::string s = part + "[";
  bool first = true;
  for (std::uint32_t m = mask; m; m &= m - 1) {
    if (!first) s += ",";
    s += std::to_string(std::countr_zero(m));
    first = false;
  }
  return s + "]";
}

// Splits "part[i,j]" into the part name and the index mask.
std::pair<std::string, std::uint32_t> parse_label(const std::string& s) {
  const auto open = s.find('[');
  if (open == std::string::npos || open == 0 || s.back() != ']') throw IoError("bad component label '" + s + "'");
  const std::string inner = s.substr(open + 1, s.size() - open - 2);
  std::vector<int> idx;
  if (!inner.empty())
    for (const auto& t : split(inner, ',')) {
      int v = -1;
      const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw IoError("bad component label '" + s + "'");
      idx.push_back(v);
    }
  try {
    return {s.substr(0, open), IndexList(idx).mask()};
  } catch (const DomainError&) {
    throw IoError("bad component label '" + s + "'");
  }
}

// RFC 4180 quoting for fields that contain a comma or quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  if (quoted) throw IoError("unterminated quote in csv row");
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

std::string json_str(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_num(double v) { return std::isfinite(v) ? fmt17(v) : "null"; }

std::string json_reals(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_num(v[i]);
  return s + "]";
}

std::string json_cplx(const std::vector<cplx>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += fmt::format("{}[{},{}]", i ? "," : "", json_num(v[i].real()), json_num(v[i].imag()));
  return s + "]";
}

// ,"part[i,j]":value for every component, canonical order.
std::string json_components(const std::string& part, const Multivector& m) {
  std::string s;
  const auto& masks = m.masks();
  for (std::size_t p = 0; p < masks.size(); ++p) s += "," + json_str(label(part, masks[p])) + ":" + json_num(m[p].real());
  return s;
}

void csv_components(std::ostream& os, const std::string& record, const std::string& part, const Multivector& m) {
  const auto& masks = m.masks();
  for (std::size_t p = 0; p < masks.size(); ++p)
    os << record << "," << csv_field(label(part, masks[p])) << "," << fmt17(m[p].real()) << "\n";
}

const std::vector<std::pair<const char*, Multivector FluxReport::*>>& flux_parts() {
  static const std::vector<std::pair<const char*, Multivector FluxReport::*>> parts = {
      {"omega", &FluxReport::omega}, {"N", &FluxReport::n_part}, {"L", &FluxReport::l_part},
      {"S", &FluxReport::s_part},    {"Pi", &FluxReport::pi_part}};
  return parts;
}

int part_grade(const std::string& part) { return part == "Pi" ? 1 : 2; }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

void close_out(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path);
}

Multivector seed_for(const PacketConfig& p, const ScenarioConfig& cfg, Rng& rng) {
  const Signature& sig = cfg.sig;
  const int g = cfg.r - 1;
  switch (p.polarization) {
    case Polarization::Zero: return Multivector(sig, g);
    case Polarization::Random: return p.scale * random_multivector(rng, sig, g);
    case Polarization::Explicit: return p.scale * Multivector(sig, g, p.amp);
    case Polarization::Circular:
    case Polarization::Linear: {
      const int i = p.plane[0], j = p.plane[1];
      Multivector v(sig, 1);
      if (p.polarization == Polarization::Circular) {
        v[i] = 1.0 / std::sqrt(2.0);
        v[j] = cplx(0.0, p.handedness / std::sqrt(2.0));
      } else {
        v[i] = 1.0;
      }
      std::vector<int> rest;
      for (int t = 0; t < sig.d() && static_cast<int>(rest.size()) < g - 1; ++t)
        if (t != i && t != j && t != cfg.ell) rest.push_back(t);
      const Multivector tail = Multivector::blade(sig, IndexList(rest));
      return p.scale * wedge(v, tail);
    }
  }
  return Multivector(sig, g);
}

CheckLine make_check(std::string name, const Residual& r, double tol, std::string note = {}) {
  CheckLine c;
  c.name = std::move(name);
  c.max_residual = r.max_rel;
  c.tolerance = tol;
  c.trials = r.trials;
  c.pass = r.max_rel <= tol;
  c.note = std::move(note);
  return c;
}

}  // namespace

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

ScenarioConfig parse_config(std::istream& is) {
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  const LineMap lines(text);
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", e.message(), static_cast<int>(e.line()));
  }

  const pt::ptree* scen = nullptr;
  const pt::ptree* lat = nullptr;
  const pt::ptree* ver = nullptr;
  std::vector<std::pair<std::string, const pt::ptree*>> packets;
  for (const auto& [name, sub] : tree) {
    if (sub.empty() && !sub.data().empty())
      throw ConfigError(name, "keys must appear inside a section", lines.at("", name));
    if (name == "scenario") {
      scen = &sub;
    } else if (name == "lattice") {
      lat = &sub;
    } else if (name == "verify") {
      ver = &sub;
    } else if (name == "packet" || name.rfind("packet.", 0) == 0) {
      packets.emplace_back(name, &sub);
    } else {
      throw ConfigError(name, "unknown section", lines.at(name));
    }
  }
  if (!scen) throw ConfigError("scenario", "missing [scenario] section");

  ScenarioConfig cfg;
  const Section s("scenario", *scen, lines);
  s.allow({"seed", "k", "n", "r", "ell", "x_ell", "alpha"});
  cfg.seed = parse_seed(s);
  const int k = static_cast<int>(s.has("k") ? s.integer("k", 0, kMaxConfigDim) : 1);
  const int n = static_cast<int>(s.has("n") ? s.integer("n", 0, kMaxConfigDim) : 3);
  if (k + n < 2 || k + n > kMaxConfigDim) s.fail(s.has("n") ? "n" : "k", fmt::format("need 2 <= k+n <= {}", kMaxConfigDim));
  cfg.sig = Signature(k, n);
  const int d = cfg.sig.d();
  cfg.r = static_cast<int>(s.has("r") ? s.integer("r", 1, d - 1) : 2);
  if (cfg.r > d - 1) s.fail("r", "need r <= d-1");
  cfg.ell = static_cast<int>(s.has("ell") ? s.integer("ell", 0, d - 1) : 0);
  if (s.has("x_ell")) cfg.x_ell = s.real("x_ell");
  parse_alpha(s, cfg);

  if (packets.empty()) throw ConfigError("packet", "at least one [packet] section is required");
  if (packets.size() > kMaxPackets)
    throw ConfigError(packets.back().first, fmt::format("at most {} packets", kMaxPackets), lines.at(packets.back().first));
  std::size_t total = 0;
  for (const auto& [name, sub] : packets) {
    const Section ps(name, *sub, lines);
    cfg.packets.push_back(parse_packet(ps, cfg));
    std::size_t m = 1;
    for (int p : cfg.packets.back().points) m *= static_cast<std::size_t>(p);
    total += m;
    if (total > kMaxModes) ps.fail("points", fmt::format("more than {} modes in total", kMaxModes));
  }

  if (lat) {
    const Section ls("lattice", *lat, lines);
    ls.allow({"enabled", "half_width_sigmas", "points", "center"});
    if (ls.has("enabled")) cfg.lattice.enabled = ls.boolean("enabled");
    if (ls.has("half_width_sigmas")) {
      cfg.lattice.half_width_sigmas = ls.real("half_width_sigmas");
      if (!(cfg.lattice.half_width_sigmas > 0.0) || cfg.lattice.half_width_sigmas > 100.0)
        ls.fail("half_width_sigmas", "must lie in (0, 100]");
    }
    if (ls.has("points")) cfg.lattice.points = static_cast<int>(ls.integer("points", 1, kMaxLatticePoints));
    double total_pts = 1.0;
    for (int a = 0; a < d - 1; ++a) total_pts *= cfg.lattice.points;
    if (cfg.lattice.enabled && total_pts > static_cast<double>(kMaxLatticeTotal))
      ls.fail("points", fmt::format("points^(d-1) exceeds {}", kMaxLatticeTotal));
    if (ls.has("center")) {
      cfg.lattice.center = ls.reals("center");
      if (cfg.lattice.center->size() != static_cast<std::size_t>(d - 1)) ls.fail("center", "needs d-1 entries");
    }
  } else {
    double total_pts = 1.0;
    for (int a = 0; a < d - 1; ++a) total_pts *= cfg.lattice.points;
    if (total_pts > static_cast<double>(kMaxLatticeTotal))
      throw ConfigError("lattice.points", "default lattice too large for this dimension; set [lattice] points");
  }

  if (ver) {
    const Section vs("verify", *ver, lines);
    vs.allow({"trials", "points", "off_shell", "suites"});
    if (vs.has("trials")) cfg.verify.trials = vs.integer("trials", 1, kMaxTrials);
    if (vs.has("points")) cfg.verify.points = static_cast<int>(vs.integer("points", 1, kMaxVerifyPoints));
    if (vs.has("off_shell")) cfg.verify.off_shell = vs.boolean("off_shell");
    if (vs.has("suites")) {
      for (const auto& t : split(vs.str("suites"), ',')) {
        if (t == "all") {
          cfg.verify.suites.clear();
          break;
        }
        if (std::find(kSuites.begin(), kSuites.end(), t) == kSuites.end()) vs.fail("suites", "unknown suite '" + t + "'");
        cfg.verify.suites.push_back(t);
      }
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open " + path);
  return parse_config(is);
}

BuiltField build_field(const ScenarioConfig& cfg) {
  BuiltField out;
  Rng rng(cfg.seed);
  out.modes.sig = cfg.sig;
  out.modes.r = cfg.r;
  out.modes.ell = cfg.ell;
  out.sigma_x = 1.0 / (2.0 * std::numbers::pi * cfg.packets.front().spread);
  std::size_t built = 0;
  for (const PacketConfig& p : cfg.packets) {
    GaussianPacketSpec spec;
    spec.center = p.center;
    spec.spread = p.spread;
    spec.seed = seed_for(p, cfg, rng);
    for (std::size_t a = 0; a < p.points.size(); ++a) spec.grid.push_back(GridAxis{p.half_width[a], p.points[a]});
    ModeSet ms;
    try {
      ms = make_gaussian_packet(spec, cfg.ell);
    } catch (const EmptyFieldError& e) {
      out.warnings.push_back("empty field: [" + p.section + "] has no modes inside the null shell");
      std::size_t m = 1;
      for (int n : p.points) m *= static_cast<std::size_t>(n);
      out.modes.dropped += m;
      continue;
    } catch (const DomainError& e) {
      throw ConfigError(p.section, e.what());
    }
    out.modes.dropped += ms.dropped;
    if (built == 0) out.modes.grid = ms.grid;
    else out.modes.grid.reset();
    for (auto& m : ms.modes) out.modes.modes.push_back(std::move(m));
    ++built;
  }
  if (built > 1) out.modes.grid.reset();
  if (out.modes.modes.empty() && out.warnings.empty()) out.warnings.push_back("empty field: no modes");
  return out;
}

Lattice scenario_lattice(const ScenarioConfig& cfg, const BuiltField& field) {
  const std::size_t nd = static_cast<std::size_t>(cfg.sig.d() - 1);
  Lattice lat;
  if (cfg.lattice.center) {
    lat.center = *cfg.lattice.center;
  } else {
    // stationary phase: x_t = x_ell xi_t / chi at the packet center
    const PacketConfig& p = cfg.packets.front();
    lat.center.assign(nd, 0.0);
    try {
      const double chi = chi_ell(embed_reduced(p.center, cfg.sig, cfg.ell), cfg.ell, cfg.sig);
      if (chi > 0.0)
        for (std::size_t a = 0; a < nd; ++a) lat.center[a] = cfg.x_ell * p.center[a] / chi;
    } catch (const OutsideShellError&) {
    }
  }
  lat.half_width.assign(nd, cfg.lattice.half_width_sigmas * field.sigma_x);
  lat.points.assign(nd, cfg.lattice.points);
  return lat;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json-lines" || s == "jsonl") return Format::JsonLines;
  throw ConfigError("format", "expected csv or json-lines, got '" + s + "'");
}

const char* format_extension(Format f) { return f == Format::Csv ? "csv" : "jsonl"; }

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

VerifyReport run_verify(const ScenarioConfig& cfg) {
  VerifyReport rep;
  auto wanted = [&](const char* s) {
    return cfg.verify.suites.empty() ||
           std::find(cfg.verify.suites.begin(), cfg.verify.suites.end(), s) != cfg.verify.suites.end();
  };
  BuiltField field = build_field(cfg);
  rep.warnings = field.warnings;
  ModeSet& ms = field.modes;
  if (cfg.verify.off_shell && !ms.modes.empty()) {
    auto it = std::max_element(ms.modes.begin(), ms.modes.end(),
                               [](const Mode& a, const Mode& b) { return a.amp.norm() < b.amp.norm(); });
    it->detune = 0.1 * mode_chi(ms, *it);
    rep.warnings.push_back("off_shell: one mode detuned by 0.1 chi");
  }
  const bool empty = ms.modes.empty();
  const std::string empty_note = empty ? "empty field" : "";

  // Test draws use their own stream so they do not depend on the packet seeds.
  Rng rng(cfg.seed + 1);
  const Signature& sig = cfg.sig;
  const int d = sig.d();
  const long trials = cfg.verify.trials;

  if (wanted("identities")) {
    for (int id = 0; id < 4; ++id) {
      Residual tot;
      for (int g = 1; g <= std::min(4, d); ++g)
        if (identity_applies(Identity(id), d, g)) tot.merge(check_identity(Identity(id), rng, sig, g, trials));
      rep.checks.push_back(make_check(std::string("identity.") + identity_name(Identity(id)), tot, 1e-12));
    }
  }
  if (wanted("products")) {
    rep.checks.push_back(make_check("products.odot_owedge_symmetry", check_odot_owedge_symmetry(rng, sig, cfg.r, trials), 1e-12));
    rep.checks.push_back(make_check("products.stress_oracle", check_stress_oracle(rng, sig, cfg.r, trials), 1e-12));
    if (sig == Signature(1, 3) && cfg.r == 2)
      rep.checks.push_back(make_check("products.poynting", check_poynting(rng, std::min<long>(trials, 1000)), 1e-12));
  }
  if (wanted("gauge")) rep.checks.push_back(make_check("gauge.invariants", check_gauge(ms), 1e-12, empty_note));

  const bool need_points = wanted("maxwell") || wanted("conservation");
  if (need_points) {
    const Lattice lat = scenario_lattice(cfg, field);
    std::vector<double> center(static_cast<std::size_t>(d)), half(static_cast<std::size_t>(d));
    const auto ax = reduced_axes(sig, cfg.ell);
    center[cfg.ell] = cfg.x_ell;
    half[cfg.ell] = 2.0 * field.sigma_x;
    for (std::size_t a = 0; a < ax.size(); ++a) {
      center[ax[a]] = lat.center[a];
      half[ax[a]] = 3.0 * field.sigma_x;
    }
    const SpacetimePoint& alpha = cfg.alphas.front();
    const PointSet pts = random_points(rng, ms, center, half, alpha, cfg.verify.points);
    const FieldResiduals fr = check_field(ms, pts, alpha);
    if (wanted("maxwell")) {
      rep.checks.push_back(make_check("maxwell.divergence", fr.maxwell_div, 1e-10, empty_note));
      rep.checks.push_back(make_check("maxwell.curl", fr.maxwell_curl, 1e-10, empty_note));
    }
    if (wanted("conservation")) {
      rep.checks.push_back(make_check("conservation.stress_divergence", fr.stress_div, 1e-10, empty_note));
      rep.checks.push_back(make_check("conservation.moment_divergence", fr.moment_div, 1e-10, empty_note));
      rep.checks.push_back(make_check("conservation.moment_identity", fr.moment_identity, 1e-10, empty_note));
    }
  }
  if (wanted("triangle")) {
    const SpinTriangle tri = check_spin_triangle(ms);
    rep.checks.push_back(make_check("triangle.spin", tri.spin, 1e-12, empty_note));
    rep.checks.push_back(make_check("triangle.orbital", tri.orbital, 1e-10, empty_note));
    Residual im;
    im.add(tri.l_imag);
    rep.checks.push_back(make_check("triangle.orbital_imag", im, 1e-10, empty_note));
  }
  if (wanted("structure")) {
    Residual rank;
    std::string note;
    if (d >= 4 && cfg.r >= 2 && sig.k > 0 && sig.n > 0) {
      const long long want = binomial(d - 4, cfg.r - 2);
      const int got = spin_subspace_rank(sig, cfg.r);
      rank.add(static_cast<double>(std::llabs(want - got)));
      note = fmt::format("rank {} expected {}", got, want);
    } else {
      rank.add(0.0);
      note = "not applicable for d < 4, r < 2 or a definite signature";
    }
    rep.checks.push_back(make_check("structure.spin_subspace_rank", rank, 0.0, note));
    rep.checks.push_back(make_check("structure.ell_exclusion", check_ell_exclusion(ms, cfg.x_ell), 1e-12, empty_note));
    Residual shift;
    for (const auto& a : cfg.alphas) shift.merge(check_alpha_shift(ms, cfg.x_ell, a));
    rep.checks.push_back(make_check("structure.alpha_shift", shift, 1e-12, empty_note));
  }
  return rep;
}

DecomposeResult run_decompose(const ScenarioConfig& cfg, bool frequency, bool real) {
  DecomposeResult res;
  BuiltField field = build_field(cfg);
  res.warnings = field.warnings;
  res.modes = field.modes;
  const ModeSet& ms = res.modes;
  if (frequency)
    for (const auto& a : cfg.alphas) res.reports.push_back(decompose(ms, cfg.x_ell, a));
  if (real && cfg.lattice.enabled) {
    const Lattice lat = scenario_lattice(cfg, field);
    // the mode sum repeats every 1 / dxi along each axis
    if (!ms.modes.empty())
      for (const auto& p : cfg.packets)
        for (std::size_t a = 0; a < lat.half_width.size(); ++a) {
          const double period = p.points[a] / (2.0 * p.half_width[a]);
          if (p.points[a] > 1 && 2.0 * lat.half_width[a] > period) {
            res.warnings.push_back(fmt::format("lattice wider than the aliasing period {:.3g} of [{}] on axis {}; "
                                               "raise its points or narrow the lattice",
                                               period, p.section, a));
            break;
          }
        }
    for (const auto& a : cfg.alphas) {
      res.realspace.push_back(realspace_omega_flux(ms, cfg.ell, cfg.x_ell, a, lat));
      const auto& rs = res.realspace.back();
      if (rs.undersized && a.x == cfg.alphas.front().x)
        res.warnings.push_back(fmt::format("lattice undersized: edge fraction {:.3g} exceeds 1e-6", rs.edge_fraction));
    }
  }
  return res;
}

void emit_flux_reports(std::ostream& os, const std::vector<FluxReport>& reps, Format fmt) {
  if (fmt == Format::Csv) {
    os << "record,key,value\n";
    for (std::size_t a = 0; a < reps.size(); ++a) {
      const FluxReport& r = reps[a];
      const std::string rec = fmt::format("report.{}", a);
      os << rec << ",k," << r.sig.k << "\n" << rec << ",n," << r.sig.n << "\n";
      os << rec << ",r," << r.r << "\n" << rec << ",ell," << r.ell << "\n";
      os << rec << ",x_ell," << fmt17(r.x_ell) << "\n";
      for (std::size_t i = 0; i < r.alpha.x.size(); ++i) os << rec << ",alpha." << i << "," << fmt17(r.alpha.x[i]) << "\n";
      os << rec << ",modes," << r.modes << "\n" << rec << ",dropped," << r.dropped << "\n";
      os << rec << ",amp_norm," << csv_field(r.amp_norm) << "\n" << rec << ",reduction," << csv_field(r.reduction) << "\n";
      os << rec << ",max_imag," << fmt17(r.max_imag) << "\n";
      for (const auto& [name, mem] : flux_parts()) csv_components(os, rec, name, r.*mem);
    }
    return;
  }
  for (std::size_t a = 0; a < reps.size(); ++a) {
    const FluxReport& r = reps[a];
    os << "{\"record\":\"flux_report\",\"index\":" << a << ",\"k\":" << r.sig.k << ",\"n\":" << r.sig.n
       << ",\"r\":" << r.r << ",\"ell\":" << r.ell << ",\"x_ell\":" << json_num(r.x_ell)
       << ",\"alpha\":" << json_reals(r.alpha.x) << ",\"modes\":" << r.modes << ",\"dropped\":" << r.dropped
       << ",\"amp_norm\":" << json_str(r.amp_norm) << ",\"reduction\":" << json_str(r.reduction)
       << ",\"max_imag\":" << json_num(r.max_imag);
    for (const auto& [name, mem] : flux_parts()) os << json_components(name, r.*mem);
    os << "}\n";
  }
}

namespace {

FluxReport blank_report(const Signature& sig) {
  FluxReport r;
  r.sig = sig;
  for (const auto& [name, mem] : flux_parts()) r.*mem = Multivector(sig, part_grade(name));
  return r;
}

// Stores value under "part[i,j]"; false when the key is not a component label.
bool set_component(FluxReport& r, const std::string& key, double value) {
  if (key.find('[') == std::string::npos) return false;
  const auto [part, mask] = parse_label(key);
  for (const auto& [name, mem] : flux_parts())
    if (part == name) {
      Multivector& m = r.*mem;
      if (std::popcount(mask) != m.grade() || (mask >> r.sig.d()) != 0u) throw IoError("flux report: bad component " + key);
      m[grade_position(r.sig, mask)] = value;
      return true;
    }
  throw IoError("flux report: unknown part in " + key);
}

}  // namespace

std::vector<FluxReport> parse_flux_reports(std::istream& is, Format fmt) {
  std::vector<FluxReport> out;
  if (fmt == Format::Csv) {
    std::string line;
    if (!std::getline(is, line) || line != "record,key,value") throw IoError("flux report: bad csv header");
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> recs;
    std::vector<std::string> order;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto f = csv_split(line);
      if (f.size() != 3) throw IoError("flux report: bad csv row '" + line + "'");
      if (!recs.count(f[0])) order.push_back(f[0]);
      recs[f[0]].emplace_back(f[1], f[2]);
    }
    for (const auto& rec : order) {
      const auto& rows = recs[rec];
      std::map<std::string, std::string> kv(rows.begin(), rows.end());
      auto get = [&](const std::string& k) {
        const auto it = kv.find(k);
        if (it == kv.end()) throw IoError("flux report: " + rec + " lacks " + k);
        return it->second;
      };
      FluxReport r;
      try {
        r = blank_report(Signature(static_cast<int>(parse_number(get("k"))), static_cast<int>(parse_number(get("n")))));
      } catch (const DomainError& e) {
        throw IoError(std::string("flux report: ") + e.what());
      }
      r.r = static_cast<int>(parse_number(get("r")));
      r.ell = static_cast<int>(parse_number(get("ell")));
      r.x_ell = parse_number(get("x_ell"));
      r.alpha.x.resize(static_cast<std::size_t>(r.sig.d()));
      for (int i = 0; i < r.sig.d(); ++i) r.alpha.x[i] = parse_number(get(fmt::format("alpha.{}", i)));
      r.modes = static_cast<std::size_t>(parse_number(get("modes")));
      r.dropped = static_cast<std::size_t>(parse_number(get("dropped")));
      r.amp_norm = get("amp_norm");
      r.reduction = get("reduction");
      r.max_imag = parse_number(get("max_imag"));
      for (const auto& [k, v] : rows)
        if (k.find('[') != std::string::npos) set_component(r, k, parse_number(v));
      out.push_back(std::move(r));
    }
    return out;
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("record") != "flux_report") continue;
      FluxReport r = blank_report(Signature(j.at("k").get<int>(), j.at("n").get<int>()));
      r.r = j.at("r").get<int>();
      r.ell = j.at("ell").get<int>();
      r.x_ell = j.at("x_ell").get<double>();
      r.alpha.x = j.at("alpha").get<std::vector<double>>();
      r.modes = j.at("modes").get<std::size_t>();
      r.dropped = j.at("dropped").get<std::size_t>();
      r.amp_norm = j.at("amp_norm").get<std::string>();
      r.reduction = j.at("reduction").get<std::string>();
      r.max_imag = j.at("max_imag").get<double>();
      for (const auto& [k, v] : j.items())
        if (k.find('[') != std::string::npos) set_component(r, k, v.get<double>());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("flux report: ") + e.what());
    } catch (const DomainError& e) {
      throw IoError(std::string("flux report: ") + e.what());
    }
  }
  return out;
}

void emit_modeset_jsonl(std::ostream& os, const ModeSet& ms) {
  ms.validate();
  os << "{\"record\":\"modeset\",\"k\":" << ms.sig.k << ",\"n\":" << ms.sig.n << ",\"r\":" << ms.r
     << ",\"ell\":" << ms.ell << ",\"dropped\":" << ms.dropped << ",\"modes\":" << ms.modes.size() << "}\n";
  for (const Mode& m : ms.modes) {
    os << "{\"record\":\"mode\",\"xi_bar\":" << json_reals(m.xi_bar) << ",\"weight\":" << json_num(m.weight)
       << ",\"detune\":" << json_num(m.detune) << ",\"amp\":" << json_cplx(m.amp.coeffs()) << ",\"amp_grad\":[";
    for (std::size_t t = 0; t < m.amp_grad.size(); ++t) os << (t ? "," : "") << json_cplx(m.amp_grad[t].coeffs());
    os << "]}\n";
  }
}

ModeSet parse_modeset_jsonl(std::istream& is) {
  ModeSet ms;
  std::size_t expected = 0;
  bool header = false;
  std::string line;
  auto cplx_list = [](const nlohmann::json& a) {
    std::vector<cplx> v;
    for (const auto& e : a) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return v;
  };
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const std::string rec = j.at("record").get<std::string>();
      if (rec == "modeset") {
        if (header) throw IoError("modeset: duplicate header");
        ms.sig = Signature(j.at("k").get<int>(), j.at("n").get<int>());
        ms.r = j.at("r").get<int>();
        ms.ell = j.at("ell").get<int>();
        ms.dropped = j.at("dropped").get<std::size_t>();
        expected = j.at("modes").get<std::size_t>();
        header = true;
      } else if (rec == "mode") {
        if (!header) throw IoError("modeset: mode before header");
        Mode m;
        m.xi_bar = j.at("xi_bar").get<std::vector<double>>();
        m.weight = j.at("weight").get<double>();
        m.detune = j.at("detune").get<double>();
        m.amp = Multivector(ms.sig, ms.r - 1, cplx_list(j.at("amp")));
        for (const auto& g : j.at("amp_grad")) m.amp_grad.emplace_back(ms.sig, ms.r - 1, cplx_list(g));
        ms.modes.push_back(std::move(m));
      } else {
        throw IoError("modeset: unknown record '" + rec + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("modeset: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("modeset: ") + e.what());
  }
  if (!header) throw IoError("modeset: missing header");
  if (ms.modes.size() != expected) throw IoError("modeset: mode count does not match the header");
  try {
    ms.validate();
  } catch (const DomainError& e) {
    throw IoError(std::string("modeset: ") + e.what());
  }
  return ms;
}

std::vector<std::string> write_decompose(const DecomposeResult& res, const std::string& dir, Format fmt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> paths;
  const std::string ext = format_extension(fmt);

  {
    const std::string path = dir + (fmt == Format::Csv ? "/modeset.txt" : "/modeset.jsonl");
    auto os = open_out(path);
    if (fmt == Format::Csv) write_modeset(os, res.modes);
    else emit_modeset_jsonl(os, res.modes);
    close_out(os, path);
    paths.push_back(path);
  }
  if (!res.reports.empty()) {
    const std::string path = dir + "/flux_report." + ext;
    auto os = open_out(path);
    emit_flux_reports(os, res.reports, fmt);
    close_out(os, path);
    paths.push_back(path);
  }
  if (!res.realspace.empty()) {
    const std::string path = dir + "/realspace." + ext;
    auto os = open_out(path);
    if (fmt == Format::Csv) os << "record,key,value\n";
    for (std::size_t a = 0; a < res.realspace.size(); ++a) {
      const RealspaceFlux& rs = res.realspace[a];
      const std::string rec = fmt::format("realspace.{}", a);
      if (fmt == Format::Csv) {
        for (std::size_t i = 0; i < rs.lattice.center.size(); ++i) {
          os << rec << ",lattice.center." << i << "," << fmt17(rs.lattice.center[i]) << "\n";
          os << rec << ",lattice.half_width." << i << "," << fmt17(rs.lattice.half_width[i]) << "\n";
          os << rec << ",lattice.points." << i << "," << rs.lattice.points[i] << "\n";
        }
        os << rec << ",edge_fraction," << fmt17(rs.edge_fraction) << "\n";
        os << rec << ",undersized," << (rs.undersized ? 1 : 0) << "\n";
        csv_components(os, rec, "omega", rs.omega);
        csv_components(os, rec, "Pi", rs.pi);
      } else {
        std::vector<double> pts(rs.lattice.points.begin(), rs.lattice.points.end());
        os << "{\"record\":\"realspace\",\"index\":" << a << ",\"center\":" << json_reals(rs.lattice.center)
           << ",\"half_width\":" << json_reals(rs.lattice.half_width) << ",\"points\":" << json_reals(pts)
           << ",\"edge_fraction\":" << json_num(rs.edge_fraction)
           << ",\"undersized\":" << (rs.undersized ? "true" : "false") << json_components("omega", rs.omega)
           << json_components("Pi", rs.pi) << "}\n";
      }
    }
    close_out(os, path);
    paths.push_back(path);
  }
  if (!res.reports.empty() && res.realspace.size() == res.reports.size()) {
    const std::string path = dir + "/comparison." + ext;
    auto os = open_out(path);
    if (fmt == Format::Csv) os << "record,key,value\n";
    for (std::size_t a = 0; a < res.reports.size(); ++a) {
      const Multivector& f = res.reports[a].omega;
      const Multivector& g = res.realspace[a].omega;
      const double scale = f.max_abs();
      const auto& masks = f.masks();
      std::vector<double> rel(masks.size());
      double worst = 0.0;
      for (std::size_t p = 0; p < masks.size(); ++p) {
        rel[p] = scale > 0.0 ? std::abs(f[p].real() - g[p].real()) / scale : std::abs(g[p].real());
        worst = std::max(worst, rel[p]);
      }
      const std::string rec = fmt::format("comparison.{}", a);
      if (fmt == Format::Csv) {
        for (std::size_t p = 0; p < masks.size(); ++p) os << rec << "," << csv_field(label("omega", masks[p])) << "," << fmt17(rel[p]) << "\n";
        os << rec << ",max_rel," << fmt17(worst) << "\n";
      } else {
        os << "{\"record\":\"comparison\",\"index\":" << a;
        for (std::size_t p = 0; p < masks.size(); ++p) os << "," << json_str(label("omega", masks[p])) << ":" << json_num(rel[p]);
        os << ",\"max_rel\":" << json_num(worst) << "}\n";
      }
    }
    close_out(os, path);
    paths.push_back(path);
  }
  return paths;
}

std::vector<std::string> write_verify(const VerifyReport& rep, const std::string& dir, Format fmt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const std::string path = dir + "/verify." + std::string(format_extension(fmt));
  auto os = open_out(path);
  if (fmt == Format::Csv) {
    os << "record,key,value\n";
    for (const auto& c : rep.checks) {
      const std::string rec = "check." + c.name;
      os << rec << ",pass," << (c.pass ? 1 : 0) << "\n";
      os << rec << ",max_residual," << fmt17(c.max_residual) << "\n";
      os << rec << ",tolerance," << fmt17(c.tolerance) << "\n";
      os << rec << ",trials," << c.trials << "\n";
    }
  } else {
    for (const auto& c : rep.checks)
      os << "{\"record\":\"check\",\"name\":" << json_str(c.name) << ",\"pass\":" << (c.pass ? "true" : "false")
         << ",\"max_residual\":" << json_num(c.max_residual) << ",\"tolerance\":" << json_num(c.tolerance)
         << ",\"trials\":" << c.trials << ",\"note\":" << json_str(c.note) << "}\n";
  }
  close_out(os, path);
  return {path};
}

}  // namespace rvf
