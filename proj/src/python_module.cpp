#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rvfield/parallel.hpp"
#include "rvfield/scenario.hpp"

namespace py = pybind11;
using namespace rvf;

namespace {

py::array_t<cplx> to_array(const Rank2Tensor& t) {
  const auto d = static_cast<py::ssize_t>(t.d());
  py::array_t<cplx> out({d, d});
  auto m = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < d; ++i)
    for (py::ssize_t j = 0; j < d; ++j) m(i, j) = t(static_cast<int>(i), static_cast<int>(j));
  return out;
}

Rank2Tensor from_array(const Signature& sig, const py::array_t<cplx>& a) {
  const int d = sig.d();
  if (a.ndim() != 2 || a.shape(0) != d || a.shape(1) != d) throw DomainError("tensor must be d x d");
  Rank2Tensor t(sig);
  auto m = a.unchecked<2>();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = m(i, j);
  return t;
}

// {"0,1": value, ...} keyed by the comma-joined index list
py::dict components(const Multivector& m) {
  py::dict out;
  for (std::size_t p = 0; p < m.size(); ++p) {
    std::string key;
    for (int i : IndexList::from_mask(m.masks()[p]).indices()) key += (key.empty() ? "" : ",") + std::to_string(i);
    out[py::str(key)] = m[p];
  }
  return out;
}

py::dict report_dict(const FluxReport& r) {
  py::dict d;
  d["omega"] = r.omega;
  d["n"] = r.n_part;
  d["l"] = r.l_part;
  d["s"] = r.s_part;
  d["pi"] = r.pi_part;
  d["alpha"] = r.alpha.x;
  d["x_ell"] = r.x_ell;
  d["modes"] = r.modes;
  d["dropped"] = r.dropped;
  d["amp_norm"] = r.amp_norm;
  return d;
}

ModeSet gaussian_packet(int k, int n, int ell, const std::vector<double>& center, double spread,
                        const Multivector& seed, int points, std::optional<double> half_width) {
  const Signature sig(k, n);
  if (!(seed.sig() == sig)) throw DomainError("seed signature differs from (k, n)");
  GaussianPacketSpec spec;
  spec.center = center;
  spec.spread = spread;
  spec.seed = seed;
  spec.grid.assign(static_cast<std::size_t>(sig.d() - 1), GridAxis{half_width.value_or(4.0 * spread), points});
  return make_gaussian_packet(spec, ell);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multivector fields: stress tensor, energy-momentum and angular-momentum fluxes";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EmptyFieldError>(m, "EmptyFieldError", PyExc_RuntimeError);
  py::register_exception<UnsupportedFieldError>(m, "UnsupportedFieldError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  py::class_<Signature>(m, "Signature")
      .def(py::init<int, int>(), py::arg("k"), py::arg("n"))
      .def_readonly("k", &Signature::k)
      .def_readonly("n", &Signature::n)
      .def_property_readonly("d", &Signature::d)
      .def("delta", &Signature::delta)
      .def("__repr__", [](const Signature& s) { return "Signature" + s.str(); });

  m.def("permutation_sign", [](const std::vector<int>& a, const std::vector<int>& b) {
    return sigma(IndexList(a), IndexList(b));
  });
  m.def("metric_delta", [](const std::vector<int>& I, const Signature& sig) { return metric_delta(IndexList(I), sig); });

  py::class_<Multivector>(m, "Multivector")
      .def(py::init<Signature, int>(), py::arg("sig"), py::arg("grade"))
      .def(py::init<Signature, int, std::vector<cplx>>(), py::arg("sig"), py::arg("grade"), py::arg("coeffs"))
      .def_static(
          "blade", [](const Signature& s, const std::vector<int>& I, cplx c) { return Multivector::blade(s, IndexList(I), c); },
          py::arg("sig"), py::arg("indices"), py::arg("coeff") = cplx(1.0))
      .def_property_readonly("grade", &Multivector::grade)
      .def_property_readonly("sig", &Multivector::sig)
      .def_property_readonly("coeffs", [](const Multivector& v) { return v.coeffs(); })
      .def("components", &components)
      .def("at", [](const Multivector& v, const std::vector<int>& I) { return v.at(IndexList(I)); })
      .def("conj", &Multivector::conj)
      .def("norm", &Multivector::norm)
      .def("max_abs", &Multivector::max_abs)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(cplx() * py::self)
      .def("__repr__", [](const Multivector& v) {
        std::ostringstream os;
        os << "Multivector(grade=" << v.grade() << ", " << v.sig().str() << ")";
        return os.str();
      });

  m.def("wedge", &wedge);
  m.def("dot", &dot);
  m.def("left_interior", &left_interior);
  m.def("right_interior", &right_interior);

  m.def("odot", [](const Multivector& a, const Multivector& b) { return to_array(odot(a, b)); });
  m.def("owedge", [](const Multivector& a, const Multivector& b) { return to_array(owedge(a, b)); });
  m.def("stress_tensor", [](const Multivector& F) { return to_array(stress_tensor(F)); });
  m.def("stress_components", [](const Multivector& F) { return to_array(stress_components(F)); });
  m.def("boxwedge", [](const Multivector& v, const py::array_t<cplx>& S) {
    const Rank3MomentTensor M = boxwedge(v, from_array(v.sig(), S));
    return std::vector<cplx>(M.coeffs().begin(), M.coeffs().end());
  });

  m.def("chi_ell", &chi_ell, py::arg("xi_bar"), py::arg("ell"), py::arg("sig"));
  m.def("coulomb_project", &coulomb_project, py::arg("amp"), py::arg("xi_plus"), py::arg("ell"));
  m.def("admissible_dimension", &admissible_dimension);
  m.def("spin_subspace_rank", &spin_subspace_rank);

  py::class_<ModeSet>(m, "ModeSet")
      .def_property_readonly("sig", [](const ModeSet& s) { return s.sig; })
      .def_readonly("r", &ModeSet::r)
      .def_readonly("ell", &ModeSet::ell)
      .def_readonly("dropped", &ModeSet::dropped)
      .def("__len__", [](const ModeSet& s) { return s.modes.size(); })
      .def("xi_bar", [](const ModeSet& s, std::size_t i) { return s.modes.at(i).xi_bar; })
      .def("weight", [](const ModeSet& s, std::size_t i) { return s.modes.at(i).weight; })
      .def("amp", [](const ModeSet& s, std::size_t i) { return s.modes.at(i).amp; });

  m.def("gaussian_packet", &gaussian_packet, py::arg("k"), py::arg("n"), py::arg("ell"), py::arg("center"),
        py::arg("spread"), py::arg("seed"), py::arg("points"), py::arg("half_width") = py::none());

  auto point = [](const std::vector<double>& x) { return SpacetimePoint{x}; };
  m.def("potential_at", [point](const ModeSet& s, const std::vector<double>& x) { return potential_at(s, point(x)); });
  m.def("field_at", [point](const ModeSet& s, const std::vector<double>& x) { return field_at(s, point(x)); });
  m.def("stress_tensor_at",
        [point](const ModeSet& s, const std::vector<double>& x) { return to_array(stress_tensor_at(s, point(x))); });
  m.def("maxwell_residuals",
        [point](const ModeSet& s, const std::vector<double>& x) { return maxwell_residuals(s, point(x)); });

  m.def("pi_flux", [](const ModeSet& s) { return pi_flux(s); });
  m.def("spin_flux", &spin_flux);
  m.def("decompose", [point](const ModeSet& s, double x_ell, const std::vector<double>& alpha) {
    return report_dict(decompose(s, x_ell, point(alpha)));
  });
  m.def(
      "realspace_omega_flux",
      [point](const ModeSet& s, double x_ell, const std::vector<double>& alpha, const std::vector<double>& center,
              const std::vector<double>& half_width, const std::vector<int>& points) {
        const RealspaceFlux f = realspace_omega_flux(s, s.ell, x_ell, point(alpha), Lattice{center, half_width, points});
        py::dict d;
        d["omega"] = f.omega;
        d["pi"] = f.pi;
        d["edge_fraction"] = f.edge_fraction;
        d["undersized"] = f.undersized;
        return d;
      },
      py::arg("modes"), py::arg("x_ell"), py::arg("alpha"), py::arg("center"), py::arg("half_width"),
      py::arg("points"));

  m.def("set_num_threads", &set_num_threads);

  m.def("verify", [](const std::string& path) {
    const VerifyReport rep = run_verify(load_config(path));
    py::list checks;
    for (const auto& c : rep.checks) {
      py::dict d;
      d["name"] = c.name;
      d["pass"] = c.pass;
      d["max_residual"] = c.max_residual;
      d["tolerance"] = c.tolerance;
      d["trials"] = c.trials;
      d["note"] = c.note;
      checks.append(d);
    }
    return py::make_tuple(checks, rep.warnings);
  });
  m.def("decompose_scenario", [](const std::string& path) {
    const DecomposeResult res = run_decompose(load_config(path));
    py::list reports;
    for (std::size_t i = 0; i < res.reports.size(); ++i) {
      py::dict d = report_dict(res.reports[i]);
      if (i < res.realspace.size()) d["realspace_omega"] = res.realspace[i].omega;
      reports.append(d);
    }
    return py::make_tuple(reports, res.warnings);
  });
}
