#include "burgers/constitutive.hpp"
#include "burgers/error.hpp"
#include "burgers/fem.hpp"
#include "burgers/io.hpp"
#include "burgers/prony.hpp"
#include "burgers/relaxation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace burgers;

namespace {

BurgersMaterial make_material(int dim, double rho, const std::vector<Matrix>& c,
                              const std::vector<double>& eta) {
  std::vector<ElasticTensor4> cs;
  for (const auto& m : c) cs.emplace_back(dim, m);
  return BurgersMaterial(dim, rho, std::move(cs), eta);
}

// (len(times), d~, d~) array of Kelvin matrices
py::array_t<double> stack(const std::vector<Matrix>& mats, int kd) {
  py::array_t<double> out({static_cast<py::ssize_t>(mats.size()), py::ssize_t(kd), py::ssize_t(kd)});
  auto r = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (int a = 0; a < kd; ++a)
      for (int b = 0; b < kd; ++b) r(i, a, b) = mats[i](a, b);
  return out;
}

StrainHistory history_from_arrays(int dim, const std::vector<double>& times, const Matrix& strain) {
  if (strain.rows() != static_cast<Eigen::Index>(times.size()) || strain.cols() != kelvin_size(dim))
    throw Error("dimension-mismatch", "strain must have shape (len(times), d~)");
  StrainHistory h;
  h.dim = dim;
  h.times = times;
  for (Eigen::Index i = 0; i < strain.rows(); ++i) h.values.emplace_back(dim, Vector(strain.row(i).transpose()));
  h.validate();
  return h;
}

Matrix stress_rows(const std::vector<SymTensor2>& s) {
  Matrix out(static_cast<Eigen::Index>(s.size()), s.empty() ? 0 : s.front().kelvin().size());
  for (std::size_t i = 0; i < s.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = s[i].kelvin().transpose();
  return out;
}

py::dict bounds_dict(const SpectralBounds& b) {
  py::dict d;
  d["alpha1"] = b.alpha1;
  d["alpha2"] = b.alpha2;
  d["beta1"] = b.beta1;
  d["beta2"] = b.beta2;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relaxation tensor of the extended Burgers model (Kelvin notation)";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "BurgersError", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object inst = type(std::string(e.what()));
      inst.attr("kind") = e.kind();
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  m.def("kelvin_size", &kelvin_size);
  m.def(
      "isotropic", [](int dim, double lambda, double mu) { return isotropic(dim, lambda, mu).kelvin(); },
      py::arg("dim"), py::arg("lam"), py::arg("mu"));

  py::class_<BurgersMaterial>(m, "Material")
      .def(py::init(&make_material), py::arg("dim"), py::arg("rho"), py::arg("c"), py::arg("eta"))
      .def_property_readonly("dim", &BurgersMaterial::dim)
      .def_property_readonly("n", &BurgersMaterial::n)
      .def_property_readonly("rho", &BurgersMaterial::rho)
      .def_property_readonly("eta", &BurgersMaterial::eta)
      .def_property_readonly("c",
                             [](const BurgersMaterial& mat) {
                               std::vector<Matrix> out;
                               for (const auto& c : mat.c()) out.push_back(c.kelvin());
                               return out;
                             })
      .def("hash", &BurgersMaterial::hash)
      .def("spectral_bounds", [](const BurgersMaterial& mat) { return bounds_dict(spectral_bounds(mat)); })
      .def("__repr__", [](const BurgersMaterial& mat) {
        std::ostringstream os;
        os << "<Material dim=" << mat.dim() << " n=" << mat.n() << ">";
        return os.str();
      });

  m.def(
      "load_config",
      [](const std::string& path, bool voigt_input) { return load_config(path, voigt_input).material(); },
      py::arg("path"), py::arg("voigt_input") = false);
  m.def(
      "parse_config",
      [](const std::string& text, bool voigt_input) { return parse_config(text, voigt_input).material(); },
      py::arg("text"), py::arg("voigt_input") = false);

  py::class_<RelaxationEvaluator>(m, "Evaluator")
      .def(py::init<const BurgersMaterial&>(), py::arg("material"))
      .def("G", [](const RelaxationEvaluator& ev, double t) { return ev.G(t).kelvin(); }, py::arg("t"))
      .def(
          "G_deriv", [](const RelaxationEvaluator& ev, double t, int k) { return ev.G_deriv(t, k).kelvin(); },
          py::arg("t"), py::arg("k"))
      .def(
          "G_grid",
          [](const RelaxationEvaluator& ev, const std::vector<double>& times) {
            std::vector<Matrix> out;
            for (double t : times) out.push_back(ev.G(t).kelvin());
            return stack(out, kelvin_size(ev.dim()));
          },
          py::arg("times"))
      .def_property_readonly("eigenvalues", &RelaxationEvaluator::eigenvalues)
      .def_property_readonly("bounds", [](const RelaxationEvaluator& ev) { return bounds_dict(ev.bounds()); })
      .def("serialize", &serialize_evaluator);

  py::class_<PronyForm>(m, "PronyForm")
      .def(py::init([](const BurgersMaterial& mat, double commute_tol) { return build_prony(mat, commute_tol); }),
           py::arg("material"), py::arg("commute_tol") = kDefaultCommuteTol)
      .def("G", [](const PronyForm& pf, double t) { return eval_G_prony(pf, t).kelvin(); }, py::arg("t"))
      .def_property_readonly("roots",
                             [](const PronyForm& pf) {
                               std::vector<std::vector<double>> r;
                               for (const auto& ch : pf.channels) r.push_back(ch.roots);
                               return r;
                             })
      .def_property_readonly("coefficients",
                             [](const PronyForm& pf) {
                               std::vector<std::vector<std::vector<double>>> r;
                               for (const auto& ch : pf.channels) r.push_back(ch.coeffs);
                               return r;
                             })
      .def_property_readonly("projections", [](const PronyForm& pf) { return pf.joint.projections; })
      .def("table", [](const PronyForm& pf) {
        std::ostringstream os;
        write_prony_table(os, pf);
        return os.str();
      });

  m.def(
      "certificate",
      [](const BurgersMaterial& mat, int count) {
        const RelaxationEvaluator ev(mat);
        const auto cert = decay_certificate(ev, make_grid(0.0, 10.0 / ev.bounds().alpha2, count));
        py::dict d;
        d["kappa1"] = cert.kappa1;
        d["kappa2"] = cert.kappa2;
        d["kappa3"] = cert.kappa3;
        d["kappa4"] = cert.kappa4;
        d["kappa4_tilde"] = cert.kappa4_tilde;
        d["kappa5"] = cert.kappa5;
        d["kappa6"] = cert.kappa6;
        d["pure_exponential"] = cert.pure_exponential;
        d["worst_margin"] = cert.worst_margin;
        return d;
      },
      py::arg("material"), py::arg("count") = 201);

  m.def(
      "respond",
      [](const BurgersMaterial& mat, const std::vector<double>& times, const Matrix& strain,
         const std::string& method) {
        const auto h = history_from_arrays(mat.dim(), times, strain);
        const RelaxationEvaluator ev(mat);
        if (method == "conv") return stress_rows(convolve(ev, h));
        if (method == "ode") return stress_rows(integrate_internal(mat, ev, h).stress);
        throw Error("usage", "method must be 'ode' or 'conv'");
      },
      py::arg("material"), py::arg("times"), py::arg("strain"), py::arg("method") = "ode");

  m.def(
      "simulate",
      [](const BurgersMaterial& mat, int mesh_n, double t_end, double h, bool lumped_mass) {
        FemConfig cfg;
        cfg.N = mesh_n;
        cfg.t_end = t_end;
        cfg.h = h;
        cfg.lumped_mass = lumped_mass;
        cfg.materials.push_back(mat);
        DecayResult r;
        {
          py::gil_scoped_release release;
          r = run_decay_experiment(cfg);
        }
        py::dict d;
        d["t"] = r.trace.times;
        d["kinetic"] = r.trace.kinetic;
        d["elastic"] = r.trace.elastic;
        d["stored"] = r.trace.stored;
        d["total"] = r.trace.total;
        d["ratio"] = r.ratio;
        d["slope"] = r.slope;
        d["h"] = r.h;
        d["max_energy_increase"] = r.max_energy_increase;
        return d;
      },
      py::arg("material"), py::arg("mesh_n") = 9, py::arg("t_end") = 40.0, py::arg("h") = 0.0,
      py::arg("lumped_mass") = false);
}
