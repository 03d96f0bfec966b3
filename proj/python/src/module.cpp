#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pepkit/analysis.hpp"
#include "pepkit/certificate.hpp"
#include "pepkit/error.hpp"
#include "pepkit/interpolation.hpp"
#include "pepkit/pep.hpp"
#include "pepkit/reconstruction.hpp"
#include "pepkit/sdpa.hpp"

namespace py = pybind11;
using namespace pepkit;

namespace {

// Rows of x and g are the points and gradients.
DataSet make_set(const Matrix& x, const Matrix& g, const Vector& f) {
  if (x.rows() != g.rows() || x.cols() != g.cols() || x.rows() != f.size())
    throw InvalidArgument("x, g and f must describe the same number of points");
  DataSet s(static_cast<int>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    s.add({std::to_string(i), x.row(i).transpose(), g.row(i).transpose(), f(i)});
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case analysis of fixed-step first-order methods";

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<FunctionClass>(m, "FunctionClass")
      .def(py::init<double, double>(), py::arg("mu") = 0.0, py::arg("L") = 1.0)
      .def_property_readonly("mu", &FunctionClass::mu)
      .def_property_readonly("L", &FunctionClass::L)
      .def_property_readonly("kappa", &FunctionClass::kappa)
      .def("__repr__", &FunctionClass::to_string);

  py::class_<StepMatrix>(m, "StepMatrix")
      .def_property_readonly("N", &StepMatrix::N)
      .def_property_readonly("coefficients", &StepMatrix::coefficients)
      .def_property_readonly("label", &StepMatrix::label)
      .def_property_readonly("sequence", [](const StepMatrix& H) { return to_string(H.sequence()); })
      .def_property_readonly("flags", &StepMatrix::flags)
      .def("duality_gap_guarantee", &StepMatrix::duality_gap_guarantee)
      .def("to_json", [](const StepMatrix& H) { return H.to_json().dump(); })
      .def("__repr__", [](const StepMatrix& H) {
        return "<StepMatrix " + H.label() + " N=" + std::to_string(H.N()) + ">";
      });

  m.def("gm", &gm, py::arg("N"), py::arg("h"));
  m.def(
      "fgm", [](int N, const std::string& seq) { return fgm(N, sequence_from_string(seq)); },
      py::arg("N"), py::arg("sequence") = "secondary");
  m.def(
      "ogm", [](int N, const std::string& seq) { return ogm(N, sequence_from_string(seq)); },
      py::arg("N"), py::arg("sequence") = "secondary");
  m.def("mfgm", &mfgm, py::arg("N"));
  m.def(
      "custom",
      [](const std::vector<std::vector<double>>& rows, const std::string& label,
         const std::string& seq) { return custom(rows, label, sequence_from_string(seq)); },
      py::arg("rows"), py::arg("label") = "custom", py::arg("sequence") = "secondary");

  py::class_<PepProblem>(m, "Problem")
      .def_property_readonly("N", &PepProblem::N)
      .def_property_readonly("order", &PepProblem::order)
      .def_property_readonly("function_class", [](const PepProblem& p) { return p.cls; })
      .def_property_readonly("criterion",
                             [](const PepProblem& p) { return to_string(p.criterion.kind); })
      .def_property_readonly("num_constraints",
                             [](const PepProblem& p) { return p.constraints.size(); })
      .def("to_sdpa", [](const PepProblem& p) { return export_sdpa(to_conic(p)); })
      .def("to_json", [](const PepProblem& p) { return p.to_json().dump(); });

  m.def(
      "assemble",
      [](const FunctionClass& cls, const StepMatrix& H, double R, const std::string& criterion) {
        return assemble(cls, H, R, criterion_from_string(criterion));
      },
      py::arg("function_class"), py::arg("H"), py::arg("R") = 1.0, py::arg("criterion") = "obj");

  py::class_<PepSolution>(m, "Solution")
      .def_property_readonly("status", [](const PepSolution& s) { return to_string(s.status); })
      .def_property_readonly("optimal", &PepSolution::optimal)
      .def_readonly("value", &PepSolution::value)
      .def_readonly("dual_value", &PepSolution::dual_value)
      .def_readonly("G", &PepSolution::G)
      .def_readonly("f", &PepSolution::f)
      .def_readonly("t", &PepSolution::t)
      .def_readonly("lambda_", &PepSolution::lambda)
      .def_readonly("tau", &PepSolution::tau)
      .def_readonly("nu", &PepSolution::nu)
      .def_readonly("S", &PepSolution::S)
      .def_readonly("iterations", &PepSolution::iterations)
      .def_readonly("relative_gap", &PepSolution::relative_gap);

  m.def(
      "solve",
      [](const PepProblem& p, double tol) {
        SolveOptions o;
        o.sdp.tol = tol;
        py::gil_scoped_release release;
        return solve(p, o);
      },
      py::arg("problem"), py::arg("tol") = SdpOptions{}.tol);

  m.def(
      "certificate_json",
      [](const PepProblem& p, const PepSolution& s) {
        const DualCertificate c = preferred_certificate(p, s);
        nlohmann::json j = c.to_json();
        j["verification"] = verify(c, p, 1e-6, &s).to_json();
        return j.dump();
      },
      py::arg("problem"), py::arg("solution"));
  m.def(
      "proof",
      [](const PepProblem& p, const PepSolution& s) {
        return render_proof(preferred_certificate(p, s), p);
      },
      py::arg("problem"), py::arg("solution"));
  m.def(
      "reconstruct_json",
      [](const PepProblem& p, const PepSolution& s) {
        const WorstCaseInstance w = reconstruct(p, s);
        nlohmann::json j = w.to_json();
        if (const auto r = recognize_1d(w)) j["family"] = r->to_json();
        return j.dump();
      },
      py::arg("problem"), py::arg("solution"));

  m.def(
      "check_interpolable",
      [](const Matrix& x, const Matrix& g, const Vector& f, double mu, double L, double tol) {
        const auto r = check_interpolable(make_set(x, g, f), FunctionClass(mu, L), tol);
        return py::make_tuple(r.interpolable, r.min_slack);
      },
      py::arg("x"), py::arg("g"), py::arg("f"), py::arg("mu") = 0.0, py::arg("L") = 1.0,
      py::arg("tol") = kDefaultInterpolationTol);

  m.def("conj_gm_obj", &conj_gm_obj, py::arg("N"), py::arg("h"), py::arg("kappa") = 0.0,
        py::arg("allow_large_step") = false);
  m.def("conj_gm_grad", &conj_gm_grad, py::arg("N"), py::arg("h"), py::arg("kappa") = 0.0,
        py::arg("allow_large_step") = false);
  m.def(
      "conj_fgm_ogm",
      [](int N, const std::string& method, const std::string& seq) {
        const auto c = conj_fgm_ogm(N, method, sequence_from_string(seq));
        return py::make_tuple(c.value, c.closed_form);
      },
      py::arg("N"), py::arg("method"), py::arg("sequence") = "secondary");
  m.def(
      "hopt",
      [](int N, double kappa, const std::string& criterion) {
        return hopt(N, kappa, criterion_from_string(criterion));
      },
      py::arg("N"), py::arg("kappa") = 0.0, py::arg("criterion") = "obj");
  m.def(
      "hopt_bounds",
      [](int N, double kappa, const std::string& criterion) {
        return hopt_bounds(N, kappa, criterion_from_string(criterion));
      },
      py::arg("N"), py::arg("kappa") = 0.0, py::arg("criterion") = "obj");
}
