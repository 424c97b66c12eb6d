#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gchsh/cli.hpp"
#include "gchsh/sdp.hpp"
#include "gchsh/selector.hpp"
#include "gchsh/table_io.hpp"

namespace py = pybind11;
using namespace gchsh;

namespace {

template <std::size_t N>
std::vector<std::vector<std::complex<double>>> rows(const linalg::Matrix<N>& m) {
  std::vector<std::vector<std::complex<double>>> out(N, std::vector<std::complex<double>>(N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out[i][j] = m(i, j);
  return out;
}

bounds::SweepConfig sweep_config(double kappa, int restarts, std::uint64_t seed) {
  bounds::SweepConfig cfg;
  cfg.kappa = kappa;
  cfg.search.restarts = restarts;
  cfg.search.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_gchsh, m) {
  m.doc() = "Fidelity bounds from generalized CHSH scores";

  py::register_exception<RegionError>(m, "RegionError", PyExc_ValueError);
  py::register_exception<TableError>(m, "TableError", PyExc_RuntimeError);
  py::register_exception<TableIncompleteError>(m, "TableIncompleteError", PyExc_LookupError);
  py::register_exception<SweepIncompleteError>(m, "SweepIncompleteError", PyExc_RuntimeError);
  py::register_exception<InfeasibleScoreError>(m, "InfeasibleScoreError", PyExc_ValueError);

  m.attr("QUANTUM_BOUND") = kQuantumBound;
  m.attr("THETA_MIN") = kThetaSupportedMin;
  m.attr("THETA_MAX") = kThetaSupportedMax;

  m.def("local_bound", [](double theta) { return bell::local_bound(bell::Theta(theta)); }, py::arg("theta"));
  m.def(
      "score_from_correlators",
      [](double theta, double x, double y) {
        return bell::score_from_correlators(bell::Theta(theta), bell::CorrelatorPair::make(x, y));
      },
      py::arg("theta"), py::arg("x"), py::arg("y"));
  m.def(
      "bell_operator",
      [](double theta, double a, double b) {
        return rows(bell::bell_operator(bell::Theta(theta), bell::MeasurementAngles::make(a, b)).matrix());
      },
      py::arg("theta"), py::arg("a"), py::arg("b"), "4x4 operator as nested lists of complex numbers");
  m.def("strength_g", &maps::strength_g, py::arg("a"));
  m.def(
      "strength_g_tilde", [](double theta, double b) { return maps::strength_g_tilde(bell::Theta(theta), b); },
      py::arg("theta"), py::arg("b"));

  m.def(
      "worst_case_fidelity",
      [](double theta, double a, double b, double score) {
        const bell::Theta th(theta);
        const auto alice = maps::AliceParamTable::build(th);
        const auto inst = sdp::make_instance(
            sdp::pullback_objective(maps::alice_channel(th, a, alice.params_at(a)), maps::bob_channel(th, b)),
            bell::bell_operator(th, bell::MeasurementAngles::make(a, b)), score);
        const auto r = sdp::solve(inst);
        py::dict d;
        d["feasible"] = r.status == sdp::SdpStatus::optimal;
        d["primal"] = r.primal_value;
        d["dual"] = r.dual_value;
        return d;
      },
      py::arg("theta"), py::arg("a"), py::arg("b"), py::arg("score"),
      "SDP minimum fidelity at fixed angles with the optimized extraction maps");

  m.def(
      "min_fidelity_over_angles",
      [](double theta, double score, int restarts, std::uint64_t seed) {
        optim::AngleSearchConfig cfg;
        cfg.restarts = restarts;
        cfg.seed = seed;
        const auto r = optim::min_fidelity_over_angles(bell::Theta(theta), score, cfg);
        py::dict d;
        d["fidelity"] = r.fidelity;
        d["a"] = r.angles.a;
        d["b"] = r.angles.b;
        d["restart_values"] = r.all_restart_values;
        return d;
      },
      py::arg("theta"), py::arg("score"), py::arg("restarts") = 12, py::arg("seed") = 20210101);

  py::class_<bounds::SweepPoint>(m, "SweepPoint")
      .def_readonly("score", &bounds::SweepPoint::score)
      .def_readonly("min_fidelity", &bounds::SweepPoint::min_fidelity)
      .def("__repr__", [](const bounds::SweepPoint& p) {
        std::ostringstream os;
        os << "SweepPoint(score=" << p.score << ", min_fidelity=" << p.min_fidelity << ")";
        return os.str();
      });

  py::class_<bounds::BoundCurve>(m, "BoundCurve")
      .def_property_readonly("theta", [](const bounds::BoundCurve& c) { return c.theta.value(); })
      .def_readonly("beta_local", &bounds::BoundCurve::beta_local)
      .def_readonly("beta_star", &bounds::BoundCurve::beta_star)
      .def_readonly("fidelity_star", &bounds::BoundCurve::fidelity_star)
      .def_readonly("slope_star", &bounds::BoundCurve::slope_star)
      .def_readonly("beta_trivial", &bounds::BoundCurve::beta_trivial)
      .def_readonly("kappa", &bounds::BoundCurve::kappa)
      .def_readonly("seed", &bounds::BoundCurve::seed)
      .def_readonly("restarts", &bounds::BoundCurve::restarts)
      .def_readonly("sweep", &bounds::BoundCurve::sweep)
      .def("bound_at", &bounds::bound_at, py::arg("score"))
      .def("__repr__", [](const bounds::BoundCurve& c) {
        std::ostringstream os;
        os.precision(10);
        os << "BoundCurve(theta=" << c.theta.value() << ", beta_trivial=" << c.beta_trivial << ")";
        return os.str();
      });

  m.def(
      "compute_curve",
      [](double theta, double kappa, int restarts, std::uint64_t seed) {
        py::gil_scoped_release release;
        return bounds::compute_curve(bell::Theta(theta), sweep_config(kappa, restarts, seed));
      },
      py::arg("theta"), py::arg("kappa") = 0.025, py::arg("restarts") = 12, py::arg("seed") = 20210101,
      "Score sweep and trivial score at one theta");
  m.def("bound_at", &bounds::bound_at, py::arg("curve"), py::arg("score"));

  m.def("save_table", py::overload_cast<const std::vector<bounds::BoundCurve>&, const std::filesystem::path&>(
                          &table::save_table),
        py::arg("curves"), py::arg("path"));
  m.def("load_table", &table::load_table, py::arg("path"));

  m.def(
      "normalize",
      [](double x, double y) {
        const auto n = selector::normalize(bell::CorrelatorPair::make(x, y));
        return py::make_tuple(n.x, n.y, n.transform_log);
      },
      py::arg("x"), py::arg("y"), "(X, Y, applied relabelings)");
  m.def(
      "in_region",
      [](double x, double y) { return selector::in_region(selector::normalize(bell::CorrelatorPair::make(x, y))); },
      py::arg("x"), py::arg("y"));
  m.def(
      "select",
      [](double x, double y, const std::vector<bounds::BoundCurve>& curves, double theta_min, double theta_max,
         int theta_count) {
        const auto r = selector::select(selector::normalize(bell::CorrelatorPair::make(x, y)), curves,
                                        {theta_min, theta_max, theta_count});
        py::dict d;
        d["theta_best"] = r.theta_best.value();
        d["beta_at_best"] = r.beta_at_best;
        d["fidelity_bound"] = r.fidelity_bound;
        d["symmetries"] = r.normalized.transform_log;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("curves"), py::arg("theta_min") = kThetaSupportedMin,
      py::arg("theta_max") = kThetaSupportedMax, py::arg("theta_count") = 500);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr)");
}
