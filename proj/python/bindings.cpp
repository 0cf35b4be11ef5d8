#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "homeo/cli.hpp"
#include "homeo/energy.hpp"
#include "homeo/errors.hpp"
#include "homeo/io.hpp"
#include "homeo/material_point.hpp"
#include "homeo/verify.hpp"

namespace py = pybind11;
using namespace homeo;

namespace {

py::dict simulate_text(const std::string& weights_json, const std::string& protocol_csv) {
  const auto doc = io::parse_weights(weights_json);
  std::istringstream in(protocol_csv);
  const auto protocol = io::parse_protocol(in, "<protocol>");
  const auto traj = simulate(protocol, doc.energy, doc.potential);
  std::vector<std::array<double, 3>> stress;
  std::vector<double> gamma, phi;
  for (const auto& s : traj.steps) {
    stress.push_back({s.s_reported(0, 0), s.s_reported(1, 1), s.s_reported(2, 2)});
    gamma.push_back(s.gamma_hat);
    phi.push_back(s.phi_hat_value);
  }
  py::dict r;
  r["time_h"] = traj.times;
  r["stress"] = stress;
  r["gamma_hat"] = gamma;
  r["phi_hat"] = phi;
  return r;
}

py::dict moduli_text(const std::string& weights_json) {
  const auto m = moduli(io::parse_weights(weights_json).energy);
  py::dict r;
  r["kappa"] = m.kappa;
  r["mu"] = m.mu;
  r["E"] = m.E;
  r["nu"] = m.nu;
  return r;
}

py::list verify_checks(std::uint64_t seed) {
  py::list out;
  for (const auto& c : run_verify(seed).checks) {
    py::dict d;
    d["module"] = c.module;
    d["name"] = c.name;
    d["count"] = c.count;
    d["max_violation"] = c.max_violation;
    d["tolerance"] = c.tolerance;
    d["pass"] = c.pass;
    out.append(d);
  }
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_homeo, m) {
  m.doc() = "Homeostatic growth material point: simulation, moduli and invariant checks";
  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DegenerateMaterial>(m, "DegenerateMaterial", PyExc_ArithmeticError);
  m.def("simulate_text", &simulate_text, py::arg("weights_json"), py::arg("protocol_csv"));
  m.def("moduli_text", &moduli_text, py::arg("weights_json"));
  m.def("verify", &verify_checks, py::arg("seed") = 1);
  m.def("run_cli", &run_cli, py::arg("args"));
}
