#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "mpsenc/benchmarks.hpp"
#include "mpsenc/engine.hpp"
#include "mpsenc/io.hpp"
#include "mpsenc/ising.hpp"
#include "mpsenc/layer_encoder.hpp"
#include "mpsenc/optimizer.hpp"
#include "mpsenc/plot.hpp"
#include "mpsenc/tomography.hpp"

namespace py = pybind11;
using namespace mpsenc;

namespace {

EngineOptions engine_options(const std::string& backend) {
  EngineOptions o;
  if (backend == "dense") o.backend = Backend::dense;
  else if (backend == "mps") o.backend = Backend::mps;
  else if (backend != "auto") throw Error(ErrorCode::invalid_argument, "backend must be auto|dense|mps");
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Staircase-circuit encoding of matrix product states";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Mps>(m, "Mps")
      .def_property_readonly("n_sites", &Mps::n_sites)
      .def_property_readonly("bond_dims", &Mps::bond_dims)
      .def("to_statevector", [](const Mps& s) { return to_statevector(s); })
      .def("to_json", [](const Mps& s) { return mps_to_json(s); })
      .def_static("from_json", &mps_from_json)
      .def_static("from_statevector", &from_statevector, py::arg("amplitudes"), py::arg("chi_max"))
      .def("__repr__", [](const Mps& s) { return "<Mps n_sites=" + std::to_string(s.n_sites()) + ">"; });

  m.def("random_mps", &random_mps, py::arg("n_sites"), py::arg("chi"), py::arg("seed"));
  m.def("zero_state", &zero_state, py::arg("n_sites"));
  m.def("ising_ground_state", &ising_ground_state, py::arg("n_sites"), py::arg("hx_over_jz"), py::arg("chi"),
        py::arg("dense_max_sites") = 14);
  m.def("inner", &inner, py::arg("bra"), py::arg("ket"));
  m.def("truncate", [](const Mps& s, int chi) { return truncate(s, chi).mps; }, py::arg("mps"), py::arg("chi_max"));

  py::class_<StaircaseCircuit>(m, "StaircaseCircuit")
      .def(py::init<int, int>(), py::arg("n_qubits"), py::arg("n_layers"))
      .def_static("identity", &StaircaseCircuit::identity)
      .def_static("random", &StaircaseCircuit::random, py::arg("n_qubits"), py::arg("n_layers"), py::arg("seed"))
      .def_property_readonly("n_qubits", &StaircaseCircuit::n_qubits)
      .def_property_readonly("n_layers", &StaircaseCircuit::n_layers)
      .def("gate", [](const StaircaseCircuit& c, int layer, int site) { return Mat4(c.gate(GateRef{layer, site})); })
      .def("set_gate",
           [](StaircaseCircuit& c, int layer, int site, const Mat4& g) {
             c.gate(GateRef{layer, site});
             c.set_gate(GateRef{layer, site}, g);
           })
      .def("max_unitarity_error", &StaircaseCircuit::max_unitarity_error)
      .def("to_json", [](const StaircaseCircuit& c) { return circuit_to_json(c); })
      .def_static("from_json", &circuit_from_json);

  m.def("overlap", [](const StaircaseCircuit& c, const Mps& t, const std::string& b) { return overlap(c, t, engine_options(b)); },
        py::arg("circuit"), py::arg("target"), py::arg("backend") = "auto");
  m.def("infidelity", [](const StaircaseCircuit& c, const Mps& t, const std::string& b) { return infidelity(c, t, engine_options(b)); },
        py::arg("circuit"), py::arg("target"), py::arg("backend") = "auto");
  m.def("mean_local_fidelity",
        [](const StaircaseCircuit& c, const Mps& t, const std::string& b) { return mean_local_fidelity(c, t, engine_options(b)); },
        py::arg("circuit"), py::arg("target"), py::arg("backend") = "auto");
  m.def("environment_global",
        [](const StaircaseCircuit& c, const Mps& t, int layer, int site) {
          return Mat4(environment_global(c, t, GateRef{layer, site}).matrix);
        },
        py::arg("circuit"), py::arg("target"), py::arg("layer"), py::arg("site"),
        "4x4 matrix M(in, out) with f = Tr(M G).");

  m.def("layer_by_layer_encode",
        [](const Mps& t, int layers, int chi_work) {
          LayerEncoding e = layer_by_layer_encode(t, layers, chi_work);
          return py::make_tuple(e.circuit, e.infidelity);
        },
        py::arg("target"), py::arg("n_layers"), py::arg("chi_work") = kDefaultWorkingBond);

  m.def("optimize",
        [](const Mps& t, int layers, const std::string& cost, const std::string& init, const std::string& update,
           int sweeps, double rel_tol, std::uint64_t seed, std::optional<long long> shots, double step_size) {
          OptimizerConfig cfg;
          cfg.cost = parse_cost(cost);
          cfg.init = parse_init(init);
          cfg.update = parse_update(update);
          cfg.max_sweeps = sweeps;
          cfg.rel_tol = rel_tol;
          cfg.seed = seed;
          cfg.shots = shots;
          cfg.step_size = step_size;
          OptimizationResult r = optimize(t, layers, cfg);
          return py::make_tuple(r.circuit, r.trace.to_csv());
        },
        py::arg("target"), py::arg("n_layers"), py::arg("cost") = "global", py::arg("init") = "layer_by_layer_full",
        py::arg("update") = "element_wise", py::arg("sweeps") = 20, py::arg("rel_tol") = 0.0, py::arg("seed") = 1,
        py::arg("shots") = py::none(), py::arg("step_size") = 0.1,
        "Returns (circuit, trace_csv).");

  m.def("omega_lower_bound", &omega_lower_bound, py::arg("k"));
  m.def("equivalent_layer_count", &equivalent_layer_count, py::arg("chi0"));
  m.def("direct_truncation_baseline",
        [](const Mps& t, int chi0) {
          BaselinePoint p = direct_truncation_baseline(t, chi0);
          return py::make_tuple(p.infidelity, p.equivalent_layers);
        },
        py::arg("target"), py::arg("chi0"));

  m.def("reconstruct_environment",
        [](const StaircaseCircuit& c, const Mps& t, int layer, int site, std::optional<long long> shots, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          TomographyResult r = reconstruct_environment(c, t, GateRef{layer, site}, shots, &rng);
          return py::make_tuple(Mat4(r.environment.matrix), r.primary_probes, r.disambiguation_probes);
        },
        py::arg("circuit"), py::arg("target"), py::arg("layer"), py::arg("site"), py::arg("shots") = py::none(),
        py::arg("seed") = 1, "Returns (environment, primary_probes, disambiguation_probes).");

  m.def("run_grid", [](const std::string& spec) { return run_grid(parse_grid_spec(spec)).to_csv(); }, py::arg("spec_json"),
        "Runs a JSON grid spec and returns the CSV text.");
  m.def("plot_csv",
        [](const std::string& csv, const std::string& kind, const std::string& x, const std::string& y,
           const std::string& series, const std::string& value) {
          PlotOptions o;
          o.kind = parse_plot_kind(kind);
          o.x = x, o.y = y, o.series = series, o.value = value;
          return emit_plot(ResultTable::from_csv(csv), o);
        },
        py::arg("csv"), py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("series") = "", py::arg("value") = "");
}
