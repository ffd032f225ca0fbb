#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "forge/trainer.hpp"

namespace py = pybind11;
using namespace forge;

namespace {

Rng make_rng(std::optional<std::uint64_t> seed, const EstimatorMode& mode) {
  if (mode.kind == EstimatorMode::Kind::Sampled && !seed)
    throw ArgumentError("sampled mode needs a seed");
  return Rng(seed.value_or(0));
}

std::vector<double> get_theta(const ForgedModel& m) {
  auto p = m.arnn.params();
  return {p.begin(), p.end()};
}

}  // namespace

PYBIND11_MODULE(_forgesim, mod) {
  mod.doc() = "entanglement-forged variational ground-state solver";
  mod.attr("__version__") = "0.1.0";

  py::class_<PauliString>(mod, "PauliString")
      .def(py::init([](const std::string& text) {
        return PauliString::from_text(text);
      }))
      .def("text", &PauliString::text)
      .def("__repr__",
           [](const PauliString& p) { return "PauliString('" + p.text() + "')"; });

  py::class_<CrossTerm>(mod, "CrossTerm")
      .def_readonly("coefficient", &CrossTerm::coefficient)
      .def_readonly("op_a", &CrossTerm::op_a)
      .def_readonly("op_b", &CrossTerm::op_b)
      .def_readonly("multiplicity", &CrossTerm::multiplicity);

  py::class_<HamiltonianPartition>(mod, "HamiltonianPartition")
      .def_readonly("name", &HamiltonianPartition::name)
      .def_readonly("n_sub", &HamiltonianPartition::n_sub)
      .def_readonly("cross", &HamiltonianPartition::cross)
      .def_property_readonly("n_total", &HamiltonianPartition::n_total);

  mod.def("build_tfim_1d", &build_tfim_1d, py::arg("n_total"), py::arg("h"));
  mod.def("build_tfim_2d", &build_tfim_2d, py::arg("rows"), py::arg("cols"),
          py::arg("h"));
  mod.def("build_tv_2x2", &build_tv_2x2, py::arg("t"), py::arg("v"));
  mod.def("validate_partition", &validate_partition, py::arg("partition"));

  py::class_<EstimatorMode> mode(mod, "EstimatorMode");
  mode.def_static("exact", &EstimatorMode::exact)
      .def_static("sampled", &EstimatorMode::sampled, py::arg("n_sigma") = 512,
                  py::arg("shots") = 128)
      .def_property_readonly("is_sampled", [](const EstimatorMode& m) {
        return m.kind == EstimatorMode::Kind::Sampled;
      });

  py::class_<ForgedModel>(mod, "ForgedModel")
      .def_property("theta", &get_theta,
                    [](ForgedModel& m, const std::vector<double>& t) {
                      m.arnn.set_params(t);
                    })
      .def_property(
          "omega", [](const ForgedModel& m) { return m.omega; },
          [](ForgedModel& m, const std::vector<double>& w) {
            if (w.size() != m.omega.size())
              throw ArgumentError("omega size mismatch");
            m.omega = w;
          })
      .def_property_readonly(
          "n_sub", [](const ForgedModel& m) { return m.partition.n_sub; })
      .def_property_readonly(
          "n_layers", [](const ForgedModel& m) { return m.circuit.n_layers; })
      .def("probabilities",
           [](const ForgedModel& m) { return m.arnn.enumerate_probs(); })
      .def("circuit_matrix", [](const ForgedModel& m) {
        return circuit_matrix(m.circuit, m.omega);
      });

  mod.def("make_model", &make_model, py::arg("partition"), py::arg("n_layers"),
          py::arg("hidden_width"), py::arg("seed"));

  mod.def(
      "energy",
      [](const ForgedModel& m, const EstimatorMode& mode,
         std::optional<std::uint64_t> seed) {
        Rng rng = make_rng(seed, mode);
        return energy(m, mode, &rng);
      },
      py::arg("model"), py::arg("mode") = EstimatorMode::exact(),
      py::arg("seed") = std::nullopt);

  mod.def(
      "correlators",
      [](const ForgedModel& m, const EstimatorMode& mode,
         std::optional<std::uint64_t> seed) {
        Rng rng = make_rng(seed, mode);
        return correlators(m, mode, &rng);
      },
      py::arg("model"), py::arg("mode") = EstimatorMode::exact(),
      py::arg("seed") = std::nullopt);

  mod.def(
      "grad_theta",
      [](const ForgedModel& m, const EstimatorMode& mode, bool baseline,
         std::optional<std::uint64_t> seed) {
        Rng rng = make_rng(seed, mode);
        return grad_theta(m, mode, baseline, &rng);
      },
      py::arg("model"), py::arg("mode") = EstimatorMode::exact(),
      py::arg("baseline") = true, py::arg("seed") = std::nullopt);

  mod.def(
      "grad_omega",
      [](const ForgedModel& m, const EstimatorMode& mode,
         std::optional<std::uint64_t> seed) {
        Rng rng = make_rng(seed, mode);
        return grad_omega(m, mode, &rng);
      },
      py::arg("model"), py::arg("mode") = EstimatorMode::exact(),
      py::arg("seed") = std::nullopt);

  py::class_<TrainConfig>(mod, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("phase1_epochs", &TrainConfig::phase1_epochs)
      .def_readwrite("lr_omega", &TrainConfig::lr_omega)
      .def_readwrite("lr_theta", &TrainConfig::lr_theta)
      .def_readwrite("mode", &TrainConfig::mode)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("baseline", &TrainConfig::baseline)
      .def_property(
          "optimizer",
          [](const TrainConfig& c) { return optimizer_name(c.optimizer); },
          [](TrainConfig& c, const std::string& name) {
            c.optimizer = parse_optimizer(name);
          });

  py::class_<TraceRecord>(mod, "TraceRecord")
      .def_readonly("epoch", &TraceRecord::epoch)
      .def_readonly("energy", &TraceRecord::energy)
      .def_readonly("grad_norm_theta", &TraceRecord::grad_norm_theta)
      .def_readonly("grad_norm_omega", &TraceRecord::grad_norm_omega)
      .def_readonly("wall_ms", &TraceRecord::wall_ms);

  py::class_<TrainResult>(mod, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("trace", &TrainResult::trace)
      .def_readonly("stopped_early", &TrainResult::stopped_early);

  mod.def(
      "train",
      [](const ForgedModel& m, const TrainConfig& cfg) {
        py::gil_scoped_release release;
        return train(m, cfg);
      },
      py::arg("model"), py::arg("config"));

  py::class_<GroundState>(mod, "GroundState")
      .def_readonly("energy", &GroundState::energy)
      .def_readonly("state", &GroundState::state);

  mod.def("exact_ground_state", &exact_ground_state, py::arg("partition"));
  mod.def("dense_hamiltonian", &dense_hamiltonian, py::arg("partition"));
  mod.def("reconstruct_forged_state", &reconstruct_forged_state, py::arg("u"),
          py::arg("lambdas"));
  mod.def("schmidt_values", &schmidt_values, py::arg("state"),
          py::arg("n_sub"));
  mod.def("exact_zz_correlators", &exact_zz_correlators, py::arg("state"),
          py::arg("n_total"));
}
