#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zdalab/scenario.hpp"

namespace py = pybind11;
using namespace zdalab;

namespace {

OutputConfig make_output_config(const std::vector<int>& monitored, const VectorXd& c1,
                                const VectorXd& c2, const VectorXd& d) {
  OutputConfig cfg;
  cfg.monitored = monitored;
  cfg.c1 = c1;
  cfg.c2 = c2;
  cfg.d = d.size() ? d : VectorXd::Zero(static_cast<Eigen::Index>(monitored.size()));
  return cfg;
}

py::dict defense_to_dict(const DefenseReport& r) {
  py::dict out;
  py::dict distinct;
  for (const auto& [id, ok] : r.distinct_eigenvalues_ok) distinct[py::int_(id)] = ok;
  out["distinct_eigenvalues_ok"] = distinct;
  out["f_set"] = r.f_set;
  out["f_nonempty"] = r.f_nonempty;
  out["c2_positive_ok"] = r.c2_positive_ok;
  out["row_difference_ok"] = r.row_difference_ok;
  out["verdict_intermittent"] = r.verdict_intermittent;
  out["verdict_cooperative"] = r.verdict_cooperative;
  return out;
}

py::dict summary_to_dict(const RunArtifacts& a) {
  py::dict out;
  out["trajectory_csv"] = a.trajectory_csv;
  out["residual_csv"] = a.residual_csv;
  out["summary_json"] = a.summary_json;
  out["final_position_spread"] = a.summary.final_position_spread;
  out["final_max_speed"] = a.summary.final_max_speed;
  out["final_mean_position"] = a.summary.final_mean_position;
  out["target_location_predicted"] = a.summary.target_location_predicted;
  out["max_abs_residual"] = a.summary.max_abs_residual;
  out["attack_detected"] = a.summary.verdict.attack_detected;
  if (a.summary.verdict.attack_detected) out["detection_time"] = a.summary.verdict.time;
  if (a.summary.diverged_at) out["diverged_at"] = *a.summary.diverged_at;
  out["defense"] = defense_to_dict(a.defense);
  if (a.consensus_certificate) {
    out["consensus_certificate_pass"] = a.consensus_certificate->pass;
    out["consensus_certificate_value"] = a.consensus_certificate->convex_combination;
  }
  if (a.observer_certificate) {
    out["observer_certificate_pass"] = a.observer_certificate->pass;
    out["observer_certificate_value"] = a.observer_certificate->convex_combination;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_zdalab, m) {
  m.doc() = "Switched-consensus stealthy-attack laboratory (C++ core)";

  py::class_<Topology>(m, "Topology")
      .def(py::init([](int id, int n, const std::vector<std::tuple<int, int, double>>& edges) {
             return Topology::from_edges(id, n, edges);
           }),
           py::arg("id"), py::arg("n"), py::arg("edges"))
      .def_readonly("id", &Topology::id)
      .def_readonly("n", &Topology::n)
      .def_readonly("adjacency", &Topology::adjacency)
      .def("validate", &Topology::validate);

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
      .def_readonly("q", &SpectralDecomposition::q);

  m.def("laplacian", &laplacian, py::arg("topology"));
  m.def("spectral_decompose", &spectral_decompose, py::arg("laplacian"));
  m.def("is_connected", &is_connected, py::arg("laplacian"), py::arg("tol") = 1e-8);
  m.def("has_distinct_eigenvalues",
        py::overload_cast<const MatrixXd&>(&has_distinct_eigenvalues), py::arg("laplacian"));
  m.def("has_distinct_eigenvalues",
        py::overload_cast<const MatrixXd&, double>(&has_distinct_eigenvalues),
        py::arg("laplacian"), py::arg("tol"));
  m.def("diameter", &diameter, py::arg("topology"));
  m.def("vandermonde_det", &vandermonde_det, py::arg("values"));

  m.def("system_matrix", &system_matrix, py::arg("laplacian"));
  m.def(
      "output_matrices",
      [](const std::vector<int>& monitored, const VectorXd& c1, const VectorXd& c2,
         const VectorXd& d, int n) {
        return output_matrices(make_output_config(monitored, c1, c2, d), n);
      },
      py::arg("monitored"), py::arg("c1"), py::arg("c2"), py::arg("d"), py::arg("n"));
  m.def(
      "control_input",
      [](const VectorXd& x, const VectorXd& v, const Topology& t) {
        return control_input(StackedState(x, v), t);
      },
      py::arg("x"), py::arg("v"), py::arg("topology"));
  m.def("target_location", &target_location, py::arg("x0"), py::arg("v0"));
  m.def(
      "consensus_error",
      [](const VectorXd& x, const VectorXd& v) { return consensus_error(StackedState(x, v)); },
      py::arg("x"), py::arg("v"));
  m.def(
      "propagate",
      [](const VectorXd& x, const VectorXd& v, const MatrixXd& a, double t0, double t1,
         double dt) {
        const StackedState out = propagate(StackedState(x, v), a, nullptr, t0, t1, dt);
        return std::make_pair(out.x, out.v);
      },
      py::arg("x"), py::arg("v"), py::arg("a"), py::arg("t0"), py::arg("t1"),
      py::arg("dt") = 1e-3);

  py::class_<SwitchingSchedule>(m, "SwitchingSchedule")
      .def(py::init([](const std::vector<std::pair<int, double>>& entries) {
             SwitchingSchedule s;
             for (const auto& [id, dwell] : entries) s.entries.push_back({id, dwell});
             return s;
           }),
           py::arg("entries"))
      .def_property_readonly("period", &SwitchingSchedule::period);

  m.def("active_topology", &active_topology, py::arg("schedule"), py::arg("t"));
  m.def("matrix_measure", &matrix_measure, py::arg("a"), py::arg("p"));
  m.def("observer_error_matrix", &observer_error_matrix, py::arg("laplacian"), py::arg("chat"));

  py::class_<StabilityCertificate>(m, "StabilityCertificate")
      .def_readonly("p", &StabilityCertificate::p)
      .def_readonly("measures", &StabilityCertificate::measures)
      .def_readonly("weights", &StabilityCertificate::weights)
      .def_readonly("convex_combination", &StabilityCertificate::convex_combination)
      .def_readonly("pass_", &StabilityCertificate::pass)
      .def_readonly("reference_topology", &StabilityCertificate::reference_topology);

  m.def(
      "certify_consensus",
      [](const SwitchingSchedule& s, const std::vector<Topology>& topologies) {
        return certify_consensus(s, topologies);
      },
      py::arg("schedule"), py::arg("topologies"));
  m.def(
      "certify_observer",
      [](const SwitchingSchedule& s, const std::vector<Topology>& topologies,
         const MatrixXd& chat) { return certify_observer(s, topologies, chat); },
      py::arg("schedule"), py::arg("topologies"), py::arg("chat"));

  m.def("observability_matrix", &observability_matrix, py::arg("a"), py::arg("c"));
  m.def("shifted_observability_matrix", &shifted_observability_matrix, py::arg("a"),
        py::arg("c"));
  m.def(
      "unobservable_subspace",
      [](const std::vector<std::pair<MatrixXd, double>>& prefix, const MatrixXd& c) {
        std::vector<PrefixEntry> entries;
        for (const auto& [a, tau] : prefix) entries.push_back({a, tau});
        return unobservable_subspace(entries, c).basis;
      },
      py::arg("prefix"), py::arg("c"));
  m.def(
      "privacy_preserved",
      [](const MatrixXd& basis, const std::vector<int>& monitored, int n) {
        return privacy_preserved(Subspace{basis}, monitored, n);
      },
      py::arg("basis"), py::arg("monitored"), py::arg("n"));
  m.def(
      "defense_check",
      [](const std::vector<Topology>& topologies, const std::vector<int>& monitored,
         const VectorXd& c1, const VectorXd& c2) {
        return defense_to_dict(
            defense_check(topologies, make_output_config(monitored, c1, c2, VectorXd())));
      },
      py::arg("topologies"), py::arg("monitored"), py::arg("c1"), py::arg("c2"));

  m.def(
      "synthesize_zda",
      [](const Topology& topology, const std::vector<int>& monitored, const VectorXd& c1,
         const VectorXd& c2, const VectorXd& d, const std::vector<int>& k_set,
         const std::vector<Complex>& eta_grid, bool injection_only) {
        const auto out = synthesize_zda(
            topology, make_output_config(monitored, c1, c2, d), k_set, eta_grid, 1e-9,
            injection_only ? StealthScope::injection_only : StealthScope::through_pauses);
        py::list result;
        for (const auto& cand : out) result.append(py::make_tuple(cand.eta, cand.z0, cand.g));
        return result;
      },
      py::arg("topology"), py::arg("monitored"), py::arg("c1"), py::arg("c2"), py::arg("d"),
      py::arg("k_set"), py::arg("eta_grid") = std::vector<Complex>{},
      py::arg("injection_only") = false);

  m.def(
      "run_scenario",
      [](const std::string& config_path, const std::string& out_dir) {
        return summary_to_dict(run_experiment(load_config(config_path), out_dir));
      },
      py::arg("config_path"), py::arg("out_dir"));
  m.def(
      "reproduce",
      [](const std::string& name, const std::string& out_dir) {
        return summary_to_dict(run_experiment(builtin_scenario(name), out_dir));
      },
      py::arg("name"), py::arg("out_dir"));
  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def(
      "save_builtin_config",
      [](const std::string& name, const std::string& path) {
        save_config(builtin_scenario(name), path);
      },
      py::arg("name"), py::arg("path"));
}
