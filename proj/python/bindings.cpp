#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "bpire/asymptotics.hpp"
#include "bpire/config.hpp"
#include "bpire/engine.hpp"
#include "bpire/env.hpp"
#include "bpire/gfalgebra.hpp"
#include "bpire/walk.hpp"

namespace py = pybind11;
using namespace bpire;

namespace {

WalkPath path_of(const std::vector<double>& increments) { return WalkPath(increments); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Branching process in random environment with immigration";
  m.attr("__version__") = BPIRE_VERSION;

  py::enum_<Convention>(m, "Convention")
      .value("paper_corollary", Convention::paper_corollary)
      .value("strict", Convention::strict);

  py::class_<IncrementLaw>(m, "IncrementLaw")
      .def_static("gaussian", &IncrementLaw::gaussian, py::arg("sigma"))
      .def_static("uniform", &IncrementLaw::uniform, py::arg("half_width"))
      .def_static("laplace", &IncrementLaw::laplace, py::arg("scale"))
      .def_static("two_point_lattice", &IncrementLaw::two_point_lattice, py::arg("step"))
      .def_static("degenerate", &IncrementLaw::degenerate)
      .def_property_readonly("family", [](const IncrementLaw& l) { return std::string(to_string(l.family())); })
      .def_property_readonly("parameter", &IncrementLaw::parameter)
      .def_property_readonly("variance", &IncrementLaw::variance)
      .def("mgf", &IncrementLaw::mgf, py::arg("t"))
      .def("__repr__", [](const IncrementLaw& l) {
        return "IncrementLaw." + std::string(to_string(l.family())) + "(" + std::to_string(l.parameter()) + ")";
      });

  py::class_<Regime>(m, "Regime")
      .def_static("fixed_i", &Regime::fixed_i, py::arg("i"))
      .def_static("fixed_gap", &Regime::fixed_gap, py::arg("gap"))
      .def_static("proportional", &Regime::proportional, py::arg("rho"))
      .def("resolve", &Regime::resolve, py::arg("n"))
      .def("__repr__", &Regime::describe);

  py::class_<SamplingTarget>(m, "SamplingTarget")
      .def_static("fixed", &SamplingTarget::fixed, py::arg("nsamples"))
      .def_static("relative", &SamplingTarget::relative, py::arg("rel_se"), py::arg("budget") = 10'000'000)
      .def_readonly("nsamples", &SamplingTarget::nsamples)
      .def_readonly("rel_se", &SamplingTarget::rel_se)
      .def_readonly("budget", &SamplingTarget::budget);

  py::class_<EstimatorResult>(m, "EstimatorResult")
      .def_readonly("mean", &EstimatorResult::mean)
      .def_readonly("std_error", &EstimatorResult::std_error)
      .def_readonly("nsamples", &EstimatorResult::nsamples)
      .def_readonly("master_seed", &EstimatorResult::master_seed)
      .def_readonly("budget_exceeded", &EstimatorResult::budget_exceeded)
      .def_property_readonly("relative_se", &EstimatorResult::relative_se);

  py::class_<ScalingRow>(m, "ScalingRow")
      .def_readonly("n", &ScalingRow::n)
      .def_readonly("i", &ScalingRow::i)
      .def_readonly("result", &ScalingRow::result);

  py::class_<ScalingSeries>(m, "ScalingSeries")
      .def_readonly("label", &ScalingSeries::label)
      .def_readonly("rows", &ScalingSeries::rows)
      .def("to_csv", [](const ScalingSeries& s) { return series_csv(s); });

  py::class_<SlopeFit>(m, "SlopeFit")
      .def_readonly("slope", &SlopeFit::slope)
      .def_readonly("intercept", &SlopeFit::intercept)
      .def_readonly("ci95", &SlopeFit::ci95)
      .def_readonly("r2", &SlopeFit::r2)
      .def_readonly("points", &SlopeFit::points);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("exit_code", &RunResult::exit_code)
      .def_readonly("artifacts", &RunResult::artifacts)
      .def_readonly("message", &RunResult::message);

  m.def(
      "clan_prob",
      [](const std::vector<double>& increments, std::size_t i, Convention c) {
        return clan_prob(path_of(increments), i, c).value();
      },
      py::arg("increments"), py::arg("i"), py::arg("convention") = Convention::paper_corollary,
      "Probability that clan i is the only survivor at generation n = len(increments).");
  m.def(
      "no_survivor_prob", [](const std::vector<double>& increments) { return no_survivor_prob(path_of(increments)); },
      py::arg("increments"));
  m.def(
      "reversed_rep_weight",
      [](const std::vector<double>& increments, std::size_t j) { return reversed_rep_weight(path_of(increments), j); },
      py::arg("increments"), py::arg("j"));
  m.def("sparre_andersen_prob", &sparre_andersen_prob, py::arg("n"));

  m.def(
      "estimate_event_prob",
      [](const IncrementLaw& law, const Regime& regime, std::size_t n, const SamplingTarget& target,
         Convention convention, std::uint64_t seed, unsigned workers) {
        py::gil_scoped_release release;
        return estimate_event_prob(law, regime, n, target, convention, StreamKey::root(seed).child(n), workers);
      },
      py::arg("law"), py::arg("regime"), py::arg("n"), py::arg("target"),
      py::arg("convention") = Convention::paper_corollary, py::arg("seed") = 0, py::arg("workers") = 1);
  m.def(
      "estimate_event_prob_reversed",
      [](const IncrementLaw& law, const Regime& regime, std::size_t n, const SamplingTarget& target,
         std::uint64_t seed, unsigned workers) {
        py::gil_scoped_release release;
        return estimate_event_prob_reversed(law, regime, n, target, StreamKey::root(seed).child(n), workers);
      },
      py::arg("law"), py::arg("regime"), py::arg("n"), py::arg("target"), py::arg("seed") = 0,
      py::arg("workers") = 1);
  m.def(
      "scaling_sweep",
      [](const IncrementLaw& law, const Regime& regime, const std::vector<std::size_t>& n_grid,
         const SamplingTarget& target, Convention convention, std::uint64_t seed, unsigned workers) {
        py::gil_scoped_release release;
        return scaling_sweep(law, regime, n_grid, target, convention, StreamKey::root(seed), workers);
      },
      py::arg("law"), py::arg("regime"), py::arg("n_grid"), py::arg("target"),
      py::arg("convention") = Convention::paper_corollary, py::arg("seed") = 0, py::arg("workers") = 1);
  m.def("fit_log_slope", &fit_log_slope, py::arg("series"));

  m.def(
      "run_experiment",
      [](const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::optional<unsigned> workers,
         std::optional<std::filesystem::path> out_dir) {
        ExperimentConfig cfg;
        try {
          cfg = load_config(config);
        } catch (const ConfigError& e) {
          RunResult r;
          r.exit_code = 1;
          r.message = e.what();
          return r;
        }
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (out_dir) cfg.out_dir = *out_dir;
        py::gil_scoped_release release;
        return run_experiment(cfg);
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("workers") = py::none(),
      py::arg("out_dir") = py::none(),
      "Runs a TOML experiment config and writes its artifacts; returns the exit code and artifact list.");
}
