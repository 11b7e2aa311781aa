// Copyright 2026 The fedbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the generator, preprocessing, aggregation, metrics and
// the experiment runner.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fedbench/autodiff/param_vector.hpp"
#include "fedbench/bench/dataset.hpp"
#include "fedbench/bench/experiment.hpp"
#include "fedbench/error.hpp"
#include "fedbench/fedsim/fedsim.hpp"
#include "fedbench/metrics/metrics.hpp"
#include "fedbench/plantgen/plantgen.hpp"

namespace py = pybind11;
using namespace fedbench;

namespace {

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

py::dict report_to_dict(const metrics::MetricReport& r) {
  py::dict d;
  d["f1"] = optional_float(r.f1_pointwise);
  d["f1c"] = optional_float(r.f1_composite);
  d["auc_pr"] = optional_float(r.auc_pr);
  d["vus_pr"] = optional_float(r.vus_pr);
  d["threshold"] = optional_float(r.best_threshold);
  d["precision"] = optional_float(r.precision);
  d["recall"] = optional_float(r.recall);
  return d;
}

py::array_t<double> tensor_to_array(const ad::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Federated time-series anomaly detection benchmark core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<PlanningError>(m, "PlanningError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<UndefinedMetric>(m, "UndefinedMetric", base.ptr());

  py::class_<LabeledSeries>(m, "Series")
      .def(py::init([](std::vector<std::string> variables, const std::vector<std::vector<double>>& rows,
                       std::vector<std::uint8_t> labels, double rate_hz) {
             LabeledSeries s;
             s.variables = std::move(variables);
             for (const auto& r : rows) {
               if (r.size() != s.variables.size()) throw InvalidArgument("row width != variable count");
               s.samples.insert(s.samples.end(), r.begin(), r.end());
             }
             s.labels = labels.empty() ? std::vector<std::uint8_t>(rows.size(), 0) : std::move(labels);
             s.rate_hz = rate_hz;
             s.validate();
             return s;
           }),
           py::arg("variables"), py::arg("rows"), py::arg("labels") = std::vector<std::uint8_t>{},
           py::arg("rate_hz") = 50.0)
      .def_readonly("variables", &LabeledSeries::variables)
      .def_readonly("labels", &LabeledSeries::labels)
      .def_readonly("rate_hz", &LabeledSeries::rate_hz)
      .def_property_readonly("length", &LabeledSeries::length)
      .def_property_readonly("width", &LabeledSeries::width)
      .def("values",
           [](const LabeledSeries& s) {
             py::array_t<double> out({static_cast<py::ssize_t>(s.length()), static_cast<py::ssize_t>(s.width())});
             std::copy(s.samples.begin(), s.samples.end(), out.mutable_data());
             return out;
           },
           "T x d sample matrix")
      .def("column", [](const LabeledSeries& s, const std::string& name) {
        return s.column(s.variable_index(name));
      })
      .def("__len__", &LabeledSeries::length);

  m.def(
      "generate_pair",
      [](int dataset_id, std::size_t cycles_train, std::size_t cycles_test, std::uint64_t seed,
         double noise_fraction) {
        plant::PlantConfig cfg;
        cfg.cycles_train = cycles_train;
        cfg.cycles_test = cycles_test;
        cfg.noise_fraction = noise_fraction;
        plant::DatasetPair p = plant::generate_pair(dataset_id, cfg, seed);
        return py::make_tuple(std::move(p.train), std::move(p.test));
      },
      py::arg("dataset_id"), py::arg("cycles_train") = 200, py::arg("cycles_test") = 100,
      py::arg("seed") = 2024, py::arg("noise_fraction") = 0.005,
      "Normal train series and labeled test series for QAPPD pair 1..10");

  m.def("plan", [](int dataset_id) {
    const plant::AnomalyPlan p = plant::qappd_plan(dataset_id);
    std::vector<std::string> types;
    for (auto t : p.types) types.push_back(plant::to_string(t));
    py::dict d;
    d["types"] = types;
    d["frequency"] = p.target_frequency;
    d["events"] = p.event_count;
    return d;
  });

  m.def(
      "normalize",
      [](const LabeledSeries& train, const LabeledSeries& test) {
        bench::NormalizedPair n = bench::normalize(train, test);
        return py::make_tuple(std::move(n.train), std::move(n.test));
      },
      py::arg("train"), py::arg("test"), "Min-max fit on train, applied to both");

  m.def(
      "make_windows",
      [](const LabeledSeries& s, std::size_t window, std::size_t stride, bool forecasting) {
        const models::WindowSet w = bench::make_windows(s, window, stride, forecasting);
        const py::object next = forecasting ? py::object(tensor_to_array(w.next)) : py::object(py::none());
        return py::make_tuple(tensor_to_array(w.windows), next);
      },
      py::arg("series"), py::arg("window"), py::arg("stride") = 1, py::arg("forecasting") = false,
      "(N x m x d windows, N x d targets or None)");

  m.def(
      "fedavg_aggregate",
      [](const std::vector<std::vector<double>>& params, const std::vector<double>& weights) {
        std::vector<ad::ParamVector> pv;
        for (const auto& p : params) pv.emplace_back(ad::Manifest{{"w", {p.size()}}}, p);
        const ad::ParamVector out = fedsim::fedavg_aggregate(pv, weights);
        return std::vector<double>(out.values().begin(), out.values().end());
      },
      py::arg("params"), py::arg("weights"), "Weighted element-wise mean of flat parameter vectors");

  m.def("best_f1", [](const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
    const auto r = metrics::best_f1_pointwise(s, l);
    return py::make_tuple(r.f1, r.threshold);
  });
  m.def("composite_f1", [](const std::vector<double>& s, const std::vector<std::uint8_t>& l,
                           double threshold) { return metrics::composite_f1(s, l, threshold); });
  m.def("auc_pr", [](const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
    return metrics::auc_pr(s, l);
  });
  m.def(
      "vus_pr",
      [](const std::vector<double>& s, const std::vector<std::uint8_t>& l, std::size_t lmax) {
        return metrics::vus_pr(s, l, lmax);
      },
      py::arg("scores"), py::arg("labels"), py::arg("lmax") = 10);
  m.def(
      "evaluate",
      [](const std::vector<double>& s, const std::vector<std::uint8_t>& l, std::size_t lmax) {
        metrics::MetricsConfig cfg;
        cfg.lmax = lmax;
        return report_to_dict(metrics::evaluate(s, l, cfg));
      },
      py::arg("scores"), py::arg("labels"), py::arg("lmax") = 10,
      "All four metrics; undefined values are None");

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& output_dir) {
        bench::ExperimentConfig cfg = bench::parse_config(config_text, "<python>");
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        bench::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = bench::run_experiment(cfg);
        }
        py::dict out;
        for (const auto& s : r.summaries) {
          py::dict stats;
          for (const auto& st : s.stats) {
            py::dict d;
            d["mean"] = st.n ? py::object(py::float_(st.mean)) : py::object(py::none());
            d["std"] = st.n ? py::object(py::float_(st.std)) : py::object(py::none());
            d["n"] = st.n;
            stats[py::str(st.metric)] = d;
          }
          py::list seeds;
          for (const auto& seed : s.seeds) {
            py::dict d;
            d["seed"] = seed.seed;
            d["best"] = seed.best ? py::object(report_to_dict(*seed.best)) : py::object(py::none());
            d["best_round"] = seed.best_round ? py::object(py::int_(*seed.best_round)) : py::object(py::none());
            d["error"] = seed.error;
            seeds.append(d);
          }
          py::dict p;
          p["stats"] = stats;
          p["seeds"] = seeds;
          p["partial"] = s.partial();
          out[py::str(fedsim::to_string(s.paradigm))] = p;
        }
        return out;
      },
      py::arg("config"), py::arg("output_dir") = "",
      "Run a config (key = value text); returns per-paradigm summaries");

  m.def("ratio_report", &bench::ratio_report_from_dir, py::arg("directory"),
        "Ratio CSV over the run outputs below a directory");
}
