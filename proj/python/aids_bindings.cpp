/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "aids/classifier.hpp"
#include "aids/dataset.hpp"
#include "aids/errors.hpp"
#include "aids/harness.hpp"
#include "aids/protocol.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::bytes to_bytes(const aids::Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

aids::Bytes from_bytes(const py::bytes& b) {
  const std::string s = b;
  return aids::Bytes(s.begin(), s.end());
}

py::dict report_dict(const aids::MetricsReport& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    rows.append(py::dict("name"_a = row.name, "vectors"_a = row.vectors,
                         "detected"_a = row.detected, "is_new"_a = row.is_new,
                         "rate"_a = row.detection_rate()));
  }
  return py::dict("model_version"_a = r.model_version, "rows"_a = rows,
                  "known_rate"_a = r.known_rate(), "new_rate"_a = r.new_rate(),
                  "false_alarm_rate"_a = r.false_alarm_rate(),
                  "normal_vectors"_a = r.normal_vectors, "false_alarms"_a = r.false_alarms,
                  "text"_a = aids::render_report(r, aids::ReportFormat::Text),
                  "csv"_a = aids::render_report(r, aids::ReportFormat::Csv));
}

}  // namespace

PYBIND11_MODULE(_aids, m) {
  m.doc() = "Adaptive intrusion detection core";

  static py::handle error_type = py::exception<aids::Error>(m, "AidsError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const aids::Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("kind") = e.kind();
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<aids::ConnectionRecord>(m, "ConnectionRecord")
      .def_readwrite("protocol_type", &aids::ConnectionRecord::protocol_type)
      .def_readwrite("service", &aids::ConnectionRecord::service)
      .def_readwrite("flag", &aids::ConnectionRecord::flag)
      .def_property_readonly("label", [](const aids::ConnectionRecord& r) { return r.label.name(); })
      .def_property_readonly("is_attack", [](const aids::ConnectionRecord& r) { return r.label.is_attack(); })
      .def_property_readonly("category", [](const aids::ConnectionRecord& r) {
        return std::string(aids::to_string(r.label.category));
      })
      .def("feature", &aids::feature_text, "column"_a)
      .def("__eq__", [](const aids::ConnectionRecord& a, const aids::ConnectionRecord& b) { return a == b; })
      .def("__repr__", [](const aids::ConnectionRecord& r) {
        return "<ConnectionRecord " + r.protocol_type + "/" + r.service + " " + r.label.name() + ">";
      });

  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (const auto& f : aids::kFeatureSchema) names.emplace_back(f.name);
    return names;
  });
  m.def("parse_kdd_line", [](const std::string& line) {
    return aids::parse_kdd_line(line, aids::default_taxonomy());
  }, "line"_a);
  m.def("render_kdd_line", &aids::render_kdd_line, "record"_a);
  m.def("load_kdd_file", [](const std::filesystem::path& path, std::size_t limit) {
    return aids::load_kdd_file(path, aids::default_taxonomy(), limit);
  }, "path"_a, "limit"_a = 0);
  m.def("stratified_sample", [](const std::vector<aids::ConnectionRecord>& records, std::size_t n,
                                std::uint64_t seed) { return aids::stratified_sample(records, n, seed); },
        "records"_a, "n"_a, "seed"_a = 0);
  m.def("count_by_category", [](const std::vector<aids::ConnectionRecord>& records) {
    return aids::count_by_category(records);
  }, "records"_a);
  m.def("synthetic_traffic", [](std::size_t per_class, std::uint64_t seed) {
    aids::SyntheticSpec spec;
    spec.per_class = per_class;
    return aids::synthetic_traffic(spec, seed);
  }, "per_class"_a = 40, "seed"_a = 0);

  py::class_<aids::TrainSpec>(m, "TrainSpec")
      .def(py::init([](const std::string& kind, double C, double gamma,
                       std::vector<std::size_t> hidden, const std::string& trainer,
                       std::size_t epochs, std::uint64_t seed) {
             aids::TrainSpec s;
             if (kind == "mlp") {
               s.kind = aids::ClassifierKind::Mlp;
             } else if (kind != "svm") {
               throw aids::InvalidConfig("kind must be 'svm' or 'mlp'");
             }
             if (trainer == "lm") {
               s.trainer = aids::TrainerKind::Lm;
             } else if (trainer != "rprop") {
               throw aids::InvalidConfig("trainer must be 'rprop' or 'lm'");
             }
             s.smo.C = C;
             s.smo.kernel = aids::Kernel::rbf(gamma);
             if (!hidden.empty()) s.hidden_size_grid = std::move(hidden);
             s.rprop.max_epochs = epochs;
             s.lm.max_epochs = epochs;
             s.seed = seed;
             s.validate();
             return s;
           }),
           "kind"_a = "svm", "C"_a = 1.0, "gamma"_a = 0.0, "hidden"_a = std::vector<std::size_t>{},
           "trainer"_a = "rprop", "epochs"_a = 1000, "seed"_a = 0)
      .def("snapshot", &aids::TrainSpec::snapshot);

  py::class_<aids::ClassifierArtifact>(m, "Artifact")
      .def_readonly("version", &aids::ClassifierArtifact::version)
      .def_property_readonly("kind", [](const aids::ClassifierArtifact& a) {
        return std::string(aids::to_string(a.kind));
      })
      .def_property_readonly("digest", &aids::artifact_digest)
      .def_property_readonly("model_size", &aids::model_size)
      .def_property_readonly("manifest", [](const aids::ClassifierArtifact& a) {
        return aids::manifest_json(a.manifest).dump();
      })
      .def("predict", [](const aids::ClassifierArtifact& a, const aids::ConnectionRecord& r) {
        const auto p = aids::predict(a, r);
        return py::make_tuple(p.is_attack(), p.score);
      }, "record"_a)
      .def("to_bytes", [](const aids::ClassifierArtifact& a) { return to_bytes(aids::serialize(a)); })
      .def_static("from_bytes", [](const py::bytes& b) { return aids::deserialize(from_bytes(b)); }, "data"_a)
      .def("save", [](const aids::ClassifierArtifact& a, const std::filesystem::path& p) {
        aids::save_artifact(p, a);
      }, "path"_a)
      .def_static("load", &aids::load_artifact, "path"_a);

  m.def("train", [](const aids::TrainSpec& spec, const std::vector<aids::ConnectionRecord>& corpus) {
    py::gil_scoped_release release;
    return aids::train(spec, corpus, 0);
  }, "spec"_a, "corpus"_a);

  m.def("message_type", [](const std::string& line) {
    return std::string(aids::to_string(aids::decode_message(line).type()));
  }, "line"_a);
  m.def("roundtrip_message", [](const std::string& line) {
    return aids::encode_message(aids::decode_message(line));
  }, "line"_a);

  m.def("run_scenario", [](const std::filesystem::path& path) {
    const auto config = aids::load_scenario(path);
    aids::ScenarioResult r;
    {
      py::gil_scoped_release release;
      r = aids::run_scenario(config);
    }
    py::list checks;
    for (const auto& c : r.invariants) {
      checks.append(py::dict("name"_a = c.name, "held"_a = c.held, "detail"_a = c.detail));
    }
    return py::dict("name"_a = config.name, "before"_a = report_dict(r.before),
                    "after"_a = report_dict(r.after), "invariants"_a = checks,
                    "retrains"_a = r.retrains, "final_version"_a = r.final_version,
                    "monitor_versions"_a = r.monitor_versions,
                    "probe_max_deviation"_a = r.probe_max_deviation,
                    "netlan_alarms"_a = r.netlan_alarms, "honeypot_alarms"_a = r.honeypot_alarms,
                    "evidence_unfolded"_a = r.evidence_unfolded, "trace"_a = r.trace);
  }, "path"_a);
}
