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

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "aids/errors.hpp"
#include "aids/harness.hpp"
#include "aids/service.hpp"
#include "aids/transport.hpp"

namespace fs = std::filesystem;
using namespace aids;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct DataFlags {
  std::string path;
  std::size_t sample = 0;
  std::uint64_t seed = 0;

  void add(CLI::App* app, const std::string& name, const std::string& help, bool required = true) {
    auto* opt = app->add_option(name, path, help)->check(CLI::ExistingFile);
    if (required) opt->required();
    app->add_option("--sample", sample, "Stratified subsample size (0 keeps all)");
    app->add_option("--seed", seed, "Sampling seed");
  }

  std::vector<ConnectionRecord> load() const {
    auto records = load_kdd_file(path, default_taxonomy());
    if (sample > 0) records = stratified_sample(records, sample, seed);
    return records;
  }
};

struct SpecFlags {
  std::string kind = "svm";
  std::string trainer = "rprop";
  std::vector<std::size_t> hidden = {15, 25, 40};
  std::size_t epochs = 1000;
  double C = 1.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "Classifier")->check(CLI::IsMember({"svm", "mlp"}))->capture_default_str();
    app->add_option("--trainer", trainer, "MLP trainer")->check(CLI::IsMember({"rprop", "lm"}))->capture_default_str();
    app->add_option("--hidden", hidden, "MLP hidden-size grid")->delimiter(',')->capture_default_str();
    app->add_option("--epochs", epochs, "MLP epoch budget")->capture_default_str();
    app->add_option("--C", C, "SVM box constraint")->capture_default_str();
    app->add_option("--gamma", gamma, "RBF gamma, 0 = 1/encoded width")->capture_default_str();
    app->add_option("--train-seed", seed, "Training seed")->capture_default_str();
  }

  TrainSpec spec() const {
    TrainSpec s;
    s.kind = kind == "mlp" ? ClassifierKind::Mlp : ClassifierKind::Svm;
    s.trainer = trainer == "lm" ? TrainerKind::Lm : TrainerKind::Rprop;
    s.hidden_size_grid = hidden;
    s.rprop.max_epochs = s.lm.max_epochs = epochs;
    s.smo.C = C;
    s.smo.kernel.gamma = gamma;
    s.seed = seed;
    s.validate();
    return s;
  }
};

std::pair<std::string, int> split_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ConfigError("expected host:port, got " + text);
  return {text.substr(0, colon), std::stoi(text.substr(colon + 1))};
}

void print_checks(const ScenarioResult& r) {
  for (const auto& c : r.invariants) {
    std::cout << (c.held ? "[ok]   " : "[FAIL] ") << c.name;
    if (!c.held) std::cout << ": " << c.detail;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive intrusion detection: classifiers, nodes and simulation"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a classifier artifact on a KDD file");
  DataFlags train_data;
  SpecFlags train_spec;
  std::string train_out;
  train_data.add(train_cmd, "--data", "Training records (KDD format)");
  train_spec.add(train_cmd);
  train_cmd->add_option("--out", train_out, "Artifact path")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Measure an artifact on a KDD file");
  DataFlags eval_data;
  std::string eval_model, eval_train, eval_text, eval_csv;
  std::size_t eval_train_sample = 0;
  eval_data.add(eval_cmd, "--data", "Records to evaluate");
  eval_cmd->add_option("--model", eval_model, "Artifact path")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--train", eval_train, "Training file; its attack names count as known")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--train-sample", eval_train_sample, "Subsample applied to --train");
  eval_cmd->add_option("--text", eval_text, "Write the text report here");
  eval_cmd->add_option("--csv", eval_csv, "Write the CSV report here");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario file end to end");
  std::string sim_file, sim_out;
  sim_cmd->add_option("scenario", sim_file, "Scenario file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out-dir", sim_out, "Directory for reports and the event trace");

  // central serve
  auto* central_cmd = app.add_subcommand("central", "Central module");
  central_cmd->require_subcommand(1);
  auto* serve_cmd = central_cmd->add_subcommand("serve", "Serve monitors and the officer HTTP API");
  DataFlags serve_data;
  SpecFlags serve_spec;
  std::string serve_model, serve_listen = "127.0.0.1:7070", serve_http = "127.0.0.1:8080",
                           serve_log = "central.log", serve_officer = "manual";
  std::size_t serve_k = 8;
  serve_data.add(serve_cmd, "--corpus", "Base training corpus (KDD format)");
  serve_spec.add(serve_cmd);
  serve_cmd->add_option("--model", serve_model, "Initial artifact; trained from the corpus when omitted")
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--listen", serve_listen, "Monitor endpoint host:port")->capture_default_str();
  serve_cmd->add_option("--http", serve_http, "HTTP API host:port")->capture_default_str();
  serve_cmd->add_option("--log", serve_log, "Event log; replayed when it already exists")->capture_default_str();
  serve_cmd->add_option("--officer", serve_officer, "Officer policy")
      ->check(CLI::IsMember({"oracle", "always_attack", "always_false_alarm", "manual"}))
      ->capture_default_str();
  serve_cmd->add_option("--threshold", serve_k, "Evidence count that triggers a retrain")->capture_default_str();

  // monitor run
  auto* monitor_cmd = app.add_subcommand("monitor", "Net-LAN monitor");
  monitor_cmd->require_subcommand(1);
  auto* mrun_cmd = monitor_cmd->add_subcommand("run", "Stream records to Central");
  DataFlags mrun_data;
  MonitorRunOptions mopt;
  std::string mrun_central = "127.0.0.1:7070";
  std::int64_t mrun_linger = 0;
  mrun_data.add(mrun_cmd, "--data", "Traffic to classify (KDD format)");
  mrun_cmd->add_option("--central", mrun_central, "Central host:port")->capture_default_str();
  mrun_cmd->add_option("--node-id", mopt.node_id, "Node id")->capture_default_str();
  mrun_cmd->add_option("--linger-ms", mrun_linger, "Keep applying updates after the stream ends");

  // honeypot run
  auto* honeypot_cmd = app.add_subcommand("honeypot", "H&N monitor");
  honeypot_cmd->require_subcommand(1);
  auto* hrun_cmd = honeypot_cmd->add_subcommand("run", "Report attacks seen by the honeypot");
  DataFlags hrun_data;
  HoneypotRunOptions hopt;
  std::string hrun_central = "127.0.0.1:7070";
  hrun_data.add(hrun_cmd, "--data", "Traffic routed to the honeypot (KDD format)");
  hrun_cmd->add_option("--central", hrun_central, "Central host:port")->capture_default_str();
  hrun_cmd->add_option("--node-id", hopt.node_id, "Node id")->capture_default_str();
  hrun_cmd->add_option("--p-detect", hopt.p_detect, "Audit detection probability")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  hrun_cmd->add_option("--detect-seed", hopt.seed, "Detection seed");

  // dataset sample
  auto* dataset_cmd = app.add_subcommand("dataset", "Dataset utilities");
  dataset_cmd->require_subcommand(1);
  auto* sample_cmd = dataset_cmd->add_subcommand("sample", "Write a stratified sample or synthetic traffic");
  std::string sample_in, sample_out;
  std::size_t sample_n = 1000, sample_synth = 0;
  std::uint64_t sample_seed = 0;
  auto* in_opt = sample_cmd->add_option("--in", sample_in, "Source KDD file")->check(CLI::ExistingFile);
  auto* synth_opt = sample_cmd->add_option("--synthetic", sample_synth, "Generate this many records per synthetic class");
  in_opt->excludes(synth_opt);
  sample_cmd->add_option("--n", sample_n, "Sample size")->capture_default_str();
  sample_cmd->add_option("--seed", sample_seed, "Seed");
  sample_cmd->add_option("--out", sample_out, "Output KDD file")->required();
  sample_cmd->add_flag("--counts", "Print per-category counts of the output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto corpus = train_data.load();
      const auto artifact = train(train_spec.spec(), corpus, wall_clock_ms());
      save_artifact(train_out, artifact);
      std::cout << "trained " << to_string(artifact.kind) << " on " << corpus.size()
                << " records, model size " << model_size(artifact) << ", digest "
                << artifact_digest(artifact) << "\n";
      return 0;
    }

    if (*eval_cmd) {
      const auto artifact = load_artifact(eval_model);
      const auto records = eval_data.load();
      std::set<std::string> known;
      if (!eval_train.empty()) {
        auto corpus = load_kdd_file(eval_train, default_taxonomy());
        if (eval_train_sample > 0) corpus = stratified_sample(corpus, eval_train_sample, eval_data.seed);
        for (auto& n : label_names(corpus)) known.insert(n);
      } else {
        for (const auto& r : records) known.insert(r.label.name());
      }
      const auto report = compute_metrics(replay_stream(artifact, records), known, artifact.version);
      std::cout << render_report(report, ReportFormat::Text);
      if (!eval_text.empty()) emit_report(report, ReportFormat::Text, eval_text);
      if (!eval_csv.empty()) emit_report(report, ReportFormat::Csv, eval_csv);
      return 0;
    }

    if (*sim_cmd) {
      const auto config = load_scenario(sim_file);
      const auto result = run_scenario(config);
      std::cout << "Before adaptation\n" << render_report(result.before, ReportFormat::Text)
                << "\nAfter adaptation\n" << render_report(result.after, ReportFormat::Text) << "\n"
                << "retrains " << result.retrains << ", net-lan alarms " << result.netlan_alarms
                << ", honeypot alarms " << result.honeypot_alarms << ", unfolded evidence "
                << result.evidence_unfolded << "\n";
      print_checks(result);
      if (!sim_out.empty()) {
        fs::create_directories(sim_out);
        const fs::path dir = sim_out;
        emit_report(result.before, ReportFormat::Text, dir / "before.txt");
        emit_report(result.before, ReportFormat::Csv, dir / "before.csv");
        emit_report(result.after, ReportFormat::Text, dir / "after.txt");
        emit_report(result.after, ReportFormat::Csv, dir / "after.csv");
        write_trace(dir / "trace.log", result.trace);
      }
      return result.all_invariants_held() ? 0 : 1;
    }

    if (*serve_cmd) {
      CentralConfig cfg;
      cfg.officer = parse_officer_policy(serve_officer);
      cfg.retrain_threshold = serve_k;
      cfg.spec = serve_spec.spec();
      auto corpus = serve_data.load();
      std::optional<Central> central;
      if (fs::exists(serve_log) && fs::file_size(serve_log) > 0) {
        central.emplace(Central::replay(cfg, corpus, fs::path(serve_log)));
        std::cout << "replayed " << serve_log << " to model version " << central->model_version() << "\n";
      } else {
        auto initial = serve_model.empty() ? train(cfg.spec, corpus, wall_clock_ms()) : load_artifact(serve_model);
        central.emplace(cfg, std::move(corpus), std::move(initial));
      }
      central->open_log(serve_log);
      CentralService service(std::move(*central));
      CentralServer nodes(service);
      HttpServer http(service);
      const auto [lhost, lport] = split_endpoint(serve_listen);
      const auto [hhost, hport] = split_endpoint(serve_http);
      const int bound_nodes = nodes.start(lhost, lport);
      const int bound_http = http.start(hhost, hport);
      std::cout << "monitors on " << lhost << ":" << bound_nodes << ", HTTP API on " << hhost << ":"
                << bound_http << std::endl;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      http.stop();
      nodes.stop();
      service.wait_for_retrain();
      return 0;
    }

    if (*mrun_cmd) {
      std::tie(mopt.host, mopt.port) = split_endpoint(mrun_central);
      mopt.linger = std::chrono::milliseconds(mrun_linger);
      const auto records = mrun_data.load();
      const auto s = run_monitor(mopt, records);
      std::cout << "records " << s.counters.records_seen << ", alarms " << s.counters.alarms_raised
                << ", dropped " << s.counters.dropped_no_model << ", versions";
      for (auto v : s.versions) std::cout << " " << v;
      std::cout << "\n";
      return 0;
    }

    if (*hrun_cmd) {
      std::tie(hopt.host, hopt.port) = split_endpoint(hrun_central);
      const auto records = hrun_data.load();
      std::cout << "alarms " << run_honeypot(hopt, records) << "\n";
      return 0;
    }

    if (*sample_cmd) {
      std::vector<ConnectionRecord> out;
      if (sample_synth > 0) {
        out = synthetic_traffic({sample_synth, {}}, sample_seed);
      } else if (!sample_in.empty()) {
        out = stratified_sample(load_kdd_file(sample_in, default_taxonomy()), sample_n, sample_seed);
      } else {
        throw ConfigError("one of --in or --synthetic is required");
      }
      write_kdd_file(sample_out, out);
      std::cout << "wrote " << out.size() << " records to " << sample_out << "\n";
      if (sample_cmd->count("--counts") > 0) {
        for (const auto& [name, n] : count_by_category(out)) std::cout << "  " << name << " " << n << "\n";
      }
      return 0;
    }
  } catch (const aids::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
