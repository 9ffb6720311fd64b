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

#include "aids/classifier.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aids/errors.hpp"

namespace aids {

namespace {

using nlohmann::json;

constexpr std::uint16_t kFormatVersion = 1;
constexpr char kMagic[4] = {'A', 'I', 'D', 'S'};

double mlp_target(const ConnectionRecord& r) { return r.label.is_attack() ? 1.0 : 0.0; }
double svm_target(const ConnectionRecord& r) { return r.label.is_attack() ? 1.0 : -1.0; }

std::vector<LabeledVector> encode_all(const EncoderModel& enc,
                                      std::span<const ConnectionRecord> records,
                                      double (*target)(const ConnectionRecord&)) {
  std::vector<LabeledVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({enc.encode(r), target(r)});
  return out;
}

void require_both_classes(std::span<const ConnectionRecord> corpus) {
  bool attack = false, normal = false;
  for (const auto& r : corpus) (r.label.is_attack() ? attack : normal) = true;
  if (!attack || !normal) {
    throw DegenerateLabels("training corpus must contain both normal and attack records");
  }
}

MlpNetwork fit_mlp(const TrainSpec& spec, std::size_t width, std::size_t hidden,
                   std::span<const LabeledVector> data) {
  auto net = MlpNetwork::init({width, hidden, 1}, spec.seed);
  if (spec.trainer == TrainerKind::Lm) return train_lm(std::move(net), data, spec.lm).net;
  return train_rprop(std::move(net), data, spec.rprop).net;
}

double error_rate(const MlpNetwork& net, std::span<const LabeledVector> data) {
  std::size_t wrong = 0;
  for (const auto& ex : data) {
    const bool attack = forward(net, ex.x) >= 0.5;
    if (attack != (ex.y >= 0.5)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

// Little-endian byte writer / bounds-checked reader.
class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void uint(T v) {
    for (std::size_t k = 0; k < sizeof(T); ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void real(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::span<const std::uint8_t> take(std::size_t n) {
    if (in_.size() - pos_ < n) throw CorruptArtifact("artifact truncated");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T uint() {
    auto s = take(sizeof(T));
    T v = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<T>(s[k]) << (8 * k);
    return v;
  }
  double real() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

json manifest_to_json(const Manifest& m) {
  json cands = json::array();
  for (const auto& c : m.candidates) {
    cands.push_back({{"hidden_size", c.hidden_size}, {"validation_error", c.validation_error}});
  }
  return {{"training_digest", m.training_digest},
          {"seed", m.seed},
          {"config", m.config},
          {"created_at_ms", m.created_at_ms},
          {"corpus_size", m.corpus_size},
          {"evidence_folded", m.evidence_folded},
          {"candidates", cands},
          {"hidden_size", m.hidden_size},
          {"support_vectors", m.support_vectors}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.training_digest = j.at("training_digest").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = j.at("config").get<std::string>();
  m.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
  m.corpus_size = j.at("corpus_size").get<std::size_t>();
  m.evidence_folded = j.at("evidence_folded").get<std::size_t>();
  for (const auto& c : j.at("candidates")) {
    m.candidates.push_back(
        {c.at("hidden_size").get<std::size_t>(), c.at("validation_error").get<double>()});
  }
  m.hidden_size = j.at("hidden_size").get<std::size_t>();
  m.support_vectors = j.at("support_vectors").get<std::size_t>();
  return m;
}

}  // namespace

std::string_view to_string(ClassifierKind k) { return k == ClassifierKind::Mlp ? "mlp" : "svm"; }
std::string_view to_string(TrainerKind k) { return k == TrainerKind::Rprop ? "rprop" : "lm"; }

void TrainSpec::validate() const {
  if (kind == ClassifierKind::Mlp) {
    if (hidden_size_grid.empty()) throw InvalidConfig("hidden_size_grid must not be empty");
    for (auto h : hidden_size_grid) {
      if (h < 1) throw InvalidArchitecture("hidden size must be >= 1");
    }
    rprop.validate();
    lm.validate();
  } else {
    if (!(smo.C > 0.0)) throw InvalidConfig("SVM C must be > 0");
    if (!(smo.tolerance > 0.0)) throw InvalidConfig("SMO tolerance must be > 0");
    if (smo.kernel.type == KernelType::Rbf && smo.kernel.gamma < 0.0) {
      throw InvalidConfig("RBF gamma must be >= 0 (0 = auto)");
    }
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidConfig("validation_fraction must lie in (0,1)");
  }
}

std::string TrainSpec::snapshot() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << to_string(kind) << ";seed=" << seed << ";validation_fraction=" << validation_fraction;
  if (kind == ClassifierKind::Mlp) {
    os << ";trainer=" << to_string(trainer) << ";hidden_size_grid=";
    for (std::size_t i = 0; i < hidden_size_grid.size(); ++i) {
      os << (i ? "," : "") << hidden_size_grid[i];
    }
    if (trainer == TrainerKind::Rprop) {
      os << ";delta0=" << rprop.delta0 << ";eta_plus=" << rprop.eta_plus
         << ";eta_minus=" << rprop.eta_minus << ";delta_max=" << rprop.delta_max
         << ";delta_min=" << rprop.delta_min << ";max_epochs=" << rprop.max_epochs
         << ";target_mse=" << rprop.target_mse;
    } else {
      os << ";lambda0=" << lm.lambda0 << ";lambda_up=" << lm.lambda_up
         << ";lambda_down=" << lm.lambda_down << ";max_epochs=" << lm.max_epochs
         << ";target_mse=" << lm.target_mse << ";max_parameters=" << lm.max_parameters;
    }
  } else {
    os << ";C=" << smo.C << ";tolerance=" << smo.tolerance << ";max_passes=" << smo.max_passes
       << ";kernel=" << (smo.kernel.type == KernelType::Linear ? "linear" : "rbf");
    if (smo.kernel.type == KernelType::Rbf) os << ";gamma=" << smo.kernel.gamma;
  }
  return os.str();
}

std::string corpus_digest(std::span<const ConnectionRecord> corpus) {
  std::string text;
  for (const auto& r : corpus) {
    text += render_kdd_line(r);
    text += '\n';
  }
  return sha256_hex(text);
}

ClassifierArtifact train(const TrainSpec& spec, std::span<const ConnectionRecord> corpus,
                         std::int64_t created_at_ms) {
  spec.validate();
  if (corpus.empty()) throw EmptyDataset("training corpus is empty");
  require_both_classes(corpus);

  ClassifierArtifact art;
  art.kind = spec.kind;
  art.encoder = EncoderModel::fit(corpus);
  art.version = 1;
  art.manifest.training_digest = corpus_digest(corpus);
  art.manifest.seed = spec.seed;
  art.manifest.config = spec.snapshot();
  art.manifest.created_at_ms = created_at_ms;
  art.manifest.corpus_size = corpus.size();
  const std::size_t width = art.encoder.encoded_width();

  if (spec.kind == ClassifierKind::Svm) {
    SmoConfig cfg = spec.smo;
    cfg.seed = spec.seed;
    if (cfg.kernel.type == KernelType::Rbf && cfg.kernel.gamma == 0.0) {
      cfg.kernel.gamma = 1.0 / static_cast<double>(width);
    }
    const auto data = encode_all(art.encoder, corpus, svm_target);
    SvmModel model = smo_train(data, cfg);
    art.manifest.support_vectors = model.support_vectors.size();
    art.model = std::move(model);
    return art;
  }

  const auto all = encode_all(art.encoder, corpus, mlp_target);
  const DatasetSplit split = split_dataset(corpus, spec.validation_fraction, 0.0, spec.seed);
  const auto train_part = encode_all(art.encoder, split.train, mlp_target);
  const auto val_part = encode_all(art.encoder, split.validation, mlp_target);
  const auto& scored = val_part.empty() ? train_part : val_part;

  std::size_t best_size = 0;
  double best_error = 0.0;
  for (const auto h : spec.hidden_size_grid) {
    const auto net = fit_mlp(spec, width, h, train_part);
    const double err = error_rate(net, scored);
    art.manifest.candidates.push_back({h, err});
    if (best_size == 0 || err < best_error || (err == best_error && h < best_size)) {
      best_size = h;
      best_error = err;
    }
  }
  art.manifest.hidden_size = best_size;
  art.model = fit_mlp(spec, width, best_size, all);
  return art;
}

Prediction predict(const ClassifierArtifact& artifact, const ConnectionRecord& record) {
  const EncodedVector x = artifact.encoder.encode(record);
  if (const auto* net = std::get_if<MlpNetwork>(&artifact.model)) {
    const double y = forward(*net, x);
    return {y >= 0.5 ? LabelKind::Attack : LabelKind::Normal, y};
  }
  const double f = decision_value(std::get<SvmModel>(artifact.model), x);
  return {f >= 0.0 ? LabelKind::Attack : LabelKind::Normal, f};
}

std::vector<ConnectionRecord> retrain_corpus(std::span<const ConnectionRecord> base_corpus,
                                             std::span<const Evidence> evidence) {
  std::vector<ConnectionRecord> corpus(base_corpus.begin(), base_corpus.end());
  corpus.reserve(base_corpus.size() + evidence.size());
  for (const auto& ev : evidence) {
    ConnectionRecord r = ev.record;
    if (ev.decision == Decision::FalseAlarm) {
      r.label = Label::normal();
    } else if (!r.label.is_attack()) {
      r.label = Label::attack("confirmed_attack", AttackCategory::Unknown);
    }
    corpus.push_back(std::move(r));
  }
  return corpus;
}

ClassifierArtifact retrain(const ClassifierArtifact& artifact,
                           std::span<const ConnectionRecord> base_corpus,
                           std::span<const Evidence> evidence, const TrainSpec& spec,
                           std::int64_t created_at_ms, bool force) {
  if (evidence.empty() && !force) {
    throw NoNewEvidence("no confirmed attacks or false alarms to retrain on");
  }
  const auto corpus = retrain_corpus(base_corpus, evidence);
  ClassifierArtifact next = train(spec, corpus, created_at_ms);
  next.version = artifact.version + 1;
  next.manifest.evidence_folded = evidence.size();
  return next;
}

nlohmann::json manifest_json(const Manifest& manifest) { return manifest_to_json(manifest); }

std::size_t model_size(const ClassifierArtifact& artifact) {
  if (const auto* net = std::get_if<MlpNetwork>(&artifact.model)) return net->layer_sizes()[1];
  return std::get<SvmModel>(artifact.model).support_vectors.size();
}

Bytes serialize(const ClassifierArtifact& artifact) {
  json meta;
  meta["kind"] = to_string(artifact.kind);
  meta["version"] = artifact.version;
  meta["manifest"] = manifest_to_json(artifact.manifest);
  json vocab = json::array();
  for (const auto& v : artifact.encoder.vocabularies()) vocab.push_back(v);
  meta["encoder"] = {{"vocabularies", vocab}};

  std::vector<double> payload(artifact.encoder.mins().begin(), artifact.encoder.mins().end());
  payload.insert(payload.end(), artifact.encoder.maxs().begin(), artifact.encoder.maxs().end());

  if (const auto* net = std::get_if<MlpNetwork>(&artifact.model)) {
    meta["model"] = {{"layer_sizes", net->layer_sizes()}};
    const Eigen::VectorXd theta = net->parameters();
    payload.insert(payload.end(), theta.data(), theta.data() + theta.size());
  } else {
    const auto& svm = std::get<SvmModel>(artifact.model);
    meta["model"] = {{"kernel", svm.kernel.type == KernelType::Linear ? "linear" : "rbf"},
                     {"support_vectors", svm.support_vectors.size()},
                     {"width", svm.input_width()}};
    payload.push_back(svm.kernel.gamma);
    payload.push_back(svm.C);
    payload.push_back(svm.bias);
    payload.insert(payload.end(), svm.coefficients.begin(), svm.coefficients.end());
    for (const auto& sv : svm.support_vectors) payload.insert(payload.end(), sv.begin(), sv.end());
  }

  const std::string meta_text = meta.dump();
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.uint<std::uint16_t>(kFormatVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(meta_text.size()));
  w.raw(meta_text.data(), meta_text.size());
  w.uint<std::uint64_t>(payload.size());
  for (double v : payload) w.real(v);
  return w.take();
}

ClassifierArtifact deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw CorruptArtifact("bad magic");
  if (const auto v = r.uint<std::uint16_t>(); v != kFormatVersion) {
    throw CorruptArtifact("unsupported artifact format version " + std::to_string(v));
  }
  const auto meta_len = r.uint<std::uint32_t>();
  const auto meta_bytes = r.take(meta_len);
  const auto count = r.uint<std::uint64_t>();
  if (count > (bytes.size() / sizeof(double))) throw CorruptArtifact("artifact truncated");
  std::vector<double> payload(count);
  for (auto& v : payload) v = r.real();
  if (!r.done()) throw CorruptArtifact("trailing bytes after payload");

  try {
    const json meta = json::parse(meta_bytes.begin(), meta_bytes.end());
    ClassifierArtifact art;
    const auto kind = meta.at("kind").get<std::string>();
    if (kind != "mlp" && kind != "svm") throw CorruptArtifact("unknown model kind " + kind);
    art.kind = kind == "mlp" ? ClassifierKind::Mlp : ClassifierKind::Svm;
    art.version = meta.at("version").get<std::uint64_t>();
    if (art.version < 1) throw CorruptArtifact("artifact version must be >= 1");
    art.manifest = manifest_from_json(meta.at("manifest"));

    std::array<EncoderModel::Vocabulary, kNumSymbolic> vocab;
    const auto& jv = meta.at("encoder").at("vocabularies");
    if (jv.size() != kNumSymbolic) throw CorruptArtifact("encoder needs three vocabularies");
    for (std::size_t k = 0; k < kNumSymbolic; ++k) {
      vocab[k] = jv[k].get<EncoderModel::Vocabulary>();
    }
    std::size_t pos = 0;
    auto next = [&](std::size_t n) {
      if (payload.size() - pos < n) throw CorruptArtifact("payload shorter than metadata implies");
      auto s = std::span<const double>(payload).subspan(pos, n);
      pos += n;
      return s;
    };
    std::array<double, kNumContinuous> mins{}, maxs{};
    auto s = next(kNumContinuous);
    std::copy(s.begin(), s.end(), mins.begin());
    s = next(kNumContinuous);
    std::copy(s.begin(), s.end(), maxs.begin());
    art.encoder = EncoderModel::from_parts(std::move(vocab), mins, maxs);

    const auto& jm = meta.at("model");
    if (art.kind == ClassifierKind::Mlp) {
      auto net = MlpNetwork::zeros(jm.at("layer_sizes").get<std::vector<std::size_t>>());
      const auto p = net.parameter_count();
      s = next(p);
      net.set_parameters(Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(p)));
      art.model = std::move(net);
    } else {
      SvmModel svm;
      const auto kernel = jm.at("kernel").get<std::string>();
      const auto n_sv = jm.at("support_vectors").get<std::size_t>();
      const auto width = jm.at("width").get<std::size_t>();
      s = next(3);
      svm.kernel = kernel == "linear" ? Kernel::linear() : Kernel::rbf(s[0]);
      svm.kernel.gamma = s[0];
      svm.C = s[1];
      svm.bias = s[2];
      s = next(n_sv);
      svm.coefficients.assign(s.begin(), s.end());
      for (std::size_t i = 0; i < n_sv; ++i) {
        s = next(width);
        svm.support_vectors.emplace_back(s.begin(), s.end());
      }
      art.model = std::move(svm);
    }
    if (pos != payload.size()) throw CorruptArtifact("payload longer than metadata implies");
    const std::size_t model_width =
        art.kind == ClassifierKind::Mlp ? std::get<MlpNetwork>(art.model).input_width()
                                        : std::get<SvmModel>(art.model).input_width();
    if (model_width != 0 && model_width != art.encoder.encoded_width()) {
      throw CorruptArtifact("encoder width does not match model input width");
    }
    return art;
  } catch (const CorruptArtifact&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptArtifact(std::string("bad artifact metadata: ") + e.what());
  }
}

std::string artifact_digest(const ClassifierArtifact& artifact) {
  return sha256_hex(serialize(artifact));
}

void save_artifact(const std::filesystem::path& path, const ClassifierArtifact& artifact) {
  const Bytes bytes = serialize(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

ClassifierArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace aids
