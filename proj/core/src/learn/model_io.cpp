// Copyright 2026 The Vendguard Authors
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

#include "vendguard/learn/model_io.hpp"

#include <cmath>
#include <limits>

#include "json_internal.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"

namespace vendguard::learn {

using internal::json;

namespace {

constexpr int kModelFormatVersion = 1;

json feature_config_json(const prep::FeatureConfig& c) {
  return {{"window", c.window},
          {"stride", c.stride},
          {"horizon_seconds", c.horizon_seconds},
          {"lowpass_alpha", c.lowpass_alpha},
          {"z_threshold", c.z_threshold},
          {"zscore_block", c.zscore_block},
          {"ma_short", c.ma_short},
          {"ma_long", c.ma_long}};
}

prep::FeatureConfig feature_config_from(const json& j) {
  prep::FeatureConfig c;
  c.window = j.at("window").get<std::size_t>();
  c.stride = j.at("stride").get<std::size_t>();
  c.horizon_seconds = j.at("horizon_seconds").get<std::int64_t>();
  c.lowpass_alpha = j.at("lowpass_alpha").get<double>();
  c.z_threshold = j.at("z_threshold").get<double>();
  c.zscore_block = j.at("zscore_block").get<std::size_t>();
  c.ma_short = j.at("ma_short").get<std::size_t>();
  c.ma_long = j.at("ma_long").get<std::size_t>();
  c.validate();
  return c;
}

json tree_config_json(const TreeConfig& c) {
  return {{"max_depth", c.max_depth},
          {"min_samples_split", c.min_samples_split},
          {"min_samples_leaf", c.min_samples_leaf},
          {"max_features", c.max_features}};
}

TreeConfig tree_config_from(const json& j) {
  TreeConfig c;
  c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  c.max_features = j.at("max_features").get<std::size_t>();
  return c;
}

json forest_config_json(const ForestConfig& c) {
  return {{"trees", c.trees},
          {"tree", tree_config_json(c.tree)},
          {"bootstrap", c.bootstrap},
          {"stratified_bootstrap", c.stratified_bootstrap},
          {"seed", c.seed}};
}

ForestConfig forest_config_from(const json& j) {
  ForestConfig c;
  c.trees = j.at("trees").get<std::size_t>();
  c.tree = tree_config_from(j.at("tree"));
  c.bootstrap = j.at("bootstrap").get<bool>();
  c.stratified_bootstrap = j.at("stratified_bootstrap").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json lstm_config_json(const LstmConfig& c) {
  return {{"hidden", c.hidden},
          {"window", c.window},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size},
          {"class_weighted", c.class_weighted},
          {"seed", c.seed}};
}

LstmConfig lstm_config_from(const json& j) {
  LstmConfig c;
  c.hidden = j.at("hidden").get<std::size_t>();
  c.window = j.at("window").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.class_weighted = j.at("class_weighted").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json config_json(const ModelArtifact& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  j["feature_version"] = prep::kFeatureVersion;
  json names = json::array();
  for (std::size_t i = 0; i < prep::kFeatureCount; ++i) names.push_back(prep::versioned_feature_name(i));
  j["features"] = names;
  j["feature_config"] = feature_config_json(m.feature_config);
  j["sequence_step_seconds"] = m.sequence_step_seconds;
  if (m.kind == ModelKind::kRandomForest) {
    j["model_config"] = forest_config_json(m.forest.config);
  } else {
    j["model_config"] = lstm_config_json(m.lstm.config);
  }
  return j;
}

json array_json(const prep::FeatureArray& a) { return json(std::vector<double>(a.begin(), a.end())); }

prep::FeatureArray array_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != prep::kFeatureCount) fail(Errc::kFormat, "feature array has wrong length");
  prep::FeatureArray a{};
  std::copy(v.begin(), v.end(), a.begin());
  return a;
}

void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(Errc::kFormat, std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

FeatureStats compute_feature_stats(const std::vector<prep::FeatureVector>& vectors) {
  FeatureStats s;
  if (vectors.empty()) return s;
  const double n = static_cast<double>(vectors.size());
  for (const auto& v : vectors) {
    for (std::size_t k = 0; k < prep::kFeatureCount; ++k) s.mean[k] += v.features[k];
    s.missing_mean += v.missing_fraction;
  }
  for (double& m : s.mean) m /= n;
  s.missing_mean /= n;
  for (const auto& v : vectors) {
    for (std::size_t k = 0; k < prep::kFeatureCount; ++k) {
      s.stddev[k] += (v.features[k] - s.mean[k]) * (v.features[k] - s.mean[k]);
    }
    s.missing_stddev += (v.missing_fraction - s.missing_mean) * (v.missing_fraction - s.missing_mean);
  }
  for (double& sd : s.stddev) sd = std::sqrt(sd / n);
  s.missing_stddev = std::sqrt(s.missing_stddev / n);
  return s;
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kRandomForest ? "rf" : "lstm";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "rf" || name == "random_forest") return ModelKind::kRandomForest;
  if (name == "lstm") return ModelKind::kLstm;
  fail(Errc::kInvalidArgument, "unknown model kind '" + std::string(name) + "' (expected rf or lstm)");
}

std::string ModelArtifact::fingerprint() const { return fingerprint_hex(config_json(*this).dump()); }

std::vector<double> predict_vectors(const ModelArtifact& model,
                                    const std::vector<prep::FeatureVector>& vectors) {
  std::vector<double> out(vectors.size(), std::numeric_limits<double>::quiet_NaN());
  if (model.kind == ModelKind::kRandomForest) {
    for (std::size_t i = 0; i < vectors.size(); ++i) out[i] = model.forest.predict_proba(vectors[i].features);
    return out;
  }
  const Sequences seqs = make_sequences(vectors, model.lstm.window, model.sequence_step_seconds);
  const std::vector<double> p = lstm_predict_proba(model.lstm, seqs);
  for (std::size_t i = 0; i < seqs.size(); ++i) out[seqs.target[i]] = p[i];
  return out;
}

std::string model_to_json(const ModelArtifact& m) {
  json j;
  j["format"] = "vendguard-model";
  j["version"] = kModelFormatVersion;
  j["config"] = config_json(m);
  j["fingerprint"] = m.fingerprint();
  j["training_seconds"] = m.training_seconds;
  j["feature_stats"] = {{"mean", array_json(m.stats.mean)},
                        {"stddev", array_json(m.stats.stddev)},
                        {"missing_mean", m.stats.missing_mean},
                        {"missing_stddev", m.stats.missing_stddev}};
  if (m.kind == ModelKind::kRandomForest) {
    json trees = json::array();
    for (const DecisionTree& t : m.forest.trees) {
      json nodes = json::array();
      for (const TreeNode& n : t.nodes) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.count0, n.count1}));
      }
      trees.push_back({{"seed", t.seed}, {"nodes", std::move(nodes)}});
    }
    j["forest"] = {{"n_features", m.forest.n_features}, {"trees", std::move(trees)}};
  } else {
    const LstmModel& l = m.lstm;
    j["lstm"] = {{"input_size", l.input_size},
                 {"hidden", l.hidden},
                 {"window", l.window},
                 {"params", l.params},
                 {"input_mean", l.input_mean},
                 {"input_std", l.input_std},
                 {"epoch_loss", l.epoch_loss}};
  }
  return j.dump();
}

ModelArtifact model_from_json(const std::string& text) {
  ModelArtifact m;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "vendguard-model") fail(Errc::kFormat, "not a vendguard model");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      fail(Errc::kIncompatible, "unsupported model format version");
    }
    const json& cfg = j.at("config");
    if (cfg.at("feature_version").get<int>() != prep::kFeatureVersion) {
      fail(Errc::kIncompatible, "model was trained on a different feature version");
    }
    m.kind = model_kind_from_string(cfg.at("kind").get<std::string>());
    m.feature_config = feature_config_from(cfg.at("feature_config"));
    m.sequence_step_seconds = cfg.at("sequence_step_seconds").get<std::int64_t>();
    m.training_seconds = j.at("training_seconds").get<double>();
    const json& st = j.at("feature_stats");
    m.stats.mean = array_from(st.at("mean"));
    m.stats.stddev = array_from(st.at("stddev"));
    m.stats.missing_mean = st.at("missing_mean").get<double>();
    m.stats.missing_stddev = st.at("missing_stddev").get<double>();
    if (m.kind == ModelKind::kRandomForest) {
      m.forest.config = forest_config_from(cfg.at("model_config"));
      const json& f = j.at("forest");
      m.forest.n_features = f.at("n_features").get<std::size_t>();
      for (const json& jt : f.at("trees")) {
        DecisionTree t;
        t.seed = jt.at("seed").get<std::uint64_t>();
        t.n_features = m.forest.n_features;
        for (const json& jn : jt.at("nodes")) {
          TreeNode n;
          n.feature = jn.at(0).get<int>();
          n.threshold = jn.at(1).get<double>();
          n.left = jn.at(2).get<int>();
          n.right = jn.at(3).get<int>();
          n.count0 = jn.at(4).get<std::uint64_t>();
          n.count1 = jn.at(5).get<std::uint64_t>();
          t.nodes.push_back(n);
        }
        const int count = static_cast<int>(t.nodes.size());
        for (const TreeNode& n : t.nodes) {
          if (n.is_leaf()) continue;
          if (n.feature >= static_cast<int>(t.n_features) || n.left <= 0 || n.right <= 0 ||
              n.left >= count || n.right >= count || !std::isfinite(n.threshold)) {
            fail(Errc::kFormat, "malformed tree node");
          }
        }
        if (t.nodes.empty()) fail(Errc::kFormat, "empty tree");
        m.forest.trees.push_back(std::move(t));
      }
      if (m.forest.trees.empty()) fail(Errc::kFormat, "forest has no trees");
    } else {
      const json& l = j.at("lstm");
      LstmModel& lm = m.lstm;
      lm.config = lstm_config_from(cfg.at("model_config"));
      lm.input_size = l.at("input_size").get<std::size_t>();
      lm.hidden = l.at("hidden").get<std::size_t>();
      lm.window = l.at("window").get<std::size_t>();
      lm.params = l.at("params").get<std::vector<double>>();
      lm.input_mean = l.at("input_mean").get<std::vector<double>>();
      lm.input_std = l.at("input_std").get<std::vector<double>>();
      lm.epoch_loss = l.at("epoch_loss").get<std::vector<double>>();
      if (lm.params.size() != lm.param_count() || lm.input_mean.size() != lm.input_size ||
          lm.input_std.size() != lm.input_size) {
        fail(Errc::kFormat, "LSTM parameter arrays have the wrong size");
      }
      require_finite(lm.params, "LSTM parameters");
    }
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("malformed model JSON: ") + e.what());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const ModelArtifact& model) {
  internal::write_text_file(path.string(), model_to_json(model));
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return model_from_json(text);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace vendguard::learn
