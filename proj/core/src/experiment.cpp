/*
 * Copyright 2026 The birdcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "birdcolor/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "birdcolor/colorizer.hpp"
#include "birdcolor/error.hpp"

namespace birdcolor {
namespace {

std::uint64_t FoldSeed(std::uint64_t seed, std::size_t fold) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(fold) + 1;
}

std::vector<double> OneHot(std::size_t label, std::size_t num_classes) {
  std::vector<double> y(num_classes, 0.0);
  y.at(label) = 1.0;
  return y;
}

std::array<std::size_t, 3> ParseWidths(const std::string& s) {
  std::array<std::size_t, 3> w{};
  std::istringstream in(s);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) break;
    try {
      w[i++] = static_cast<std::size_t>(std::stoul(part));
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kParseError, "widths must be three comma-separated integers");
    }
  }
  Require(i == 3, ErrorCode::kParseError, "widths must be three comma-separated integers");
  return w;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::string ToString(FeatureMode mode) {
  return mode == FeatureMode::kColorized ? "colorized" : "grayscale";
}

FeatureMode ParseFeatureMode(const std::string& s) {
  if (s == "colorized") return FeatureMode::kColorized;
  if (s == "grayscale") return FeatureMode::kGrayscale;
  Fail(ErrorCode::kParseError, "mode must be 'colorized' or 'grayscale', got '" + s + "'");
}

void FeatureConfig::Validate() const {
  mel.Validate();
  Require(frame_pool >= 1 && frames >= 8, ErrorCode::kInvalidArgument,
          "frame_pool must be >= 1 and frames >= 8");
  Require(events.max_events >= 1 && events.max_events <= kMaxInstances,
          ErrorCode::kInvalidArgument, "max_events must lie in [1, 5]");
}

RecordingFeatures featurize_clip(const AudioClip& input, const FeatureConfig& config) {
  config.Validate();
  AudioClip clip = input.sample_rate == config.mel.sample_rate
                       ? input
                       : resample(input, config.mel.sample_rate);
  Require(!clip.samples.empty(), ErrorCode::kEmptyAudio, "empty recording " + clip.source_id);
  const DenoiseConfig denoise_config;
  if (clip.samples.size() < std::max(denoise_config.fft_size, kEnergyFrameLength)) {
    clip.samples.resize(std::max(denoise_config.fft_size, kEnergyFrameLength), 0.0);
  }
  const AudioClip conditioned = condition_for_detection(clip, kHighpassCutoffHz, denoise_config);
  const EnergyProfile profile = frame_energy(conditioned);
  std::vector<AcousticEvent> events = extract_events(conditioned, profile, config.events);

  const auto window = static_cast<std::size_t>(
      std::llround(config.events.window_seconds * config.mel.sample_rate));
  if (events.empty()) {
    AcousticEvent ev;
    ev.start_sample = 0;
    ev.end_sample = std::min(window, conditioned.samples.size());
    ev.samples.assign(conditioned.samples.begin(),
                      conditioned.samples.begin() + static_cast<std::ptrdiff_t>(ev.end_sample));
    events.push_back(std::move(ev));
  }

  RecordingFeatures out;
  for (auto& ev : events) {
    std::vector<double> samples = ev.samples;
    if (samples.size() < std::max(window, config.mel.fft_size)) {
      samples.resize(std::max(window, config.mel.fft_size), 0.0);
    }
    const MelSpectrogram spec = normalize_log_normalize(mel_spectrogram(samples, config.mel));
    out.instances.push_back(FitFrames(PoolFrames(spec.values, config.frame_pool), config.frames));
    out.spans.push_back({ev.start_sample, ev.end_sample, ev.peak_energy});
  }
  return out;
}

Image MakeImage(const Matrix& gray, const MelConfig& mel, FeatureMode mode) {
  MelSpectrogram spec;
  spec.values = gray;
  spec.config = mel;
  return ToImage(mode == FeatureMode::kColorized ? colorize(spec) : replicate_gray(spec));
}

RecordingBag MakeRecordingBag(const RecordingFeatures& features, const MelConfig& mel,
                              FeatureMode mode, std::size_t num_classes) {
  std::vector<Image> images;
  for (std::size_t i = 0; i < features.instances.size() && i < kMaxInstances; ++i) {
    images.push_back(MakeImage(features.instances[i], mel, mode));
  }
  return MakeBag(std::move(images), OneHot(features.label, num_classes));
}

ModelConfig ExperimentConfig::model_config(std::size_t num_classes) const {
  ModelConfig mc;
  mc.num_classes = num_classes;
  mc.height = features.mel.total_bins;
  mc.width = features.frames;
  mc.widths = widths;
  return mc;
}

ExperimentConfig ExperimentConfigFromKv(const KeyValueConfig& kv) {
  ExperimentConfig c;
  TrainConfig& t = c.train;
  t.lr_init = kv.GetDouble("lr_init", t.lr_init);
  t.lr_final = kv.GetDouble("lr_final", t.lr_final);
  t.batch_size = static_cast<std::size_t>(kv.GetUnsigned("batch_size", t.batch_size));
  t.epochs = static_cast<std::size_t>(kv.GetUnsigned("epochs", t.epochs));
  t.weight_decay = kv.GetDouble("weight_decay", t.weight_decay);
  t.beta1 = kv.GetDouble("beta1", t.beta1);
  t.beta2 = kv.GetDouble("beta2", t.beta2);
  t.seed = kv.GetUnsigned("seed", t.seed);
  FeatureConfig& f = c.features;
  f.mel.f_min = kv.GetDouble("f_min", f.mel.f_min);
  f.mel.f_max = kv.GetDouble("f_max", f.mel.f_max);
  f.mel.total_bins = static_cast<std::size_t>(kv.GetUnsigned("mel_bins", f.mel.total_bins));
  f.mel.fft_size = static_cast<std::size_t>(kv.GetUnsigned("fft_size", f.mel.fft_size));
  f.mel.hop = static_cast<std::size_t>(kv.GetUnsigned("hop", f.mel.hop));
  f.mel.sample_rate = static_cast<int>(kv.GetInt("sample_rate", f.mel.sample_rate));
  f.frame_pool = static_cast<std::size_t>(kv.GetUnsigned("frame_pool", f.frame_pool));
  f.frames = static_cast<std::size_t>(kv.GetUnsigned("frames", f.frames));
  f.events.max_events = static_cast<std::size_t>(kv.GetUnsigned("max_events", f.events.max_events));
  f.events.window_seconds = kv.GetDouble("window_seconds", f.events.window_seconds);
  f.events.max_overlap = kv.GetDouble("max_overlap", f.events.max_overlap);
  if (const auto w = kv.Get("widths")) c.widths = ParseWidths(*w);
  c.threshold = kv.GetDouble("threshold", c.threshold);
  c.train.Validate();
  c.features.Validate();
  return c;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  const FeatureConfig& f = c.features;
  return {
      {"train",
       {{"lr_init", t.lr_init}, {"lr_final", t.lr_final}, {"batch_size", t.batch_size},
        {"epochs", t.epochs}, {"beta1", t.beta1}, {"beta2", t.beta2},
        {"adam_eps", t.adam_eps}, {"weight_decay", t.weight_decay}, {"seed", t.seed}}},
      {"features",
       {{"f_min", f.mel.f_min}, {"f_max", f.mel.f_max}, {"mel_bins", f.mel.total_bins},
        {"fft_size", f.mel.fft_size}, {"hop", f.mel.hop}, {"sample_rate", f.mel.sample_rate},
        {"frame_pool", f.frame_pool}, {"frames", f.frames},
        {"max_events", f.events.max_events}, {"window_seconds", f.events.window_seconds},
        {"max_overlap", f.events.max_overlap}}},
      {"widths", c.widths},
      {"threshold", c.threshold},
  };
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  try {
    ExperimentConfig c;
    const auto& t = doc.at("train");
    c.train.lr_init = t.at("lr_init").get<double>();
    c.train.lr_final = t.at("lr_final").get<double>();
    c.train.batch_size = t.at("batch_size").get<std::size_t>();
    c.train.epochs = t.at("epochs").get<std::size_t>();
    c.train.beta1 = t.at("beta1").get<double>();
    c.train.beta2 = t.at("beta2").get<double>();
    c.train.adam_eps = t.at("adam_eps").get<double>();
    c.train.weight_decay = t.at("weight_decay").get<double>();
    c.train.seed = t.at("seed").get<std::uint64_t>();
    const auto& f = doc.at("features");
    c.features.mel.f_min = f.at("f_min").get<double>();
    c.features.mel.f_max = f.at("f_max").get<double>();
    c.features.mel.total_bins = f.at("mel_bins").get<std::size_t>();
    c.features.mel.fft_size = f.at("fft_size").get<std::size_t>();
    c.features.mel.hop = f.at("hop").get<std::size_t>();
    c.features.mel.sample_rate = f.at("sample_rate").get<int>();
    c.features.frame_pool = f.at("frame_pool").get<std::size_t>();
    c.features.frames = f.at("frames").get<std::size_t>();
    c.features.events.max_events = f.at("max_events").get<std::size_t>();
    c.features.events.window_seconds = f.at("window_seconds").get<double>();
    c.features.events.max_overlap = f.at("max_overlap").get<double>();
    c.widths = doc.at("widths").get<std::array<std::size_t, 3>>();
    c.threshold = doc.at("threshold").get<double>();
    return c;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("malformed experiment config: ") + ex.what());
  }
}

void ExperimentReport::Summarize() {
  mean_f1 = mean_roc_auc = mean_cmap = 0.0;
  if (folds.empty()) return;
  for (const auto& f : folds) {
    mean_f1 += f.macro_f1;
    mean_roc_auc += f.roc_auc;
    mean_cmap += f.cmap;
  }
  const double n = static_cast<double>(folds.size());
  mean_f1 /= n;
  mean_roc_auc /= n;
  mean_cmap /= n;
}

FoldMetrics evaluate_bags(std::span<const RecordingBag> bags, const ModelParams& params,
                          double threshold) {
  Require(!bags.empty(), ErrorCode::kEmptyDataset, "no recordings to evaluate");
  EvalBatch batch;
  batch.scores = predict(bags, params);
  batch.truth = Matrix(bags.size(), params.config.num_classes);
  for (std::size_t i = 0; i < bags.size(); ++i) {
    std::copy(bags[i].labels.begin(), bags[i].labels.end(), batch.truth.row(i).begin());
  }
  batch.threshold = threshold;
  FoldMetrics m;
  m.n_validation = bags.size();
  m.macro_f1 = macro_f1(batch);
  m.roc_auc = macro_roc_auc(batch);
  m.cmap = cmap(batch);
  return m;
}

ExperimentReport run_experiment(std::span<const RecordingFeatures> features,
                                std::span<const std::size_t> folds, std::size_t k_folds,
                                std::size_t num_classes, FeatureMode mode,
                                const ExperimentConfig& config, const ProgressFn& progress) {
  Require(features.size() == folds.size(), ErrorCode::kShapeMismatch,
          "fold list and feature list differ in length");
  const ModelConfig model_config = config.model_config(num_classes);
  std::vector<RecordingBag> bags;
  bags.reserve(features.size());
  for (const auto& f : features) {
    bags.push_back(MakeRecordingBag(f, config.features.mel, mode, num_classes));
  }

  ExperimentReport report;
  report.mode = mode;
  report.seed = config.train.seed;
  for (std::size_t k = 0; k < k_folds; ++k) {
    std::vector<RecordingBag> train_set;
    std::vector<RecordingBag> val_set;
    for (std::size_t i = 0; i < bags.size(); ++i) {
      (folds[i] == k ? val_set : train_set).push_back(bags[i]);
    }
    Require(!val_set.empty(), ErrorCode::kEmptyDataset,
            "fold " + std::to_string(k) + " has no validation recordings");
    TrainConfig tc = config.train;
    tc.seed = FoldSeed(config.train.seed, k);
    const TrainResult trained = train(train_set, model_config, tc);
    FoldMetrics m = evaluate_bags(val_set, trained.params, config.threshold);
    m.fold = k;
    m.n_train = train_set.size();
    report.folds.push_back(m);
    if (progress) {
      std::ostringstream msg;
      msg << ToString(mode) << " fold " << k << ": macro_f1=" << m.macro_f1
          << " roc_auc=" << m.roc_auc << " cmap=" << m.cmap;
      progress(msg.str());
    }
  }
  report.Summarize();
  return report;
}

std::vector<RecordingFeatures> featurize_manifest(const DatasetManifest& manifest,
                                                  const FeatureConfig& config) {
  std::vector<RecordingFeatures> features;
  features.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    RecordingFeatures f = featurize_clip(load_wav(manifest.resolve(e)), config);
    f.label = e.label;
    features.push_back(std::move(f));
  }
  return features;
}

ExperimentReport run_experiment(const DatasetManifest& manifest, FeatureMode mode,
                                const ExperimentConfig& config, const ProgressFn& progress) {
  const auto features = featurize_manifest(manifest, config.features);
  std::vector<std::size_t> folds;
  for (const auto& e : manifest.entries) folds.push_back(e.fold);
  return run_experiment(features, folds, manifest.k_folds, manifest.label_set.size(), mode,
                        config, progress);
}

namespace {

void AddPairs(AblationResult& result, const ExperimentReport& colorized,
              const ExperimentReport& grayscale) {
  for (std::size_t k = 0; k < colorized.folds.size(); ++k) {
    result.paired_colorized_f1.push_back(colorized.folds[k].macro_f1);
    result.paired_grayscale_f1.push_back(grayscale.folds[k].macro_f1);
  }
  result.colorized.push_back(colorized);
  result.grayscale.push_back(grayscale);
}

void FinishAblation(AblationResult& result) {
  result.wilcoxon =
      wilcoxon_signed_rank_greater(result.paired_colorized_f1, result.paired_grayscale_f1);
  const double n = static_cast<double>(result.paired_colorized_f1.size());
  result.mean_colorized_f1 =
      std::accumulate(result.paired_colorized_f1.begin(), result.paired_colorized_f1.end(), 0.0) / n;
  result.mean_grayscale_f1 =
      std::accumulate(result.paired_grayscale_f1.begin(), result.paired_grayscale_f1.end(), 0.0) / n;
}

}  // namespace

AblationResult run_ablation(const SynthSpec& synth, std::size_t n_seeds, std::size_t k_folds,
                            const ExperimentConfig& config, const ProgressFn& progress) {
  Require(n_seeds >= 1, ErrorCode::kInvalidArgument, "need at least one seed");
  AblationResult result;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    SynthSpec spec = synth;
    spec.seed = synth.seed + s;
    spec.Validate();
    std::vector<RecordingFeatures> features;
    std::vector<std::size_t> counts(spec.classes.size(), spec.recordings_per_class);
    const auto class_folds = StratifiedFolds(counts, k_folds, spec.seed);
    std::vector<std::size_t> folds;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
      for (std::size_t r = 0; r < spec.recordings_per_class; ++r) {
        RecordingFeatures f = featurize_clip(synthesize_recording(spec, c, r), config.features);
        f.label = c;
        features.push_back(std::move(f));
        folds.push_back(class_folds[c][r]);
      }
    }
    if (progress) progress("seed " + std::to_string(spec.seed) + ": features ready");
    ExperimentConfig run_config = config;
    run_config.train.seed = config.train.seed + s;
    const auto colorized = run_experiment(features, folds, k_folds, spec.classes.size(),
                                          FeatureMode::kColorized, run_config, progress);
    const auto grayscale = run_experiment(features, folds, k_folds, spec.classes.size(),
                                          FeatureMode::kGrayscale, run_config, progress);
    AddPairs(result, colorized, grayscale);
  }
  FinishAblation(result);
  return result;
}

AblationResult run_ablation(const DatasetManifest& manifest, const ExperimentConfig& config,
                            const ProgressFn& progress) {
  const auto features = featurize_manifest(manifest, config.features);
  std::vector<std::size_t> folds;
  for (const auto& e : manifest.entries) folds.push_back(e.fold);
  const std::size_t classes = manifest.label_set.size();
  AblationResult result;
  const auto colorized = run_experiment(features, folds, manifest.k_folds, classes,
                                        FeatureMode::kColorized, config, progress);
  const auto grayscale = run_experiment(features, folds, manifest.k_folds, classes,
                                        FeatureMode::kGrayscale, config, progress);
  AddPairs(result, colorized, grayscale);
  FinishAblation(result);
  return result;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "metric,fold,value\n";
  for (const auto& f : report.folds) {
    out << "macro_f1," << f.fold << "," << FormatDouble(f.macro_f1) << "\n";
    out << "roc_auc," << f.fold << "," << FormatDouble(f.roc_auc) << "\n";
    out << "cmap," << f.fold << "," << FormatDouble(f.cmap) << "\n";
  }
  out << "macro_f1,mean," << FormatDouble(report.mean_f1) << "\n";
  out << "roc_auc,mean," << FormatDouble(report.mean_roc_auc) << "\n";
  out << "cmap,mean," << FormatDouble(report.mean_cmap) << "\n";
  return out.str();
}

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json doc;
  doc["mode"] = ToString(report.mode);
  doc["seed"] = report.seed;
  auto folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_validation", f.n_validation},
                     {"macro_f1", f.macro_f1},
                     {"roc_auc", f.roc_auc},
                     {"cmap", f.cmap}});
  }
  doc["folds"] = std::move(folds);
  doc["mean"] = {{"macro_f1", report.mean_f1},
                 {"roc_auc", report.mean_roc_auc},
                 {"cmap", report.mean_cmap}};
  return doc;
}

nlohmann::json ablation_to_json(const AblationResult& result) {
  nlohmann::json doc;
  auto runs = [](const std::vector<ExperimentReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr;
  };
  doc["colorized"] = runs(result.colorized);
  doc["grayscale"] = runs(result.grayscale);
  doc["paired_macro_f1"] = {{"colorized", result.paired_colorized_f1},
                            {"grayscale", result.paired_grayscale_f1}};
  doc["mean_macro_f1"] = {{"colorized", result.mean_colorized_f1},
                          {"grayscale", result.mean_grayscale_f1}};
  doc["wilcoxon"] = {{"alternative", "colorized > grayscale"},
                     {"n", result.wilcoxon.n},
                     {"w_plus", result.wilcoxon.w_plus},
                     {"p_value", result.wilcoxon.p_value},
                     {"significant_at_0.05", result.wilcoxon.p_value < 0.05}};
  return doc;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "birdcolor-checkpoint";
  doc["version"] = 1;
  doc["mode"] = ToString(checkpoint.mode);
  doc["label_set"] = checkpoint.label_set;
  doc["train_folds"] = checkpoint.train_folds;
  doc["config"] = experiment_config_to_json(checkpoint.config);
  doc["params"] = params_to_json(checkpoint.params);
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << doc.dump() << "\n";
  if (!out) Fail(ErrorCode::kIoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open checkpoint " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    Require(doc.at("format").get<std::string>() == "birdcolor-checkpoint" &&
                doc.at("version").get<int>() == 1,
            ErrorCode::kUnsupportedFormat, "unknown checkpoint format or version");
    Checkpoint c;
    c.mode = ParseFeatureMode(doc.at("mode").get<std::string>());
    c.label_set = doc.at("label_set").get<std::vector<std::string>>();
    c.train_folds = doc.at("train_folds").get<std::vector<std::size_t>>();
    c.config = experiment_config_from_json(doc.at("config"));
    c.params = params_from_json(doc.at("params"));
    return c;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, "malformed checkpoint " + path.string() + ": " + ex.what());
  }
}

}  // namespace birdcolor
