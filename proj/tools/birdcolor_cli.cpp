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

// birdcolor: command-line front end for the event-mining, featurisation,
// training and ablation pipeline. Every subcommand exits 0 on success; on
// failure it prints one JSON line {"error": <code>, "message": ...} to
// stderr and exits 2 (usage errors exit 1).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "birdcolor/audio.hpp"
#include "birdcolor/colorizer.hpp"
#include "birdcolor/config.hpp"
#include "birdcolor/dataset.hpp"
#include "birdcolor/error.hpp"
#include "birdcolor/events.hpp"
#include "birdcolor/experiment.hpp"
#include "birdcolor/npy.hpp"
#include "birdcolor/spectrogram.hpp"
#include "birdcolor/synth.hpp"

namespace fs = std::filesystem;
using namespace birdcolor;

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIoError, "write failed for " + path.string());
}

KeyValueConfig LoadOptionalConfig(const std::string& path) {
  return path.empty() ? KeyValueConfig{} : KeyValueConfig::Load(path);
}

void Log(const std::string& line) { std::cerr << line << std::endl; }

MelConfig MelFromConfig(const KeyValueConfig& kv) {
  MelConfig mel;
  mel.f_min = kv.GetDouble("f_min", mel.f_min);
  mel.f_max = kv.GetDouble("f_max", mel.f_max);
  mel.total_bins = static_cast<std::size_t>(kv.GetUnsigned("mel_bins", mel.total_bins));
  mel.fft_size = static_cast<std::size_t>(kv.GetUnsigned("fft_size", mel.fft_size));
  mel.hop = static_cast<std::size_t>(kv.GetUnsigned("hop", mel.hop));
  mel.sample_rate = static_cast<int>(kv.GetInt("sample_rate", mel.sample_rate));
  mel.Validate();
  return mel;
}

EventConfig EventsFromConfig(const KeyValueConfig& kv) {
  EventConfig ev;
  ev.max_events = static_cast<std::size_t>(kv.GetUnsigned("max_events", ev.max_events));
  ev.window_seconds = kv.GetDouble("window_seconds", ev.window_seconds);
  ev.max_overlap = kv.GetDouble("max_overlap", ev.max_overlap);
  return ev;
}

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t folds = 5;
  std::string mode = "colorized";
};

int RunSynth(const CommonOptions& opt, const std::string& out) {
  KeyValueConfig kv = LoadOptionalConfig(opt.config);
  if (opt.seed) kv.Set("seed", std::to_string(*opt.seed));
  const SynthSpec spec = SynthSpecFromConfig(kv);
  synthesize_dataset(spec, out);
  const DatasetManifest manifest = build_manifest(out, opt.folds, spec.seed);
  save_manifest(manifest, fs::path(out) / "manifest.json");
  std::cout << (fs::path(out) / "manifest.json").string() << "\n";
  return 0;
}

int RunManifest(const CommonOptions& opt, const std::string& root, const std::string& out) {
  const DatasetManifest manifest = build_manifest(root, opt.folds, opt.seed.value_or(0));
  save_manifest(manifest, out);
  return 0;
}

int RunDetect(const CommonOptions& opt, const std::string& input, const std::string& out) {
  const KeyValueConfig kv = LoadOptionalConfig(opt.config);
  AudioClip clip = load_wav(input);
  const int rate = static_cast<int>(kv.GetInt("sample_rate", kCanonicalSampleRate));
  if (clip.sample_rate != rate) clip = resample(clip, rate);
  const auto events = detect_events(clip, EventsFromConfig(kv));
  const std::string text = events_to_json(input, clip.sample_rate, events).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    WriteText(out, text);
  }
  return 0;
}

int RunFeaturize(const CommonOptions& opt, const std::string& events_path,
                 const std::string& out) {
  const KeyValueConfig kv = LoadOptionalConfig(opt.config);
  std::ifstream in(events_path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + events_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("events file is not JSON: ") + ex.what());
  }
  const EventsManifest manifest = events_from_json(doc);
  MelConfig mel = MelFromConfig(kv);
  AudioClip clip = load_wav(manifest.source_id);
  if (clip.sample_rate != manifest.sample_rate) clip = resample(clip, manifest.sample_rate);
  Require(mel.sample_rate == manifest.sample_rate, ErrorCode::kInvalidArgument,
          "mel sample_rate differs from the events manifest sample_rate");
  const AudioClip conditioned = condition_for_detection(clip);

  fs::create_directories(out);
  for (std::size_t k = 0; k < manifest.events.size(); ++k) {
    const EventSpan& span = manifest.events[k];
    Require(span.start_sample < span.end_sample && span.end_sample <= conditioned.samples.size(),
            ErrorCode::kInvalidArgument, "event span outside the recording");
    std::vector<double> samples(conditioned.samples.begin() + static_cast<std::ptrdiff_t>(span.start_sample),
                                conditioned.samples.begin() + static_cast<std::ptrdiff_t>(span.end_sample));
    if (samples.size() < mel.fft_size) samples.resize(mel.fft_size, 0.0);
    const MelSpectrogram raw = mel_spectrogram(samples, mel);
    const MelSpectrogram norm = normalize_log_normalize(raw);
    write_npy(fs::path(out) / ("event_" + std::to_string(k) + "_raw.npy"), raw.values);
    write_npy(fs::path(out) / ("event_" + std::to_string(k) + ".npy"), norm.values);
  }
  std::cout << manifest.events.size() << "\n";
  return 0;
}

int RunColorize(const CommonOptions& opt, const std::string& input, const std::string& png,
                const std::string& npy) {
  const Matrix gray = read_npy_matrix(input);
  for (double v : gray.values()) {
    Require(v >= 0.0 && v <= 1.0, ErrorCode::kInvalidArgument,
            "input spectrogram must be normalised to [0, 1]");
  }
  MelSpectrogram spec;
  spec.values = gray;
  spec.config.total_bins = gray.rows();
  const FeatureMode mode = ParseFeatureMode(opt.mode);
  const ColorizedSpectrogram img =
      mode == FeatureMode::kColorized ? colorize(spec) : replicate_gray(spec);
  if (!png.empty()) export_png(img, png);
  if (!npy.empty()) {
    NpyArray arr;
    arr.shape = {3, img.bins(), img.frames()};
    for (const auto& ch : img.channels) arr.data.insert(arr.data.end(), ch.values().begin(), ch.values().end());
    write_npy(npy, arr);
  }
  return 0;
}

ExperimentConfig TrainingConfig(const CommonOptions& opt) {
  KeyValueConfig kv = LoadOptionalConfig(opt.config);
  if (opt.seed) kv.Set("seed", std::to_string(*opt.seed));
  return ExperimentConfigFromKv(kv);
}

int RunTrain(const CommonOptions& opt, const std::string& manifest_path, long fold,
             const std::string& out, const std::string& history) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const ExperimentConfig config = TrainingConfig(opt);
  const FeatureMode mode = ParseFeatureMode(opt.mode);
  Require(fold < static_cast<long>(manifest.k_folds), ErrorCode::kInvalidArgument,
          "fold index out of range");

  Checkpoint checkpoint;
  checkpoint.mode = mode;
  checkpoint.config = config;
  checkpoint.label_set = manifest.label_set;
  for (std::size_t k = 0; k < manifest.k_folds; ++k) {
    if (static_cast<long>(k) != fold) checkpoint.train_folds.push_back(k);
  }
  const std::size_t classes = manifest.label_set.size();
  std::vector<RecordingBag> bags;
  for (const auto& e : manifest.entries) {
    if (static_cast<long>(e.fold) == fold) continue;
    RecordingFeatures f = featurize_clip(load_wav(manifest.resolve(e)), config.features);
    f.label = e.label;
    bags.push_back(MakeRecordingBag(f, config.features.mel, mode, classes));
  }
  const TrainResult result = train(bags, config.model_config(classes), config.train);
  checkpoint.params = result.params;
  save_checkpoint(checkpoint, out);
  if (!history.empty()) {
    std::string csv = "epoch,loss\n";
    for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
      csv += std::to_string(i) + "," + nlohmann::json(result.epoch_loss[i]).dump() + "\n";
    }
    WriteText(history, csv);
  }
  return 0;
}

int RunEval(const std::string& checkpoint_path, const std::string& manifest_path, long fold,
            const std::string& out) {
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  const DatasetManifest manifest = load_manifest(manifest_path);
  Require(manifest.label_set == checkpoint.label_set, ErrorCode::kInvalidArgument,
          "manifest labels differ from the checkpoint's");
  std::vector<RecordingBag> bags;
  for (const auto& e : manifest.entries) {
    if (fold >= 0 && static_cast<long>(e.fold) != fold) continue;
    RecordingFeatures f = featurize_clip(load_wav(manifest.resolve(e)), checkpoint.config.features);
    f.label = e.label;
    bags.push_back(MakeRecordingBag(f, checkpoint.config.features.mel, checkpoint.mode,
                                    manifest.label_set.size()));
  }
  Require(!bags.empty(), ErrorCode::kEmptyDataset, "no recordings in the requested fold");
  ExperimentReport report;
  report.mode = checkpoint.mode;
  report.seed = checkpoint.config.train.seed;
  FoldMetrics m = evaluate_bags(bags, checkpoint.params, checkpoint.config.threshold);
  m.fold = fold >= 0 ? static_cast<std::size_t>(fold) : 0;
  report.folds.push_back(m);
  report.Summarize();
  WriteText(out + ".csv", report_to_csv(report));
  WriteText(out + ".json", report_to_json(report).dump(2) + "\n");
  return 0;
}

int RunAblate(const CommonOptions& opt, const std::string& manifest_path,
              const std::string& synth_config, std::size_t seeds, const std::string& out) {
  const ExperimentConfig config = TrainingConfig(opt);
  AblationResult result;
  if (!manifest_path.empty()) {
    result = run_ablation(load_manifest(manifest_path), config, Log);
  } else {
    KeyValueConfig kv = LoadOptionalConfig(synth_config);
    if (opt.seed) kv.Set("seed", std::to_string(*opt.seed));
    result = run_ablation(SynthSpecFromConfig(kv), seeds, opt.folds, config, Log);
  }
  std::string csv = "mode,seed,metric,fold,value\n";
  auto append = [&](const std::vector<ExperimentReport>& reports) {
    for (const auto& r : reports) {
      std::istringstream rows(report_to_csv(r));
      std::string row;
      std::getline(rows, row);  // header
      while (std::getline(rows, row)) {
        csv += ToString(r.mode) + "," + std::to_string(r.seed) + "," + row + "\n";
      }
    }
  };
  append(result.colorized);
  append(result.grayscale);
  WriteText(out + ".csv", csv);
  WriteText(out + ".json", ablation_to_json(result).dump(2) + "\n");
  std::cout << "colorized mean macro-F1 " << result.mean_colorized_f1 << ", grayscale "
            << result.mean_grayscale_f1 << ", Wilcoxon one-tailed p = "
            << result.wilcoxon.p_value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"birdcolor: frequency-colorized mel spectrograms with AutoPool MIL"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::uint64_t seed_value = 0;
  auto add_common = [&](CLI::App* sub, bool folds, bool mode) {
    sub->add_option("--config", opt.config, "key = value configuration file");
    sub->add_option("--seed", seed_value, "random seed")->each([&](const std::string&) {
      opt.seed = seed_value;
    });
    if (folds) sub->add_option("--folds", opt.folds, "number of cross-validation folds");
    if (mode) {
      sub->add_option("--mode", opt.mode, "colorized or grayscale")
          ->check(CLI::IsMember({"colorized", "grayscale"}));
    }
  };

  std::string out, input, manifest, png, npy, checkpoint, history, synth_config;
  long fold = -1;
  std::size_t seeds = 5;

  auto* synth = app.add_subcommand("synth", "generate a synthetic motif dataset and manifest");
  add_common(synth, true, false);
  synth->add_option("--out", out, "output directory")->required();

  auto* manifest_cmd = app.add_subcommand("manifest", "build a stratified K-fold manifest");
  add_common(manifest_cmd, true, false);
  manifest_cmd->add_option("--root", input, "directory of <label>/*.wav")->required();
  manifest_cmd->add_option("--out", out, "manifest JSON path")->required();

  auto* detect = app.add_subcommand("detect", "mine acoustic events from a WAV file");
  add_common(detect, false, false);
  detect->add_option("--input", input, "WAV file")->required();
  detect->add_option("--out", out, "events JSON (stdout when omitted)");

  auto* featurize = app.add_subcommand("featurize", "events JSON -> mel spectrogram NPY store");
  add_common(featurize, false, false);
  featurize->add_option("--events", input, "events JSON from 'detect'")->required();
  featurize->add_option("--out", out, "output directory")->required();

  auto* colorize_cmd = app.add_subcommand("colorize", "normalised spectrogram NPY -> RGB");
  add_common(colorize_cmd, false, true);
  colorize_cmd->add_option("--input", input, "2-D NPY with values in [0, 1]")->required();
  colorize_cmd->add_option("--png", png, "PNG output");
  colorize_cmd->add_option("--npy", npy, "3 x bins x frames NPY output");

  auto* train_cmd = app.add_subcommand("train", "train a model on manifest folds");
  add_common(train_cmd, false, true);
  train_cmd->add_option("--manifest", manifest, "manifest JSON")->required();
  train_cmd->add_option("--fold", fold, "held-out fold (default: train on all)");
  train_cmd->add_option("--out", out, "checkpoint path")->required();
  train_cmd->add_option("--history", history, "per-epoch loss CSV");

  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on one fold");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required();
  eval_cmd->add_option("--manifest", manifest, "manifest JSON")->required();
  eval_cmd->add_option("--fold", fold, "fold to evaluate (default: all entries)");
  eval_cmd->add_option("--out", out, "report path prefix (.csv and .json)")->required();

  auto* ablate = app.add_subcommand("ablate", "colorized vs grayscale with a Wilcoxon test");
  add_common(ablate, true, false);
  ablate->add_option("--manifest", manifest, "existing manifest (otherwise synthetic data)");
  ablate->add_option("--synth-config", synth_config, "synthetic dataset config");
  ablate->add_option("--seeds", seeds, "number of synthetic dataset seeds");
  ablate->add_option("--out", out, "report path prefix (.csv and .json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*synth) return RunSynth(opt, out);
    if (*manifest_cmd) return RunManifest(opt, input, out);
    if (*detect) return RunDetect(opt, input, out);
    if (*featurize) return RunFeaturize(opt, input, out);
    if (*colorize_cmd) return RunColorize(opt, input, png, npy);
    if (*train_cmd) return RunTrain(opt, manifest, fold, out, history);
    if (*eval_cmd) return RunEval(checkpoint, manifest, fold, out);
    if (*ablate) return RunAblate(opt, manifest, synth_config, seeds, out);
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", ErrorCodeName(e.code())}, {"message", e.what()}}.dump()
              << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << std::endl;
    return 2;
  }
  return 1;
}
