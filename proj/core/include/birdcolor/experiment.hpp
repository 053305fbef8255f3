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

#ifndef BIRDCOLOR_EXPERIMENT_HPP_
#define BIRDCOLOR_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "birdcolor/config.hpp"
#include "birdcolor/dataset.hpp"
#include "birdcolor/events.hpp"
#include "birdcolor/metrics.hpp"
#include "birdcolor/model.hpp"
#include "birdcolor/spectrogram.hpp"
#include "birdcolor/synth.hpp"
#include "birdcolor/train.hpp"

namespace birdcolor {

enum class FeatureMode { kColorized, kGrayscale };

std::string ToString(FeatureMode mode);
FeatureMode ParseFeatureMode(const std::string& s);

// Event windows -> model input images. The default is a desk-scale
// configuration (36 mel bins, 40 pooled frames per 5 s window).
struct FeatureConfig {
  MelConfig mel{300.0, 16000.0, 36, 2048, 1024, kCanonicalSampleRate};
  std::size_t frame_pool = 4;
  std::size_t frames = 40;
  EventConfig events;

  void Validate() const;
};

// Normalised gray spectrograms of the mined events of one recording.
struct RecordingFeatures {
  std::vector<Matrix> instances;
  std::vector<EventSpan> spans;
  std::size_t label = 0;
};

// Resample to the mel rate, mine events, and turn each event into a
// [total_bins x frames] normalised log-mel image. Events shorter than the
// window (recording shorter than the window) are zero-padded. A recording
// without any event above the mean energy contributes its first window.
RecordingFeatures featurize_clip(const AudioClip& clip, const FeatureConfig& config);

// Gray spectrogram -> 3-channel model input for the given mode.
Image MakeImage(const Matrix& gray, const MelConfig& mel, FeatureMode mode);

RecordingBag MakeRecordingBag(const RecordingFeatures& features, const MelConfig& mel,
                              FeatureMode mode, std::size_t num_classes);

struct ExperimentConfig {
  TrainConfig train;
  FeatureConfig features;
  std::array<std::size_t, 3> widths = {8, 16, 32};
  double threshold = 0.5;

  ModelConfig model_config(std::size_t num_classes) const;
};

// Keys: lr_init, lr_final, batch_size, epochs, weight_decay, seed,
// f_min, f_max, mel_bins, fft_size, hop, frame_pool, frames, widths
// ("8,16,32"), threshold, max_events, window_seconds, max_overlap.
ExperimentConfig ExperimentConfigFromKv(const KeyValueConfig& kv);

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  double macro_f1 = 0.0;
  double roc_auc = 0.0;
  double cmap = 0.0;
};

struct ExperimentReport {
  FeatureMode mode = FeatureMode::kColorized;
  std::uint64_t seed = 0;
  std::vector<FoldMetrics> folds;
  double mean_f1 = 0.0;
  double mean_roc_auc = 0.0;
  double mean_cmap = 0.0;

  void Summarize();
};

FoldMetrics evaluate_bags(std::span<const RecordingBag> bags, const ModelParams& params,
                          double threshold);

using ProgressFn = std::function<void(const std::string&)>;

// K-fold cross-validation on pre-computed features: each fold trains on the
// other K - 1 folds and is scored on its own recordings. The training seed
// of fold k is derived from config.train.seed and k only, so colorized and
// grayscale runs of the same fold start from identical weights. Throws
// kEmptyDataset for a fold without validation recordings.
ExperimentReport run_experiment(std::span<const RecordingFeatures> features,
                                std::span<const std::size_t> folds, std::size_t k_folds,
                                std::size_t num_classes, FeatureMode mode,
                                const ExperimentConfig& config, const ProgressFn& progress = {});

// Loads every manifest entry, featurises it and runs run_experiment.
std::vector<RecordingFeatures> featurize_manifest(const DatasetManifest& manifest,
                                                  const FeatureConfig& config);
ExperimentReport run_experiment(const DatasetManifest& manifest, FeatureMode mode,
                                const ExperimentConfig& config, const ProgressFn& progress = {});

struct AblationResult {
  std::vector<ExperimentReport> colorized;  // one per seed
  std::vector<ExperimentReport> grayscale;
  std::vector<double> paired_colorized_f1;  // per (seed, fold)
  std::vector<double> paired_grayscale_f1;
  WilcoxonResult wilcoxon;
  double mean_colorized_f1 = 0.0;
  double mean_grayscale_f1 = 0.0;
};

// Colorized vs grayscale on synthetic data: for seed s the dataset uses
// synth.seed + s, folds use the same seed, and training uses
// config.train.seed + s. Per-fold macro-F1 pairs from all seeds feed a
// one-tailed Wilcoxon signed-rank test.
AblationResult run_ablation(const SynthSpec& synth, std::size_t n_seeds, std::size_t k_folds,
                            const ExperimentConfig& config, const ProgressFn& progress = {});

// Same comparison on an existing manifest (one seed).
AblationResult run_ablation(const DatasetManifest& manifest, const ExperimentConfig& config,
                            const ProgressFn& progress = {});

// CSV rows "metric,fold,value" (fold "mean" for the summary rows).
std::string report_to_csv(const ExperimentReport& report);
nlohmann::json report_to_json(const ExperimentReport& report);
nlohmann::json ablation_to_json(const AblationResult& result);

struct Checkpoint {
  ModelParams params;
  FeatureMode mode = FeatureMode::kColorized;
  ExperimentConfig config;
  std::vector<std::string> label_set;
  std::vector<std::size_t> train_folds;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace birdcolor

#endif  // BIRDCOLOR_EXPERIMENT_HPP_
