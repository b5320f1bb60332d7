// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJLAB__HARNESS_HPP_
#define TRAJLAB__HARNESS_HPP_

/// \file
/// End-to-end run drivers behind the command-line tool: dataset
/// generation, training, evaluation, the two ablation studies, raster
/// dumps and plot-data emission.  Every driver is deterministic for
/// identical inputs; artifacts (datasets, checkpoints, reports, tables)
/// are byte-stable across reruns.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/config_io.hpp"
#include "trajlab/train.hpp"

namespace trajlab
{

/// Everything one run needs: generator, raster, architecture, training
/// and metrics settings.  The architecture's backbone count, horizon and
/// raster size are derived from the other sections (see resolved()), so
/// the sections cannot drift apart.
struct RunConfig
{
  GenParams gen;
  int dataset_count = 256;
  RasterConfig raster;
  std::vector<LayerSpec> layers;  ///< empty means default_layer_specs()
  ArchConfig arch;
  TrainConfig train;
  MetricsConfig metrics;
  std::vector<int> k_list{5, 10};
  std::vector<int> fde_k_list{1};

  /// Copy with arch.backbones / horizon_steps / raster_size synced to
  /// the layer, generator and raster sections, empty layers replaced by
  /// the default stack, and everything validated (throws ConfigError).
  RunConfig resolved() const;
};

Json run_config_to_json(const RunConfig & cfg);
RunConfig run_config_from_json(const Json & j);

/// Reads and parses a run config file (IoError / ConfigError).
RunConfig load_run_config(const std::string & path);

/// Hash of the resolved config's canonical JSON, as a hex string.
std::string run_config_hash_hex(const RunConfig & cfg);

/// Record of one training run, sufficient to re-run evaluation without
/// any further flags.  Stored hashes are recomputable from the inputs.
struct RunManifest
{
  RunConfig config;
  std::string config_hash;     ///< run_config_hash_hex of config
  std::string dataset_path;    ///< relative to the manifest's directory
  std::string dataset_hash;    ///< file_hash_hex of the dataset file
  std::string checkpoint_path; ///< relative to the manifest's directory
  std::string eval_split = "validation";
  int best_epoch = 0;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
  std::vector<EpochLog> epochs;
  MetricsReport report;
};

Json manifest_to_json(const RunManifest & m);
RunManifest manifest_from_json(const Json & j);
void save_manifest(const std::string & path, const RunManifest & m);
RunManifest load_manifest(const std::string & path);  // IoError / ConfigError

/// Builds a dataset of `count` samples with per-sample seeds derived
/// from `seed`. Pure function of its arguments.
Dataset build_dataset(const GenParams & gen, int count, std::uint64_t seed);

/// Per-family sample counts and a final-angle histogram for a dataset.
struct DatasetSummary
{
  std::array<int, 4> family_counts{};     ///< order of kAllFamilies
  static constexpr int kBinCount = 13;    ///< 15 deg bins spanning [-97.5, 97.5)
  static constexpr double kBinWidthDeg = 15.0;
  std::array<int, kBinCount> angle_histogram{};  ///< outliers clamp to the end bins
  int sample_count = 0;

  int histogram_mode_bin() const;  ///< index of the fullest bin
  static double bin_low_deg(int bin);
};

DatasetSummary summarize_dataset(const Dataset & ds, const GenParams & gen);
std::string dataset_summary_text(const DatasetSummary & s);

/// gen-data driver: builds the dataset, writes `dataset.jsonl` and
/// `gen_summary.txt` under out_dir, and returns the summary text.
std::string run_gen_data(const RunConfig & cfg, std::uint64_t seed, const std::string & out_dir);

/// rasterize driver: writes one PPM per (sample, layer spec) named
/// `<sample_id>_<spec>.ppm` under out_dir. limit 0 renders every sample.
/// Returns the number of files written.
int run_rasterize(
  const Dataset & ds, const std::vector<LayerSpec> & specs, const RasterConfig & cfg,
  const std::string & out_dir, int limit = 0);

/// train driver: trains on the dataset at dataset_path, then evaluates
/// the selected checkpoint on the held-out validation split.  Writes
/// `<name>.ckpt`, `<name>_report.txt`, `<name>_report.csv`,
/// `<name>_epochs.csv` and `<name>_manifest.json` under out_dir and
/// returns the manifest.
RunManifest run_training(
  const RunConfig & cfg, const std::string & dataset_path, const std::string & out_dir,
  const std::string & name = "run");

/// eval driver: re-evaluates the manifest's checkpoint on the manifest's
/// dataset and split; verifies the recorded hashes first (ConfigError on
/// mismatch).  Writes nothing.
MetricsReport run_eval(const std::string & manifest_path);

enum class AblationStudy { kLoss, kLayers };

std::string ablation_study_name(AblationStudy s);
AblationStudy ablation_study_from_name(const std::string & name);  // throws ArgumentError

/// One ablation: a grid of run configs sharing a base config.  The loss
/// study crosses {mtp, angle_scaled} x {3, 12} modes; the layer study
/// uses the four layer subsets {2,3,4}, {1,2,4}, {1,2,3}, {1,2,3,4}.
struct AblationSpec
{
  AblationStudy study = AblationStudy::kLoss;
  RunConfig base;
  std::string out_dir;
  std::uint64_t dataset_seed = 7;  ///< shared across cells
};

struct AblationCell
{
  std::string label;  ///< table row label
  std::string slug;   ///< artifact directory name
  RunConfig config;
};

/// The grid for a study, in table row order. Configurations are
/// mutually distinct; throws ConfigError on an empty grid.
std::vector<AblationCell> ablation_cells(const AblationSpec & spec);

struct AblationRow
{
  std::string label;
  bool failed = false;
  std::string error;  ///< empty unless failed
  int error_exit_code = 0;
  MetricsReport report;
};

struct AblationOutcome
{
  std::vector<AblationRow> rows;
  bool any_failed = false;
  std::string table_text;  ///< aligned, human-readable
  std::string table_csv;   ///< machine-readable, same rows
};

/// Runs every cell (a failing cell marks its row failed and the run
/// continues), writes `ablation_<study>.txt` / `.csv` plus per-cell
/// artifacts under out_dir, and returns all rows plus both tables.
AblationOutcome run_ablation(const AblationSpec & spec);

std::string ablation_table_text(const std::vector<AblationRow> & rows);
std::string ablation_table_csv(const std::vector<AblationRow> & rows);

/// plot-data driver: for each manifest, emits per-sample structured
/// text (predicted mode polylines with confidences, ground truth, and
/// the drivable-mask outline) plus a loss-curve file.  sample_ids empty
/// selects the first max_samples ids of the manifest's eval split.
/// Returns the paths written.
std::vector<std::string> run_plot_data(
  const std::vector<std::string> & manifest_paths, const std::string & out_dir,
  const std::vector<std::string> & sample_ids = {}, int max_samples = 8);

}  // namespace trajlab

#endif  // TRAJLAB__HARNESS_HPP_
