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

#include "trajlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <utility>

#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"
#include "trajlab/scenegen.hpp"

namespace trajlab
{
namespace
{

namespace fs = std::filesystem;

void ensure_dir(const std::string & dir)
{
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error & e) {
    throw IoError("cannot create directory '" + dir + "': " + e.what());
  }
}

std::string join_path(const std::string & dir, const std::string & leaf)
{
  return (fs::path(dir) / leaf).string();
}

/// Resolves a manifest-stored path against the manifest's directory.
std::string resolve_path(const std::string & stored, const std::string & base_dir)
{
  fs::path p(stored);
  if (p.is_absolute()) {
    return p.string();
  }
  return (fs::path(base_dir) / p).lexically_normal().string();
}

/// Path to store in a manifest living in base_dir: relative if possible.
std::string relative_to(const std::string & target, const std::string & base_dir)
{
  std::error_code ec;
  const fs::path rel =
    fs::proximate(fs::absolute(fs::path(target)), fs::absolute(fs::path(base_dir)), ec);
  if (ec || rel.empty()) {
    return fs::absolute(fs::path(target)).string();
  }
  return rel.string();
}

double now_seconds()
{
  const auto t = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration<double>(t).count();
}

std::vector<std::string> split_on(const std::string & text, char sep)
{
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

Json parse_json(const std::string & text, const std::string & what)
{
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError("invalid JSON in " + what + ": " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::resolved() const
{
  RunConfig out = *this;
  if (out.layers.empty()) {
    out.layers = default_layer_specs();
  }
  for (const LayerSpec & spec : out.layers) {
    spec.validate();
  }
  out.arch.backbones = static_cast<int>(out.layers.size());
  out.arch.horizon_steps = out.gen.horizon_steps;
  out.arch.raster_size = out.raster.size_px;
  if (out.dataset_count <= 0) {
    throw ConfigError("dataset count must be positive");
  }
  if (out.k_list.empty() || out.fde_k_list.empty()) {
    throw ConfigError("k_list and fde_k_list must be nonempty");
  }
  for (int k : out.k_list) {
    if (k <= 0) {
      throw ConfigError("k_list entries must be positive");
    }
  }
  for (int k : out.fde_k_list) {
    if (k <= 0) {
      throw ConfigError("fde_k_list entries must be positive");
    }
  }
  out.gen.validate();
  out.raster.validate();
  out.arch.validate();
  out.train.validate();
  return out;
}

Json run_config_to_json(const RunConfig & cfg)
{
  Json j;
  j["dataset_count"] = cfg.dataset_count;
  j["gen"] = gen_to_json(cfg.gen);
  j["raster"] = raster_to_json(cfg.raster);
  j["layers"] = layer_specs_to_json(cfg.layers.empty() ? default_layer_specs() : cfg.layers);
  j["arch"] = arch_to_json(cfg.arch);
  j["train"] = train_to_json(cfg.train);
  j["metrics"] = metrics_config_to_json(cfg.metrics);
  j["k_list"] = cfg.k_list;
  j["fde_k_list"] = cfg.fde_k_list;
  return j;
}

RunConfig run_config_from_json(const Json & j)
{
  RunConfig cfg;
  try {
    if (j.contains("dataset_count")) {
      cfg.dataset_count = j.at("dataset_count").get<int>();
    }
    if (j.contains("gen")) {
      cfg.gen = gen_from_json(j.at("gen"));
    }
    if (j.contains("raster")) {
      cfg.raster = raster_from_json(j.at("raster"));
    }
    if (j.contains("layers")) {
      cfg.layers = layer_specs_from_json(j.at("layers"));
    }
    if (j.contains("arch")) {
      cfg.arch = arch_from_json(j.at("arch"));
    }
    if (j.contains("train")) {
      cfg.train = train_from_json(j.at("train"));
    }
    if (j.contains("metrics")) {
      cfg.metrics = metrics_config_from_json(j.at("metrics"));
    }
    if (j.contains("k_list")) {
      cfg.k_list = j.at("k_list").get<std::vector<int>>();
    }
    if (j.contains("fde_k_list")) {
      cfg.fde_k_list = j.at("fde_k_list").get<std::vector<int>>();
    }
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string & path)
{
  return run_config_from_json(parse_json(read_file(path), "config file '" + path + "'"));
}

std::string run_config_hash_hex(const RunConfig & cfg)
{
  const std::uint64_t h = json_hash(run_config_to_json(cfg.resolved()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json manifest_to_json(const RunManifest & m)
{
  Json j;
  j["format"] = "trajlab-manifest-v1";
  j["config"] = run_config_to_json(m.config);
  j["config_hash"] = m.config_hash;
  j["dataset_path"] = m.dataset_path;
  j["dataset_hash"] = m.dataset_hash;
  j["checkpoint_path"] = m.checkpoint_path;
  j["eval_split"] = m.eval_split;
  j["best_epoch"] = m.best_epoch;
  j["train_seconds"] = m.train_seconds;
  j["eval_seconds"] = m.eval_seconds;
  Json epochs = Json::array();
  for (const EpochLog & e : m.epochs) {
    Json row;
    row["epoch"] = e.epoch;
    row["train_loss"] = e.train_loss;
    row["val_loss"] = e.val_loss;
    row["wall_seconds"] = e.wall_seconds;
    epochs.push_back(std::move(row));
  }
  j["epochs"] = std::move(epochs);
  j["report"] = metrics_report_to_json(m.report);
  return j;
}

RunManifest manifest_from_json(const Json & j)
{
  RunManifest m;
  try {
    for (const char * key : {"config", "dataset_path", "checkpoint_path", "report"}) {
      if (!j.contains(key)) {
        throw ConfigError(std::string("manifest missing required key '") + key + "'");
      }
    }
    m.config = run_config_from_json(j.at("config"));
    if (j.contains("config_hash")) {
      m.config_hash = j.at("config_hash").get<std::string>();
    }
    m.dataset_path = j.at("dataset_path").get<std::string>();
    if (j.contains("dataset_hash")) {
      m.dataset_hash = j.at("dataset_hash").get<std::string>();
    }
    m.checkpoint_path = j.at("checkpoint_path").get<std::string>();
    if (j.contains("eval_split")) {
      m.eval_split = j.at("eval_split").get<std::string>();
    }
    if (j.contains("best_epoch")) {
      m.best_epoch = j.at("best_epoch").get<int>();
    }
    if (j.contains("train_seconds")) {
      m.train_seconds = j.at("train_seconds").get<double>();
    }
    if (j.contains("eval_seconds")) {
      m.eval_seconds = j.at("eval_seconds").get<double>();
    }
    if (j.contains("epochs")) {
      for (const Json & row : j.at("epochs")) {
        EpochLog e;
        e.epoch = row.at("epoch").get<int>();
        e.train_loss = row.at("train_loss").get<double>();
        e.val_loss = row.at("val_loss").get<double>();
        e.wall_seconds = row.value("wall_seconds", 0.0);
        m.epochs.push_back(e);
      }
    }
    m.report = metrics_report_from_json(j.at("report"));
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

void save_manifest(const std::string & path, const RunManifest & m)
{
  write_file(path, manifest_to_json(m).dump(2) + "\n");
}

RunManifest load_manifest(const std::string & path)
{
  return manifest_from_json(parse_json(read_file(path), "manifest '" + path + "'"));
}

Dataset build_dataset(const GenParams & gen, int count, std::uint64_t seed)
{
  gen.validate();
  if (count <= 0) {
    throw ConfigError("dataset count must be positive");
  }
  Dataset ds;
  ds.horizon_steps = gen.horizon_steps;
  ds.frequency_hz = gen.frequency_hz;
  ds.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ds.samples.push_back(generate_scene(derive_seed(seed, static_cast<std::uint64_t>(i)), gen));
  }
  return ds;
}

int DatasetSummary::histogram_mode_bin() const
{
  return static_cast<int>(std::distance(
    angle_histogram.begin(), std::max_element(angle_histogram.begin(), angle_histogram.end())));
}

double DatasetSummary::bin_low_deg(int bin)
{
  return (bin - kBinCount / 2) * kBinWidthDeg - kBinWidthDeg / 2.0;
}

DatasetSummary summarize_dataset(const Dataset & ds, const GenParams & gen)
{
  DatasetSummary s;
  s.sample_count = static_cast<int>(ds.samples.size());
  for (const Sample & sample : ds.samples) {
    const SceneFamily family = sampled_family(sample.rng_seed, gen);
    s.family_counts[static_cast<std::size_t>(family)]++;
    const double angle = gt_final_angle_deg(sample.gt);
    const int raw = static_cast<int>(
      std::floor((angle - DatasetSummary::bin_low_deg(0)) / DatasetSummary::kBinWidthDeg));
    const int bin = std::clamp(raw, 0, DatasetSummary::kBinCount - 1);
    s.angle_histogram[static_cast<std::size_t>(bin)]++;
  }
  return s;
}

std::string dataset_summary_text(const DatasetSummary & s)
{
  std::ostringstream out;
  out << "samples: " << s.sample_count << "\n";
  out << "family counts:\n";
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    char line[64];
    std::snprintf(
      line, sizeof(line), "  %-9s %6d\n", family_name(kAllFamilies[i]).c_str(),
      s.family_counts[i]);
    out << line;
  }
  int max_count = 1;
  for (int c : s.angle_histogram) {
    max_count = std::max(max_count, c);
  }
  out << "final-angle histogram (deg):\n";
  for (int b = 0; b < DatasetSummary::kBinCount; ++b) {
    const double lo = DatasetSummary::bin_low_deg(b);
    const double hi = lo + DatasetSummary::kBinWidthDeg;
    const int count = s.angle_histogram[static_cast<std::size_t>(b)];
    const int bar = count == 0 ? 0 : std::max(1, (40 * count) / max_count);
    char line[128];
    std::snprintf(line, sizeof(line), "  [%7.1f, %7.1f) %6d ", lo, hi, count);
    out << line << std::string(static_cast<std::size_t>(bar), '#') << "\n";
  }
  return out.str();
}

std::string run_gen_data(const RunConfig & cfg, std::uint64_t seed, const std::string & out_dir)
{
  const RunConfig rc = cfg.resolved();
  ensure_dir(out_dir);
  const Dataset ds = build_dataset(rc.gen, rc.dataset_count, seed);
  write_dataset(join_path(out_dir, "dataset.jsonl"), ds);
  const std::string text = dataset_summary_text(summarize_dataset(ds, rc.gen));
  write_file(join_path(out_dir, "gen_summary.txt"), text);
  return text;
}

int run_rasterize(
  const Dataset & ds, const std::vector<LayerSpec> & specs, const RasterConfig & cfg,
  const std::string & out_dir, int limit)
{
  if (specs.empty()) {
    throw ConfigError("at least one layer spec required");
  }
  ensure_dir(out_dir);
  int written = 0;
  const std::size_t count = limit > 0
    ? std::min(ds.samples.size(), static_cast<std::size_t>(limit))
    : ds.samples.size();
  for (std::size_t i = 0; i < count; ++i) {
    const Sample & sample = ds.samples[i];
    for (const LayerSpec & spec : specs) {
      const Grid grid = rasterize_layer(sample.scene, spec, cfg);
      write_ppm(join_path(out_dir, sample.sample_id + "_" + spec.name() + ".ppm"), grid);
      ++written;
    }
  }
  return written;
}

namespace
{

/// Prepared dataset split into train/eval index sets, masks included.
struct PreparedRun
{
  std::vector<TrainSample> train_set;
  std::vector<TrainSample> eval_set;
  std::vector<Mask> eval_masks;
};

PreparedRun prepare_run(const Dataset & ds, const RunConfig & rc, const std::string & eval_split)
{
  if (ds.horizon_steps != rc.gen.horizon_steps) {
    throw ConfigError(
      "dataset horizon " + std::to_string(ds.horizon_steps) + " does not match configured " +
      std::to_string(rc.gen.horizon_steps));
  }
  const std::vector<TrainSample> samples = prepare_samples(ds, rc.layers, rc.raster);
  const std::vector<Mask> masks = prepare_masks(ds, rc.raster);

  PreparedRun run;
  std::vector<std::size_t> eval_idx;
  if (eval_split == "all") {
    run.train_set = samples;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      eval_idx.push_back(i);
    }
  } else if (eval_split == "validation") {
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (in_validation_split(samples[i].sample_id, rc.train.val_fraction)) {
        eval_idx.push_back(i);
      } else {
        train_idx.push_back(i);
      }
    }
    if (train_idx.empty()) {
      train_idx.swap(eval_idx);  // degenerate split: keep everything trainable
    }
    if (eval_idx.empty()) {
      eval_idx = train_idx;  // tiny sets: evaluate on what we train on
    }
    for (std::size_t i : train_idx) {
      run.train_set.push_back(samples[i]);
    }
  } else {
    throw ConfigError("unknown eval split '" + eval_split + "'");
  }
  for (std::size_t i : eval_idx) {
    run.eval_set.push_back(samples[i]);
    run.eval_masks.push_back(masks[i]);
  }
  return run;
}

std::string epochs_csv(const std::vector<EpochLog> & epochs)
{
  std::string text = "epoch,train_loss,val_loss\n";
  for (const EpochLog & e : epochs) {
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_loss);
    text += line;
  }
  return text;
}

}  // namespace

RunManifest run_training(
  const RunConfig & cfg, const std::string & dataset_path, const std::string & out_dir,
  const std::string & name)
{
  const RunConfig rc = cfg.resolved();
  ensure_dir(out_dir);
  const Dataset ds = read_dataset(dataset_path);
  PreparedRun run = prepare_run(ds, rc, "validation");

  Model model = Model::init(rc.arch, rc.train.seed);
  const double t0 = now_seconds();
  TrainResult result = train(model, rc.train, run.train_set, run.eval_set);
  const double t1 = now_seconds();
  result.checkpoint.config_hash = json_hash(run_config_to_json(rc));
  const std::string ckpt_leaf = name + ".ckpt";
  save_checkpoint(join_path(out_dir, ckpt_leaf), result.checkpoint);

  const double t2 = now_seconds();
  const MetricsReport report = evaluate(
    result.checkpoint.model, run.eval_set, run.eval_masks, rc.raster, rc.k_list, rc.fde_k_list,
    rc.metrics);
  const double t3 = now_seconds();

  RunManifest m;
  m.config = rc;
  m.config_hash = run_config_hash_hex(rc);
  m.dataset_path = relative_to(dataset_path, out_dir);
  m.dataset_hash = file_hash_hex(dataset_path);
  m.checkpoint_path = ckpt_leaf;
  m.best_epoch = result.best_epoch;
  m.train_seconds = t1 - t0;
  m.eval_seconds = t3 - t2;
  m.epochs = result.epochs;
  m.report = report;

  write_file(join_path(out_dir, name + "_report.txt"), metrics_to_text(report));
  write_file(
    join_path(out_dir, name + "_report.csv"),
    metrics_table_header(',') + "\n" + metrics_table_row(report, ',') + "\n");
  write_file(join_path(out_dir, name + "_epochs.csv"), epochs_csv(result.epochs));
  save_manifest(join_path(out_dir, name + "_manifest.json"), m);
  return m;
}

MetricsReport run_eval(const std::string & manifest_path)
{
  const RunManifest m = load_manifest(manifest_path);
  const std::string base_dir = fs::path(manifest_path).parent_path().string();
  const RunConfig rc = m.config.resolved();

  if (!m.config_hash.empty() && run_config_hash_hex(rc) != m.config_hash) {
    throw ConfigError("manifest config hash does not match its config section");
  }
  const std::string dataset_path = resolve_path(m.dataset_path, base_dir);
  if (!m.dataset_hash.empty() && file_hash_hex(dataset_path) != m.dataset_hash) {
    throw ConfigError("dataset at '" + dataset_path + "' does not match the manifest hash");
  }
  const Checkpoint ckpt = load_checkpoint(resolve_path(m.checkpoint_path, base_dir));
  if (ckpt.config_hash != json_hash(run_config_to_json(rc))) {
    throw ConfigError("checkpoint was trained under a different config");
  }

  const Dataset ds = read_dataset(dataset_path);
  const PreparedRun run = prepare_run(ds, rc, m.eval_split);
  return evaluate(
    ckpt.model, run.eval_set, run.eval_masks, rc.raster, rc.k_list, rc.fde_k_list, rc.metrics);
}

std::string ablation_study_name(AblationStudy s)
{
  return s == AblationStudy::kLoss ? "loss" : "layers";
}

AblationStudy ablation_study_from_name(const std::string & name)
{
  if (name == "loss") {
    return AblationStudy::kLoss;
  }
  if (name == "layers") {
    return AblationStudy::kLayers;
  }
  throw ArgumentError("unknown ablation study: " + name);
}

std::vector<AblationCell> ablation_cells(const AblationSpec & spec)
{
  std::vector<AblationCell> cells;
  RunConfig base = spec.base.resolved();
  base.k_list = {5, 10};    // the table schema needs exactly these
  base.fde_k_list = {1};

  if (spec.study == AblationStudy::kLoss) {
    const std::array<std::pair<LossVariant, int>, 4> grid = {
      std::pair<LossVariant, int>{LossVariant::kAngleScaled, 12},
      std::pair<LossVariant, int>{LossVariant::kMtp, 12},
      std::pair<LossVariant, int>{LossVariant::kAngleScaled, 3},
      std::pair<LossVariant, int>{LossVariant::kMtp, 3},
    };
    for (const auto & [variant, modes] : grid) {
      AblationCell cell;
      const bool scaled = variant == LossVariant::kAngleScaled;
      cell.label =
        std::string(scaled ? "Angle scaled loss " : "MTP loss ") + std::to_string(modes) +
        " modes";
      cell.slug = std::string(scaled ? "angle_scaled_" : "mtp_") + std::to_string(modes);
      cell.config = base;
      cell.config.train.loss_variant = variant;
      cell.config.arch.modes = modes;
      cells.push_back(std::move(cell));
    }
  } else {
    const std::array<std::vector<int>, 4> grid = {
      std::vector<int>{2, 3, 4},
      std::vector<int>{1, 2, 4},
      std::vector<int>{1, 2, 3},
      std::vector<int>{1, 2, 3, 4},
    };
    for (const std::vector<int> & codes : grid) {
      AblationCell cell;
      std::string label;
      std::string slug = "layers";
      for (std::size_t i = 0; i < codes.size(); ++i) {
        label += (i > 0 ? ", " : "") + std::to_string(codes[i]);
        slug += "_" + std::to_string(codes[i]);
      }
      cell.label = label;
      cell.slug = slug;
      cell.config = base;
      cell.config.layers = layer_specs_from_codes(codes);
      cell.config = cell.config.resolved();  // re-sync backbone count
      cells.push_back(std::move(cell));
    }
  }

  std::set<std::string> hashes;
  for (const AblationCell & cell : cells) {
    hashes.insert(run_config_hash_hex(cell.config));
  }
  if (cells.empty() || hashes.size() != cells.size()) {
    throw ConfigError("ablation grid must be nonempty with mutually distinct configurations");
  }
  return cells;
}

std::string ablation_table_csv(const std::vector<AblationRow> & rows)
{
  std::string text = "method," + metrics_table_header(',') + "\n";
  const int columns = static_cast<int>(split_on(metrics_table_header(','), ',').size());
  for (const AblationRow & row : rows) {
    text += "\"" + row.label + "\",";
    if (row.failed) {
      for (int c = 0; c < columns; ++c) {
        text += c > 0 ? ",failed" : "failed";
      }
    } else {
      text += metrics_table_row(row.report, ',');
    }
    text += "\n";
  }
  return text;
}

std::string ablation_table_text(const std::vector<AblationRow> & rows)
{
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = split_on(metrics_table_header(','), ',');
  header.insert(header.begin(), "method");
  grid.push_back(header);
  for (const AblationRow & row : rows) {
    std::vector<std::string> cells;
    if (row.failed) {
      cells.assign(header.size() - 1, "failed");
    } else {
      cells = split_on(metrics_table_row(row.report, ','), ',');
    }
    cells.insert(cells.begin(), row.label);
    grid.push_back(std::move(cells));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto & cells : grid) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      widths[c] = std::max(widths[c], cells[c].size());
    }
  }
  std::string text;
  for (const auto & cells : grid) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string & cell = cells[c];
      if (c == 0) {  // label column left-aligned, metrics right-aligned
        text += cell + std::string(widths[c] - cell.size(), ' ');
      } else {
        text += "  " + std::string(widths[c] - cell.size(), ' ') + cell;
      }
    }
    text += "\n";
  }
  return text;
}

AblationOutcome run_ablation(const AblationSpec & spec)
{
  const std::vector<AblationCell> cells = ablation_cells(spec);
  ensure_dir(spec.out_dir);

  const RunConfig base = spec.base.resolved();
  const Dataset ds = build_dataset(base.gen, base.dataset_count, spec.dataset_seed);
  const std::string dataset_path = join_path(spec.out_dir, "ablation_dataset.jsonl");
  write_dataset(dataset_path, ds);

  AblationOutcome outcome;
  for (const AblationCell & cell : cells) {
    AblationRow row;
    row.label = cell.label;
    try {
      const RunManifest m =
        run_training(cell.config, dataset_path, join_path(spec.out_dir, cell.slug), cell.slug);
      row.report = m.report;
    } catch (const std::exception & e) {
      row.failed = true;
      row.error = e.what();
      row.error_exit_code = exit_code_for(e);
      outcome.any_failed = true;
    }
    outcome.rows.push_back(std::move(row));
  }

  outcome.table_text = ablation_table_text(outcome.rows);
  outcome.table_csv = ablation_table_csv(outcome.rows);
  const std::string stem = "ablation_" + ablation_study_name(spec.study);
  write_file(join_path(spec.out_dir, stem + ".txt"), outcome.table_text);
  write_file(join_path(spec.out_dir, stem + ".csv"), outcome.table_csv);
  return outcome;
}

namespace
{

/// Boundary pixels of the drivable mask, as world-frame pixel centers in
/// row-major order.
std::vector<Vec2> mask_outline(const Mask & mask, const RasterConfig & cfg)
{
  std::vector<Vec2> points;
  const auto inside = [&mask](int c, int r) {
    return c >= 0 && r >= 0 && c < mask.size && r < mask.size && mask.at(c, r);
  };
  for (int r = 0; r < mask.size; ++r) {
    for (int c = 0; c < mask.size; ++c) {
      if (!mask.at(c, r)) {
        continue;
      }
      if (!inside(c - 1, r) || !inside(c + 1, r) || !inside(c, r - 1) || !inside(c, r + 1)) {
        points.push_back(cfg.pixel_center_world(c, r));
      }
    }
  }
  return points;
}

void append_points(std::string & text, const std::vector<Vec2> & points)
{
  for (const Vec2 & p : points) {
    char line[64];
    std::snprintf(line, sizeof(line), "%.9g %.9g\n", p.x, p.y);
    text += line;
  }
  text += "end\n";
}

std::string manifest_stem(const std::string & manifest_path)
{
  std::string stem = fs::path(manifest_path).stem().string();
  const std::string suffix = "_manifest";
  if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
    stem.resize(stem.size() - suffix.size());
  }
  return stem;
}

}  // namespace

std::vector<std::string> run_plot_data(
  const std::vector<std::string> & manifest_paths, const std::string & out_dir,
  const std::vector<std::string> & sample_ids, int max_samples)
{
  if (manifest_paths.empty()) {
    throw ArgumentError("at least one manifest is required");
  }
  if (max_samples <= 0) {
    throw ArgumentError("max_samples must be positive");
  }
  ensure_dir(out_dir);

  std::vector<std::string> written;
  for (const std::string & manifest_path : manifest_paths) {
    const RunManifest m = load_manifest(manifest_path);
    const std::string base_dir = fs::path(manifest_path).parent_path().string();
    const RunConfig rc = m.config.resolved();
    const Dataset ds = read_dataset(resolve_path(m.dataset_path, base_dir));
    const Checkpoint ckpt = load_checkpoint(resolve_path(m.checkpoint_path, base_dir));
    const PreparedRun run = prepare_run(ds, rc, m.eval_split);

    std::vector<std::size_t> chosen;
    if (sample_ids.empty()) {
      for (std::size_t i = 0; i < run.eval_set.size() && i < static_cast<std::size_t>(max_samples);
           ++i) {
        chosen.push_back(i);
      }
    } else {
      for (const std::string & id : sample_ids) {
        bool found = false;
        for (std::size_t i = 0; i < run.eval_set.size(); ++i) {
          if (run.eval_set[i].sample_id == id) {
            chosen.push_back(i);
            found = true;
            break;
          }
        }
        if (!found) {
          throw ArgumentError("sample id '" + id + "' is not in the manifest's eval split");
        }
      }
    }

    for (std::size_t i : chosen) {
      const TrainSample & sample = run.eval_set[i];
      const Prediction pred = predict(ckpt.model, sample);
      std::string text = "sample " + sample.sample_id + "\n";
      text += "gt " + std::to_string(sample.gt.size()) + "\n";
      append_points(text, sample.gt);
      for (std::size_t mode = 0; mode < pred.trajectories.size(); ++mode) {
        char head[64];
        std::snprintf(
          head, sizeof(head), "mode %zu confidence %.9g\n", mode, pred.confidences[mode]);
        text += head;
        append_points(text, pred.trajectories[mode]);
      }
      const std::vector<Vec2> outline = mask_outline(run.eval_masks[i], rc.raster);
      text += "mask_outline " + std::to_string(outline.size()) + "\n";
      append_points(text, outline);
      const std::string path = join_path(out_dir, sample.sample_id + "_trajectories.txt");
      write_file(path, text);
      written.push_back(path);
    }

    std::string curve = "epoch train_loss val_loss\n";
    for (const EpochLog & e : m.epochs) {
      char line[96];
      std::snprintf(line, sizeof(line), "%d %.17g %.17g\n", e.epoch, e.train_loss, e.val_loss);
      curve += line;
    }
    const std::string curve_path =
      join_path(out_dir, manifest_stem(manifest_path) + "_loss_curve.txt");
    write_file(curve_path, curve);
    written.push_back(curve_path);
  }
  return written;
}

}  // namespace trajlab
