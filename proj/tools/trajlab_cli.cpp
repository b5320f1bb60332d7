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
//
// Command-line entry point. Exit codes: 0 success, 1 usage or
// configuration, 2 I/O, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "trajlab/error.hpp"
#include "trajlab/harness.hpp"
#include "trajlab/scenegen.hpp"

namespace
{

using namespace trajlab;

struct CliState
{
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = ".";
  int exit_code = 0;
};

RunConfig base_config(const CliState & st)
{
  if (st.config_path.empty()) {
    return RunConfig{};
  }
  return load_run_config(st.config_path);
}

std::array<double, 4> weights_for_families(const std::vector<std::string> & names)
{
  std::array<double, 4> weights{};
  for (const std::string & name : names) {
    weights[static_cast<std::size_t>(family_from_name(name))] = 1.0;
  }
  return weights;
}

}  // namespace

int main(int argc, char ** argv)
{
  CliState st;
  CLI::App app{"trajlab: multi-mode trajectory prediction laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", st.seed, "base RNG seed (datasets, training, ablation cells)");
  app.add_option("--config", st.config_path, "run config JSON file");
  app.add_option("--out", st.out_dir, "output directory");

  // gen-data
  auto * gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  int gen_count = -1;
  std::vector<std::string> gen_families;
  gen->add_option("--count", gen_count, "number of samples");
  gen->add_option("--families", gen_families, "restrict to these scene families")
    ->delimiter(',');
  gen->callback([&]() {
    RunConfig cfg = base_config(st);
    if (gen->count("--count") > 0) {
      cfg.dataset_count = gen_count;
    }
    if (!gen_families.empty()) {
      cfg.gen.family_weights = weights_for_families(gen_families);
    }
    std::fputs(run_gen_data(cfg, st.seed, st.out_dir).c_str(), stdout);
    std::printf("wrote %s/dataset.jsonl\n", st.out_dir.c_str());
  });

  // rasterize
  auto * ras = app.add_subcommand("rasterize", "dump PPM images for dataset samples");
  std::string ras_dataset;
  std::vector<int> ras_layers;
  int ras_limit = 0;
  ras->add_option("--dataset", ras_dataset, "dataset file")->required();
  ras->add_option("--layers", ras_layers, "layer codebook indices (1-4)")->delimiter(',');
  ras->add_option("--limit", ras_limit, "render at most this many samples (0 = all)");
  ras->callback([&]() {
    RunConfig cfg = base_config(st).resolved();
    const std::vector<LayerSpec> specs =
      ras_layers.empty() ? cfg.layers : layer_specs_from_codes(ras_layers);
    const int n = run_rasterize(read_dataset(ras_dataset), specs, cfg.raster, st.out_dir, ras_limit);
    std::printf("wrote %d ppm files to %s\n", n, st.out_dir.c_str());
  });

  // train
  auto * tr = app.add_subcommand("train", "train a model and write a run manifest");
  std::string tr_dataset;
  std::string tr_name = "run";
  int tr_modes = 0;
  int tr_epochs = 0;
  int tr_batch = 0;
  double tr_lr = 0.0;
  std::string tr_loss;
  std::vector<int> tr_layers;
  tr->add_option("--dataset", tr_dataset, "dataset file")->required();
  tr->add_option("--name", tr_name, "artifact base name");
  tr->add_option("--modes", tr_modes, "fused output modes M");
  tr->add_option("--epochs", tr_epochs, "training epochs");
  tr->add_option("--batch", tr_batch, "batch size");
  tr->add_option("--lr", tr_lr, "learning rate");
  tr->add_option("--loss", tr_loss, "loss variant: mtp or angle_scaled");
  tr->add_option("--layers", tr_layers, "layer codebook indices (1-4)")->delimiter(',');
  tr->callback([&]() {
    RunConfig cfg = base_config(st);
    if (tr->count("--modes") > 0) {
      cfg.arch.modes = tr_modes;
    }
    if (tr->count("--epochs") > 0) {
      cfg.train.epochs = tr_epochs;
    }
    if (tr->count("--batch") > 0) {
      cfg.train.batch_size = tr_batch;
    }
    if (tr->count("--lr") > 0) {
      cfg.train.learning_rate = tr_lr;
    }
    if (tr->count("--loss") > 0) {
      cfg.train.loss_variant = loss_variant_from_name(tr_loss);
    }
    if (!tr_layers.empty()) {
      cfg.layers = layer_specs_from_codes(tr_layers);
    }
    if (app.count("--seed") > 0) {
      cfg.train.seed = st.seed;
    }
    const RunManifest m = run_training(cfg, tr_dataset, st.out_dir, tr_name);
    std::fputs(metrics_to_text(m.report).c_str(), stdout);
    std::printf("manifest: %s/%s_manifest.json\n", st.out_dir.c_str(), tr_name.c_str());
  });

  // eval
  auto * ev = app.add_subcommand("eval", "re-evaluate a run manifest's checkpoint");
  std::string ev_manifest;
  ev->add_option("--manifest", ev_manifest, "run manifest file")->required();
  ev->callback([&]() {
    const MetricsReport report = run_eval(ev_manifest);
    std::fputs(metrics_to_text(report).c_str(), stdout);
  });

  // ablate
  auto * ab = app.add_subcommand("ablate", "run a loss or raster-layer ablation study");
  std::string ab_study;
  int ab_count = -1;
  int ab_epochs = 0;
  ab->add_option("--study", ab_study, "study: loss or layers")->required();
  ab->add_option("--count", ab_count, "dataset sample count");
  ab->add_option("--epochs", ab_epochs, "training epochs per cell");
  ab->callback([&]() {
    AblationSpec spec;
    spec.study = ablation_study_from_name(ab_study);
    spec.base = base_config(st);
    if (ab->count("--count") > 0) {
      spec.base.dataset_count = ab_count;
    }
    if (ab->count("--epochs") > 0) {
      spec.base.train.epochs = ab_epochs;
    }
    spec.out_dir = st.out_dir;
    spec.dataset_seed = st.seed;
    const AblationOutcome outcome = run_ablation(spec);
    std::fputs(outcome.table_text.c_str(), stdout);
    if (outcome.any_failed) {
      for (const AblationRow & row : outcome.rows) {
        if (row.failed) {
          std::fprintf(stderr, "cell '%s' failed: %s\n", row.label.c_str(), row.error.c_str());
          if (st.exit_code == 0) {
            st.exit_code = row.error_exit_code;
          }
        }
      }
    }
  });

  // plot-data
  auto * pl = app.add_subcommand("plot-data", "emit plot-ready trajectories and loss curves");
  std::vector<std::string> pl_manifests;
  std::vector<std::string> pl_samples;
  int pl_max = 8;
  pl->add_option("--manifest", pl_manifests, "run manifest file(s)")->required();
  pl->add_option("--samples", pl_samples, "explicit sample ids")->delimiter(',');
  pl->add_option("--max-samples", pl_max, "sample count when no ids are given");
  pl->callback([&]() {
    const std::vector<std::string> paths =
      run_plot_data(pl_manifests, st.out_dir, pl_samples, pl_max);
    for (const std::string & p : paths) {
      std::printf("wrote %s\n", p.c_str());
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return st.exit_code;
}
