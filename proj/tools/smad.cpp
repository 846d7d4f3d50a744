// Copyright 2026 The smad Authors
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


// smad: command-line front end.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <unistd.h>

#include <CLI11/CLI11.hpp>

#include "smad/cli.hpp"

namespace {

extern "C" void on_interrupt(int sig) {
  if (smad::detail::g_pending_tmp[0]) ::unlink(smad::detail::g_pending_tmp);
  ::_exit(128 + sig);
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);

  CLI::App app{"Single-image face morphing attack detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "smad 0.1.0");
  smad::cli::Io io{std::cout, std::cerr};
  std::function<int()> run;

  smad::cli::SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset and manifest");
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--n", synth.n, "Images per class and variant")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  c_synth->add_option("--ghost", synth.ghost, "Ghosting amplitude in [0,1]")->capture_default_str();
  c_synth->add_option("--size", synth.size, "Image side in pixels")->capture_default_str();
  c_synth->add_option("--media", synth.media, "Comma list of digital,ps1,ps2")->capture_default_str();
  c_synth->add_option("--posts", synth.posts, "Comma list of before,after")->capture_default_str();
  c_synth->add_option("--compression", synth.compression, "Comma list of no,yes")->capture_default_str();
  c_synth->callback([&] { run = [&] { return smad::cli::cmd_synth(synth, io); }; });

  smad::cli::ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Extract features for every manifest row into a cache directory");
  c_extract->add_option("--manifest", extract.manifest)->required();
  c_extract->add_option("--out", extract.out, "Cache directory")->required();
  c_extract->add_option("--config", extract.config);
  c_extract->add_option("--workers", extract.workers);
  c_extract->callback([&] { run = [&] { return smad::cli::cmd_extract(extract, io); }; });

  smad::cli::TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train the detector and write a model bundle");
  c_train->add_option("--manifest", train.manifest)->required();
  c_train->add_option("--out", train.out, "Bundle path")->required();
  c_train->add_option("--config", train.config);
  c_train->add_option("--cache", train.cache, "Feature cache directory from `extract`");
  c_train->add_option("--seed", train.seed);
  c_train->add_option("--workers", train.workers);
  c_train->add_option("--train-select", train.train_select, "e.g. medium=digital,post=before,compressed=no");
  c_train->callback([&] { run = [&] { return smad::cli::cmd_train(train, io); }; });

  smad::cli::ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score one image or the rows of a manifest");
  c_score->add_option("--bundle", score.bundle)->required();
  c_score->add_option("--image", score.image);
  c_score->add_option("--manifest", score.manifest);
  c_score->add_option("--test-select", score.test_select);
  c_score->add_option("--out", score.csv, "CSV output (default stdout)");
  c_score->add_option("--workers", score.workers);
  c_score->callback([&] { run = [&] { return smad::cli::cmd_score(score, io); }; });

  smad::cli::EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Evaluate a bundle on the test partition");
  c_eval->add_option("--bundle", evaluate.bundle)->required();
  c_eval->add_option("--manifest", evaluate.manifest)->required();
  c_eval->add_option("--out", evaluate.out, "Directory for report.json and det.csv")->required();
  c_eval->add_option("--protocol", evaluate.protocol, "intra | inter-medium | inter-medium-varied-post")
      ->capture_default_str();
  c_eval->add_option("--test-select", evaluate.test_select);
  c_eval->add_option("--cache", evaluate.cache);
  c_eval->add_option("--workers", evaluate.workers);
  c_eval->callback([&] { run = [&] { return smad::cli::cmd_evaluate(evaluate, io); }; });

  smad::cli::RunArgs runargs;
  auto* c_run = app.add_subcommand("run", "Train and evaluate one protocol cell into runs/<stamp>-<hash>/");
  c_run->add_option("--manifest", runargs.manifest)->required();
  c_run->add_option("--out", runargs.out, "Runs root")->capture_default_str();
  c_run->add_option("--config", runargs.config);
  c_run->add_option("--cache", runargs.cache);
  c_run->add_option("--seed", runargs.seed);
  c_run->add_option("--workers", runargs.workers);
  c_run->add_option("--protocol", runargs.protocol)->capture_default_str();
  c_run->add_option("--train-select", runargs.train_select)->required();
  c_run->add_option("--test-select", runargs.test_select)->required();
  c_run->callback([&] { run = [&] { return smad::cli::cmd_run(runargs, io); }; });

  smad::cli::ProtocolsArgs protocols;
  auto* c_prot = app.add_subcommand("protocols", "Enumerate (or run) every experiment cell for a manifest");
  c_prot->add_option("--manifest", protocols.manifest)->required();
  c_prot->add_option("--out", protocols.out, "Runs root")->capture_default_str();
  c_prot->add_option("--config", protocols.config);
  c_prot->add_option("--cache", protocols.cache);
  c_prot->add_option("--seed", protocols.seed);
  c_prot->add_option("--workers", protocols.workers);
  c_prot->add_flag("--dry-run", protocols.dry_run, "Only enumerate and validate the cells");
  c_prot->callback([&] { run = [&] { return smad::cli::cmd_protocols(protocols, io); }; });

  std::optional<std::filesystem::path> dims_config;
  auto* c_dims = app.add_subcommand("describe-dims", "Print per-sub-image feature dimensionality");
  c_dims->add_option("--config", dims_config);
  c_dims->callback([&] { run = [&] { return smad::cli::cmd_describe_dims(dims_config, io); }; });

  std::filesystem::path manifest_path;
  auto* c_man = app.add_subcommand("manifest", "Validate a manifest and print its summary");
  c_man->add_option("--manifest", manifest_path)->required();
  c_man->callback([&] { run = [&] { return smad::cli::cmd_manifest(manifest_path, io); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run();
  } catch (const smad::Error& e) {
    std::cerr << "smad: " << smad::to_string(e.code()) << " error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "smad: error: " << e.what() << '\n';
  }
  return 1;
}
