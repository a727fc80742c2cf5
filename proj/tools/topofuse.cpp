// topofuse: Betti-curve feature extraction, training and evaluation.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "topofuse/commands.hpp"
#include "topofuse/error.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  std::string dataset;
  std::string features;
  std::string checkpoint;
  std::string embeddings;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run configuration file (key = value, sections per module)");
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--set", c.overrides, "Override a configuration key, e.g. --set train.epochs=10");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological feature extraction and classification"};
  app.require_subcommand(1);
  Common c;
  std::string mode = "tda";

  auto* extract = app.add_subcommand("extract", "Compute Betti-curve features for a dataset tree");
  add_common(extract, c);
  extract->add_option("--dataset", c.dataset, "Dataset root (overrides data.root)");
  extract->add_option("--features", c.features, "Feature CSV to write (default <out>/features.csv)");

  auto* train = app.add_subcommand("train", "Train the TDA-MLP or the fusion classifier");
  add_common(train, c);
  train->add_option("--mode", mode, "Model: tda or fusion")->check(CLI::IsMember({"tda", "fusion"}));
  train->add_option("--features", c.features, "Feature CSV (default <out>/features.csv)");
  train->add_option("--embeddings", c.embeddings, "Embedding CSV for fusion (overrides train.embeddings)");
  train->add_option("--checkpoint", c.checkpoint, "Checkpoint to write (default <out>/checkpoint_<mode>.bin)");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  add_common(eval, c);
  eval->add_option("--features", c.features, "Feature CSV (default <out>/features.csv)");
  eval->add_option("--embeddings", c.embeddings, "Embedding CSV for fusion checkpoints");
  eval->add_option("--checkpoint", c.checkpoint, "Checkpoint (default <out>/checkpoint_tda.bin)");

  auto* analyze = app.add_subcommand("analyze", "Export PCA projections and class distributions");
  add_common(analyze, c);
  analyze->add_option("--features", c.features, "Feature CSV (default <out>/features.csv)");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic four-class benchmark");
  add_common(synth, c);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> overrides = c.overrides;
    if (!c.dataset.empty()) overrides.push_back("data.root=" + c.dataset);
    if (!c.embeddings.empty()) overrides.push_back("train.embeddings=" + c.embeddings);
    const topofuse::RunConfig cfg = topofuse::load_run_config(c.config, overrides);
    const topofuse::CommandPaths paths{c.out, c.features, c.checkpoint};

    if (extract->parsed()) topofuse::cmd_extract(cfg, paths, std::cout);
    else if (train->parsed()) topofuse::cmd_train(cfg, paths, topofuse::parse_model_kind(mode), std::cout);
    else if (eval->parsed()) topofuse::cmd_eval(cfg, paths, std::cout);
    else if (analyze->parsed()) topofuse::cmd_analyze(cfg, paths, std::cout);
    else if (synth->parsed()) topofuse::cmd_synth(cfg, paths, std::cout);
  } catch (const topofuse::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
