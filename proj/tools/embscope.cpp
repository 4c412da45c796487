// Command-line front end: `project` runs the offline pipeline, `serve`
// exposes dataset directories over HTTP.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embscope/embscope.hpp"

namespace {

std::vector<std::filesystem::path> split_paths(const std::string& list) {
  std::vector<std::filesystem::path> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto part = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

embscope::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedding explorer: project sequence-model representations and serve them"};
  app.require_subcommand(1);

  // project
  auto* project = app.add_subcommand("project", "Project raw representations into a dataset directory");
  embscope::ProjectOptions opts;
  std::vector<std::string> sentences, reprs, tokens, layers, langs;
  std::string config_path, metric = "euclidean", init = "random";
  project->add_option("--sentences", sentences, "Sentence text file per language")->required();
  project->add_option("--reprs", reprs, "Sentence representation JSON per language")->required();
  project->add_option("--tokens", tokens, "Token embedding JSON per language");
  project->add_option("--langs", langs, "Language codes, in the order of the file lists")
      ->required()
      ->delimiter(',');
  project->add_option("--layers", layers,
                      "Per language: comma-separated layer representation files, layer 0 first");
  project->add_option("--out", opts.out, "Output dataset directory")->required();
  project->add_option("--id", opts.id, "Dataset id (default: output directory name)");
  project->add_option("--name", opts.name, "Display name (default: id)");
  project->add_option("--config", config_path, "JSON file with reduction settings")->check(CLI::ExistingFile);
  auto* seed_opt = project->add_option("--seed", opts.umap.layout.seed, "Random seed");
  auto* k_opt = project->add_option("--k", opts.umap.k, "Neighbour count")->check(CLI::PositiveNumber);
  auto* md_opt = project->add_option("--min-dist", opts.umap.min_dist, "Minimum distance in the layout");
  auto* spread_opt = project->add_option("--spread", opts.umap.spread, "Kernel spread");
  auto* epochs_opt = project->add_option("--epochs", opts.umap.layout.n_epochs, "Optimisation epochs")
                         ->check(CLI::NonNegativeNumber);
  auto* metric_opt = project->add_option("--metric", metric, "Neighbour metric")
                         ->check(CLI::IsMember({"euclidean", "cosine"}));
  auto* init_opt = project->add_option("--init", init, "Layout initialisation")
                       ->check(CLI::IsMember({"random", "spectral"}));

  // serve
  auto* serve = app.add_subcommand("serve", "Serve every dataset under a data root");
  embscope::ServerConfig server_config;
  serve->add_option("--data", server_config.data_root, "Data root directory")
      ->envname("EMBSCOPE_DATA")
      ->required();
  serve->add_option("--port", server_config.port, "TCP port (0 picks a free port)")
      ->envname("EMBSCOPE_PORT")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", server_config.host, "Bind address");
  serve->add_option("--suggest-limit", server_config.suggest_limit, "Default suggestion limit")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (project->parsed()) {
      // Config file first; explicit flags win.
      const auto flags = opts.umap;
      if (!config_path.empty()) embscope::apply_config(config_path, opts.umap);
      if (seed_opt->count()) opts.umap.layout.seed = flags.layout.seed;
      if (k_opt->count()) opts.umap.k = flags.k;
      if (md_opt->count()) opts.umap.min_dist = flags.min_dist;
      if (spread_opt->count()) opts.umap.spread = flags.spread;
      if (epochs_opt->count()) opts.umap.layout.n_epochs = flags.layout.n_epochs;
      if (metric_opt->count() || config_path.empty()) opts.umap.metric = embscope::parse_metric(metric);
      if (init_opt->count() || config_path.empty()) opts.umap.layout.init = embscope::parse_init(init);

      opts.languages = langs;
      opts.sentences.assign(sentences.begin(), sentences.end());
      opts.reprs.assign(reprs.begin(), reprs.end());
      opts.tokens.assign(tokens.begin(), tokens.end());
      for (const auto& list : layers) opts.layers.push_back(split_paths(list));

      const auto report = embscope::run_project(opts);
      for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
      for (const auto& path : report.written) std::cout << "wrote " << path.string() << "\n";
      return 0;
    }

    auto api = std::make_shared<const embscope::Api>(
        embscope::Api::from_data_root(server_config.data_root, server_config.suggest_limit));
    embscope::Server server(api, server_config.host);
    const int port = server.bind(server_config.port);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "serving " << api->dataset_count() << " dataset(s) on http://" << server_config.host << ":"
              << port << std::endl;
    server.listen();
    g_server = nullptr;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
