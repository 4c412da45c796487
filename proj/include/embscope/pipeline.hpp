#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "embscope/dataset.hpp"
#include "embscope/detail/json_io.hpp"
#include "embscope/error.hpp"
#include "embscope/ingest.hpp"
#include "embscope/linkage.hpp"
#include "embscope/model.hpp"
#include "embscope/reduce/umap.hpp"

namespace embscope {

/// Inputs of the offline pipeline. Per-language lists are parallel to
/// `languages`; `tokens` and `layers` may be empty.
struct ProjectOptions {
  std::vector<std::string> languages;
  std::vector<std::filesystem::path> sentences;
  std::vector<std::filesystem::path> reprs;
  std::vector<std::filesystem::path> tokens;
  std::vector<std::vector<std::filesystem::path>> layers;
  std::filesystem::path out;
  std::string id;
  std::string name;
  reduce::UmapParams umap;
};

struct ProjectReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> notes;
};

inline reduce::Metric parse_metric(const std::string& s) {
  if (s == "euclidean") return reduce::Metric::euclidean;
  if (s == "cosine") return reduce::Metric::cosine;
  throw ValidationError("metric", "expected 'euclidean' or 'cosine', got '" + s + "'");
}

inline reduce::InitMethod parse_init(const std::string& s) {
  if (s == "random") return reduce::InitMethod::random;
  if (s == "spectral") return reduce::InitMethod::spectral;
  throw ValidationError("init", "expected 'random' or 'spectral', got '" + s + "'");
}

/// Applies a key-value JSON config over `params`. Unknown keys are errors.
inline void apply_config(const std::filesystem::path& path, reduce::UmapParams& params) {
  const auto j = detail::parse_json_file(path);
  if (!j.is_object()) throw ValidationError(path.string(), "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto where = path.string() + " $." + key;
    try {
      if (key == "k") params.k = value.get<std::size_t>();
      else if (key == "metric") params.metric = parse_metric(value.get<std::string>());
      else if (key == "min_dist") params.min_dist = value.get<double>();
      else if (key == "spread") params.spread = value.get<double>();
      else if (key == "n_epochs") params.layout.n_epochs = value.get<int>();
      else if (key == "initial_lr") params.layout.initial_lr = value.get<double>();
      else if (key == "negative_sample_rate") params.layout.negative_sample_rate = value.get<int>();
      else if (key == "seed") params.layout.seed = value.get<std::uint64_t>();
      else if (key == "init") params.layout.init = parse_init(value.get<std::string>());
      else throw ValidationError(where, "unknown config key");
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(where, "wrong value type");
    }
  }
}

/// Projects several matrices into one shared plane and splits the result
/// back in input order. k is capped at n - 1; a single point sits at the
/// origin.
inline std::vector<reduce::Projection> project_jointly(std::span<const EmbeddingMatrix> parts,
                                                       const reduce::UmapParams& params,
                                                       std::vector<std::string>& notes) {
  const auto all = concat_rows(parts);
  reduce::Projection joint;
  if (all.rows() == 1) {
    joint.coords = {0.0, 0.0};
  } else {
    auto p = params;
    p.k = std::min(p.k, all.rows() - 1);
    joint = reduce::project(all, p, &notes);
  }
  std::vector<reduce::Projection> out;
  std::size_t offset = 0;
  for (const auto& part : parts) {
    reduce::Projection proj;
    proj.coords.assign(joint.coords.begin() + static_cast<std::ptrdiff_t>(2 * offset),
                       joint.coords.begin() + static_cast<std::ptrdiff_t>(2 * (offset + part.rows())));
    offset += part.rows();
    out.push_back(std::move(proj));
  }
  return out;
}

/// ingest -> reduce -> linkage -> export. Writes `<lang>.multiscale.json`,
/// `<lang>.layers.json` (with layers), `links.json` (with layers) and the
/// manifest `dataset.json` into `opts.out`.
inline ProjectReport run_project(const ProjectOptions& opts) {
  const std::size_t n_lang = opts.languages.size();
  if (n_lang == 0) throw ValidationError("--langs", "at least one language required");
  if (opts.sentences.size() != n_lang || opts.reprs.size() != n_lang) {
    throw ValidationError("--sentences/--reprs", "expected one file per language (" + std::to_string(n_lang) + ")");
  }
  if (!opts.tokens.empty() && opts.tokens.size() != n_lang) {
    throw ValidationError("--tokens", "expected one file per language (" + std::to_string(n_lang) + ")");
  }
  if (!opts.layers.empty() && opts.layers.size() != n_lang) {
    throw ValidationError("--layers", "expected one layer list per language (" + std::to_string(n_lang) + ")");
  }
  opts.umap.layout.validate();
  reduce::validate_curve_inputs(opts.umap.min_dist, opts.umap.spread);

  ProjectReport report;
  std::vector<RawCorpus> corpora;
  std::vector<EmbeddingMatrix> reprs;
  for (std::size_t l = 0; l < n_lang; ++l) {
    corpora.push_back(load_sentences(opts.sentences[l], opts.languages[l]));
    reprs.push_back(load_sentence_embeddings(opts.reprs[l], corpora.back().size()));
    if (reprs.back().cols() != reprs.front().cols()) {
      throw ValidationError(opts.reprs[l].string(), "dimension " + std::to_string(reprs.back().cols()) +
                                                        " differs from " + std::to_string(reprs.front().cols()) +
                                                        " of the first language");
    }
  }
  std::vector<ParallelGroup> groups;
  if (n_lang >= 2) {
    groups = align_corpora(corpora);
  } else {
    for (std::size_t g = 0; g < corpora.front().size(); ++g) groups.push_back({g, {{corpora.front().language, g}}});
  }
  const std::size_t m = corpora.front().size();

  std::vector<TokenEmbeddingSet> tokens;
  for (std::size_t l = 0; l < opts.tokens.size(); ++l) {
    tokens.push_back(load_token_embeddings(opts.tokens[l], corpora[l]));
    if (tokens.back().dim != tokens.front().dim) {
      throw ValidationError(opts.tokens[l].string(), "token dimension differs from the first language");
    }
  }
  if (!tokens.empty() && tokens.front().dim != reprs.front().cols()) {
    report.notes.push_back("token dimension " + std::to_string(tokens.front().dim) +
                           " differs from sentence dimension " + std::to_string(reprs.front().cols()) +
                           "; the two granularities are projected independently");
  }

  std::vector<LayerStack> stacks;
  for (std::size_t l = 0; l < opts.layers.size(); ++l) {
    stacks.push_back(load_layer_stack(opts.layers[l], opts.languages[l], m));
  }
  const std::size_t t = stacks.empty() ? 0 : detail::common_layer_count(stacks);

  const auto sentence_proj = project_jointly(reprs, opts.umap, report.notes);
  std::vector<reduce::Projection> token_proj;
  if (!tokens.empty()) {
    std::vector<EmbeddingMatrix> token_mats;
    for (const auto& ts : tokens) token_mats.push_back(ts.matrix());
    token_proj = project_jointly(token_mats, opts.umap, report.notes);
  }
  std::vector<std::vector<reduce::Projection>> layer_proj(n_lang);
  for (std::size_t layer = 0; layer < t; ++layer) {
    std::vector<EmbeddingMatrix> mats;
    for (const auto& s : stacks) mats.push_back(s.layers[layer]);
    auto projs = project_jointly(mats, opts.umap, report.notes);
    for (std::size_t l = 0; l < n_lang; ++l) layer_proj[l].push_back(std::move(projs[l]));
  }

  std::filesystem::create_directories(opts.out);
  DatasetManifest manifest;
  manifest.id = opts.id.empty() ? opts.out.filename().string() : opts.id;
  manifest.name = opts.name.empty() ? manifest.id : opts.name;
  manifest.languages = opts.languages;
  manifest.sentence_count = m;
  manifest.layer_count = t;
  manifest.granularities = tokens.empty() ? std::vector<std::string>{"sentence"}
                                          : std::vector<std::string>{"sentence", "token"};
  for (std::size_t l = 0; l < n_lang; ++l) {
    const auto& lang = opts.languages[l];
    DatasetFiles files{lang + ".multiscale.json", std::nullopt};
    export_multiscale(corpora[l], sentence_proj[l], tokens.empty() ? nullptr : &tokens[l],
                      tokens.empty() ? nullptr : &token_proj[l], opts.out / files.multiscale);
    report.written.push_back(opts.out / files.multiscale);
    if (t > 0) {
      files.layers = lang + ".layers.json";
      export_layers(layer_proj[l], lang, opts.out / *files.layers);
      report.written.push_back(opts.out / *files.layers);
    }
    manifest.files.emplace(lang, std::move(files));
  }
  if (t > 0) {
    const LinkTable table{layer_pair_distances(groups, stacks)};
    detail::write_json(opts.out / kLinksFile, to_json(table));
    report.written.push_back(opts.out / kLinksFile);
  }
  validate(manifest);
  detail::write_json(opts.out / kManifestFile, to_json(manifest), 2);
  report.written.push_back(opts.out / kManifestFile);
  return report;
}

}  // namespace embscope
