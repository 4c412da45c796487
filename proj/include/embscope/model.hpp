#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embscope/detail/json_io.hpp"
#include "embscope/error.hpp"
#include "embscope/ingest.hpp"
#include "embscope/reduce/layout.hpp"

namespace embscope {

using Coord = std::array<double, 2>;

struct TokenPoint {
  std::string t;
  Coord xy{};
  bool operator==(const TokenPoint&) const = default;
};

struct SentencePoint {
  std::size_t id = 0;
  std::string text;
  Coord xy{};
  std::vector<TokenPoint> tokens;
  bool operator==(const SentencePoint&) const = default;
};

/// Sentence and token coordinates of one language.
struct MultiscaleDocument {
  std::string language;
  std::vector<SentencePoint> sentences;
  bool operator==(const MultiscaleDocument&) const = default;
};

struct LayerPoints {
  std::size_t index = 0;
  std::vector<Coord> points;
  bool operator==(const LayerPoints&) const = default;
};

/// Per-layer sentence coordinates of one language.
struct LayerDocument {
  std::string language;
  std::vector<LayerPoints> layers;
  bool operator==(const LayerDocument&) const = default;
};

struct DatasetFiles {
  std::string multiscale;
  std::optional<std::string> layers;
  bool operator==(const DatasetFiles&) const = default;
};

struct DatasetManifest {
  std::string id;
  std::string name;
  std::vector<std::string> languages;
  std::size_t sentence_count = 0;
  std::size_t layer_count = 0;
  std::vector<std::string> granularities;
  std::map<std::string, DatasetFiles> files;

  bool has_tokens() const {
    return std::find(granularities.begin(), granularities.end(), "token") != granularities.end();
  }
  bool operator==(const DatasetManifest&) const = default;
};

namespace detail {

// Field-path helpers for schema validation. Paths look like
// `$.sentences[3].tokens[0].xy`.

inline std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

inline const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "missing field");
  return *it;
}

inline std::string string_field(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_string()) throw ValidationError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::size_t index_field(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline const json& array_field(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_array()) throw ValidationError(path + "." + key, "expected an array");
  return v;
}

inline Coord read_coord(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(path, "expected [x, y]");
  Coord c{};
  for (std::size_t k = 0; k < 2; ++k) {
    if (v[k].is_null()) throw ValidationError(at(path, k), "non-finite coordinate");
    if (!v[k].is_number()) throw ValidationError(at(path, k), "expected a number");
    c[k] = v[k].get<double>();
  }
  return c;
}

inline Coord to_coord(const reduce::Projection& p, std::size_t i) {
  return {quantize(p.x(i)), quantize(p.y(i))};
}

inline ordered_json coord_json(const Coord& c) { return ordered_json::array({c[0], c[1]}); }

inline void check_language(const std::string& code, const std::string& path) {
  try {
    validate_language_code(code);
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.what());
  }
}

inline void check_coord_finite(const Coord& c, const std::string& path) {
  if (!std::isfinite(c[0]) || !std::isfinite(c[1])) {
    throw ValidationError(path, "non-finite coordinate");
  }
}

inline void write_json(const std::filesystem::path& path, const ordered_json& doc, int indent = -1) {
  write_file(path, doc.dump(indent) + "\n");
}

}  // namespace detail

// --- MultiscaleDocument -----------------------------------------------------

inline void validate(const MultiscaleDocument& doc) {
  detail::check_language(doc.language, "$.language");
  if (doc.sentences.empty()) throw ValidationError("$.sentences", "at least one sentence required");
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sp = doc.sentences[s];
    const std::string base = detail::at("$.sentences", s);
    if (sp.id != s) {
      throw ValidationError(base + ".id", "expected id " + std::to_string(s) + ", found " +
                                              std::to_string(sp.id));
    }
    detail::check_coord_finite(sp.xy, base + ".xy");
    for (std::size_t t = 0; t < sp.tokens.size(); ++t) {
      detail::check_coord_finite(sp.tokens[t].xy, detail::at(base + ".tokens", t) + ".xy");
    }
  }
}

inline nlohmann::ordered_json to_json(const MultiscaleDocument& doc) {
  detail::ordered_json sentences = detail::ordered_json::array();
  for (const auto& sp : doc.sentences) {
    detail::ordered_json tokens = detail::ordered_json::array();
    for (const auto& tok : sp.tokens) {
      tokens.push_back({{"t", tok.t}, {"xy", detail::coord_json(tok.xy)}});
    }
    sentences.push_back(
        {{"id", sp.id}, {"text", sp.text}, {"xy", detail::coord_json(sp.xy)}, {"tokens", tokens}});
  }
  return {{"language", doc.language}, {"sentences", std::move(sentences)}};
}

inline MultiscaleDocument multiscale_from_json(const nlohmann::json& j) {
  MultiscaleDocument doc;
  doc.language = detail::string_field(j, "$", "language");
  const auto& sentences = detail::array_field(j, "$", "sentences");
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const std::string base = detail::at("$.sentences", s);
    const auto& node = sentences[s];
    SentencePoint sp;
    sp.id = detail::index_field(node, base, "id");
    sp.text = detail::string_field(node, base, "text");
    sp.xy = detail::read_coord(detail::field(node, base, "xy"), base + ".xy");
    const auto& tokens = detail::array_field(node, base, "tokens");
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const std::string tb = detail::at(base + ".tokens", t);
      sp.tokens.push_back({detail::string_field(tokens[t], tb, "t"),
                           detail::read_coord(detail::field(tokens[t], tb, "xy"), tb + ".xy")});
    }
    doc.sentences.push_back(std::move(sp));
  }
  validate(doc);
  return doc;
}

/// Builds the document for one language. Coordinates are rounded to 6
/// significant digits, so the returned value equals what a later import
/// reads back. `token_proj` rows follow `tokens` sentence-major.
inline MultiscaleDocument make_multiscale(const RawCorpus& corpus,
                                          const reduce::Projection& sentence_proj,
                                          const TokenEmbeddingSet* tokens = nullptr,
                                          const reduce::Projection* token_proj = nullptr) {
  if (sentence_proj.rows() != corpus.size()) {
    throw ValidationError(corpus.language, "projection has " + std::to_string(sentence_proj.rows()) +
                                               " rows, corpus has " + std::to_string(corpus.size()));
  }
  if ((tokens == nullptr) != (token_proj == nullptr)) {
    throw ValidationError(corpus.language, "token set and token projection must come together");
  }
  if (tokens) {
    if (tokens->size() != corpus.size()) {
      throw ValidationError(corpus.language, "token set covers " + std::to_string(tokens->size()) +
                                                 " sentences, corpus has " +
                                                 std::to_string(corpus.size()));
    }
    if (token_proj->rows() != tokens->token_count()) {
      throw ValidationError(corpus.language, "token projection has " +
                                                 std::to_string(token_proj->rows()) + " rows, expected " +
                                                 std::to_string(tokens->token_count()));
    }
  }
  MultiscaleDocument doc{corpus.language, {}};
  doc.sentences.reserve(corpus.size());
  std::size_t row = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    SentencePoint sp{s, corpus.sentences[s], detail::to_coord(sentence_proj, s), {}};
    if (tokens) {
      for (const auto& tok : tokens->sentences[s]) {
        sp.tokens.push_back({tok.surface, detail::to_coord(*token_proj, row++)});
      }
    }
    doc.sentences.push_back(std::move(sp));
  }
  validate(doc);
  return doc;
}

inline void write_multiscale(const MultiscaleDocument& doc, const std::filesystem::path& path) {
  validate(doc);
  detail::write_json(path, to_json(doc));
}

inline MultiscaleDocument export_multiscale(const RawCorpus& corpus,
                                            const reduce::Projection& sentence_proj,
                                            const TokenEmbeddingSet* tokens,
                                            const reduce::Projection* token_proj,
                                            const std::filesystem::path& path) {
  auto doc = make_multiscale(corpus, sentence_proj, tokens, token_proj);
  write_multiscale(doc, path);
  return doc;
}

inline MultiscaleDocument import_multiscale(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  try {
    return multiscale_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + " " + e.where(), e.what());
  }
}

// --- LayerDocument ----------------------------------------------------------

inline void validate(const LayerDocument& doc) {
  detail::check_language(doc.language, "$.language");
  if (doc.layers.empty()) throw ValidationError("$.layers", "at least one layer required");
  const std::size_t m = doc.layers.front().points.size();
  for (std::size_t l = 0; l < doc.layers.size(); ++l) {
    const auto& layer = doc.layers[l];
    const std::string base = detail::at("$.layers", l);
    if (layer.index != l) {
      throw ValidationError(base + ".index", "expected index " + std::to_string(l) + ", found " +
                                                 std::to_string(layer.index));
    }
    if (layer.points.empty()) throw ValidationError(base + ".points", "layer " + std::to_string(l) + " has no points");
    if (layer.points.size() != m) {
      throw ValidationError(base + ".points", "layer " + std::to_string(l) + " has " +
                                                  std::to_string(layer.points.size()) +
                                                  " points, layer 0 has " + std::to_string(m));
    }
    for (std::size_t p = 0; p < layer.points.size(); ++p) {
      detail::check_coord_finite(layer.points[p], detail::at(base + ".points", p));
    }
  }
}

inline nlohmann::ordered_json to_json(const LayerDocument& doc) {
  detail::ordered_json layers = detail::ordered_json::array();
  for (const auto& layer : doc.layers) {
    detail::ordered_json points = detail::ordered_json::array();
    for (const auto& c : layer.points) points.push_back(detail::coord_json(c));
    layers.push_back({{"index", layer.index}, {"points", std::move(points)}});
  }
  return {{"language", doc.language}, {"layers", std::move(layers)}};
}

inline LayerDocument layers_from_json(const nlohmann::json& j) {
  LayerDocument doc;
  doc.language = detail::string_field(j, "$", "language");
  const auto& layers = detail::array_field(j, "$", "layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string base = detail::at("$.layers", l);
    LayerPoints lp;
    lp.index = detail::index_field(layers[l], base, "index");
    const auto& points = detail::array_field(layers[l], base, "points");
    for (std::size_t p = 0; p < points.size(); ++p) {
      lp.points.push_back(detail::read_coord(points[p], detail::at(base + ".points", p)));
    }
    doc.layers.push_back(std::move(lp));
  }
  validate(doc);
  return doc;
}

inline LayerDocument make_layers(std::span<const reduce::Projection> layers, const std::string& language) {
  LayerDocument doc{language, {}};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerPoints lp{l, {}};
    lp.points.reserve(layers[l].rows());
    for (std::size_t i = 0; i < layers[l].rows(); ++i) lp.points.push_back(detail::to_coord(layers[l], i));
    doc.layers.push_back(std::move(lp));
  }
  validate(doc);
  return doc;
}

inline void write_layers(const LayerDocument& doc, const std::filesystem::path& path) {
  validate(doc);
  detail::write_json(path, to_json(doc));
}

inline LayerDocument export_layers(std::span<const reduce::Projection> layers,
                                   const std::string& language, const std::filesystem::path& path) {
  auto doc = make_layers(layers, language);
  write_layers(doc, path);
  return doc;
}

inline LayerDocument import_layers(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  try {
    return layers_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + " " + e.where(), e.what());
  }
}

// --- Manifest ---------------------------------------------------------------

inline void validate(const DatasetManifest& m) {
  if (m.id.empty() || !std::all_of(m.id.begin(), m.id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
      })) {
    throw ValidationError("$.id", "expected a slug (letters, digits, '-' and '_')");
  }
  if (m.languages.empty()) throw ValidationError("$.languages", "at least one language required");
  for (std::size_t i = 0; i < m.languages.size(); ++i) {
    detail::check_language(m.languages[i], detail::at("$.languages", i));
    for (std::size_t j = 0; j < i; ++j) {
      if (m.languages[j] == m.languages[i]) {
        throw ValidationError(detail::at("$.languages", i), "duplicate language '" + m.languages[i] + "'");
      }
    }
    const auto f = m.files.find(m.languages[i]);
    if (f == m.files.end()) throw ValidationError("$.files." + m.languages[i], "missing entry");
    if (f->second.layers.has_value() != (m.layer_count > 0)) {
      throw ValidationError("$.files." + m.languages[i] + ".layers",
                            m.layer_count > 0 ? "missing (layer_count > 0)"
                                              : "present but layer_count is 0");
    }
  }
  if (m.files.size() != m.languages.size()) {
    throw ValidationError("$.files", "entries do not match the language list");
  }
  if (m.sentence_count < 1) throw ValidationError("$.sentence_count", "must be at least 1");
  bool has_sentence = false;
  for (std::size_t i = 0; i < m.granularities.size(); ++i) {
    const auto& g = m.granularities[i];
    if (g != "sentence" && g != "token") {
      throw ValidationError(detail::at("$.granularities", i), "unknown granularity '" + g + "'");
    }
    has_sentence = has_sentence || g == "sentence";
  }
  if (!has_sentence) throw ValidationError("$.granularities", "must include \"sentence\"");
}

inline nlohmann::ordered_json to_json(const DatasetManifest& m) {
  detail::ordered_json files = detail::ordered_json::object();
  for (const auto& lang : m.languages) {
    const auto& f = m.files.at(lang);
    detail::ordered_json entry = {{"multiscale", f.multiscale}};
    if (f.layers) entry["layers"] = *f.layers;
    files[lang] = std::move(entry);
  }
  return {{"id", m.id},
          {"name", m.name},
          {"languages", m.languages},
          {"sentence_count", m.sentence_count},
          {"layer_count", m.layer_count},
          {"granularities", m.granularities},
          {"files", std::move(files)}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.id = detail::string_field(j, "$", "id");
  m.name = detail::string_field(j, "$", "name");
  const auto& langs = detail::array_field(j, "$", "languages");
  for (std::size_t i = 0; i < langs.size(); ++i) {
    if (!langs[i].is_string()) throw ValidationError(detail::at("$.languages", i), "expected a string");
    m.languages.push_back(langs[i].get<std::string>());
  }
  m.sentence_count = detail::index_field(j, "$", "sentence_count");
  m.layer_count = detail::index_field(j, "$", "layer_count");
  const auto& grans = detail::array_field(j, "$", "granularities");
  for (std::size_t i = 0; i < grans.size(); ++i) {
    if (!grans[i].is_string()) {
      throw ValidationError(detail::at("$.granularities", i), "expected a string");
    }
    m.granularities.push_back(grans[i].get<std::string>());
  }
  const auto& files = detail::field(j, "$", "files");
  if (!files.is_object()) throw ValidationError("$.files", "expected an object");
  for (const auto& [lang, entry] : files.items()) {
    const std::string base = "$.files." + lang;
    DatasetFiles f;
    f.multiscale = detail::string_field(entry, base, "multiscale");
    if (entry.contains("layers")) f.layers = detail::string_field(entry, base, "layers");
    m.files.emplace(lang, std::move(f));
  }
  validate(m);
  return m;
}

}  // namespace embscope
