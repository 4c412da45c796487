#pragma once

// Synthetic raw inputs: a 130-sentence three-language corpus with six
// decoder layers, a 1019-sentence pair of gendered template sets, and small
// planted-distance fixtures.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "embscope/pipeline.hpp"

namespace embscope::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "embscope-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_text(path, text);
}

inline void write_vectors(const fs::path& path, const std::vector<std::vector<double>>& rows) {
  write_text(path, nlohmann::json{{"vectors", rows}}.dump());
}

struct RawToken {
  std::string t;
  std::vector<double> v;
};

inline void write_tokens(const fs::path& path, const std::vector<std::vector<RawToken>>& sentences) {
  nlohmann::json doc = {{"sentences", nlohmann::json::array()}};
  for (const auto& s : sentences) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& tok : s) tokens.push_back({{"t", tok.t}, {"v", tok.v}});
    doc["sentences"].push_back({{"tokens", tokens}});
  }
  write_text(path, doc.dump());
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    auto sp = s.find(' ', start);
    if (sp == std::string::npos) sp = s.size();
    if (sp > start) out.push_back(s.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

inline std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t d, double sd) {
  std::normal_distribution<double> n(0.0, sd);
  std::vector<double> v(d);
  for (double& x : v) x = n(rng);
  return v;
}

inline std::vector<double> add(std::vector<double> a, const std::vector<double>& b, double scale = 1.0) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
  return a;
}

/// Three isotropic Gaussian clusters at 4 * e_c (pairwise centre distance
/// 4 * sqrt(2)), per-coordinate standard deviation `spread`.
struct LabelledPoints {
  EmbeddingMatrix points;
  std::vector<int> labels;
};

inline LabelledPoints three_clusters(std::size_t n, std::size_t d, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    auto v = gaussian_vector(rng, d, spread);
    v[static_cast<std::size_t>(c)] += 4.0;
    rows.push_back(std::move(v));
    labels.push_back(c);
  }
  return {EmbeddingMatrix::from_rows(rows), labels};
}

/// Fraction of points whose nearest other point in the 2-D layout shares
/// its label (brute force).
inline double one_nn_accuracy(const reduce::Projection& p, const std::vector<int>& labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double best = INFINITY;
    std::size_t arg = i;
    for (std::size_t j = 0; j < p.rows(); ++j) {
      if (j == i) continue;
      const double d = std::hypot(p.x(i) - p.x(j), p.y(i) - p.y(j));
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    hits += labels[arg] == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(p.rows());
}

// --- multilingual corpus -------------------------------------------------------

struct Lexicon {
  std::vector<std::string> en, es, fr;
};

/// Builds `count` aligned sentences; sentence 0 is "people accept orders .".
inline void multilingual_sentences(std::size_t count, std::vector<std::string>& en, std::vector<std::string>& es,
                                   std::vector<std::string>& fr) {
  const Lexicon subj{{"people", "workers", "members", "citizens", "ministers", "delegates", "farmers"},
                     {"la gente", "los trabajadores", "los miembros", "los ciudadanos", "los ministros",
                      "los delegados", "los agricultores"},
                     {"les gens", "les travailleurs", "les membres", "les citoyens", "les ministres",
                      "les délégués", "les agriculteurs"}};
  const Lexicon verb{{"accept", "reject", "discuss", "approve", "review", "sign"},
                     {"aceptan", "rechazan", "discuten", "aprueban", "revisan", "firman"},
                     {"acceptent", "rejettent", "discutent", "approuvent", "examinent", "signent"}};
  const Lexicon obj{{"orders", "reports", "budgets", "treaties", "proposals", "rules", "contracts"},
                    {"órdenes", "informes", "presupuestos", "tratados", "propuestas", "normas", "contratos"},
                    {"ordres", "rapports", "budgets", "traités", "propositions", "règles", "contrats"}};
  const Lexicon tail{{".", "today .", "again ."}, {".", "hoy .", "otra vez ."}, {".", "aujourd'hui .", "encore ."}};
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t s = i % 7, v = (i / 7) % 6, o = (i / 42) % 7, t = (i / 294) % 3;
    // Rotate objects so the first 130 sentences are all distinct.
    const std::size_t oo = (o + i) % 7;
    en.push_back(subj.en[s] + " " + verb.en[v] + " " + obj.en[oo] + " " + tail.en[t]);
    es.push_back(subj.es[s] + " " + verb.es[v] + " " + obj.es[oo] + " " + tail.es[t]);
    fr.push_back(subj.fr[s] + " " + verb.fr[v] + " " + obj.fr[oo] + " " + tail.fr[t]);
  }
}

struct RawDataset {
  ProjectOptions options;
};

/// Writes a 3-language corpus with sentence vectors (d = 32), token vectors
/// (d = 16) and `layers` decoder layers (d = 24) into `dir`.
inline ProjectOptions write_multilingual(const fs::path& dir, std::size_t sentences, std::size_t layers,
                                         std::uint64_t seed = 7, bool with_tokens = true) {
  std::vector<std::string> en, es, fr;
  multilingual_sentences(sentences, en, es, fr);
  const std::vector<std::string> langs{"en", "es", "fr"};
  const std::vector<std::vector<std::string>*> texts{&en, &es, &fr};
  std::mt19937_64 rng(seed);

  std::vector<std::vector<double>> meaning;
  for (std::size_t g = 0; g < sentences; ++g) meaning.push_back(gaussian_vector(rng, 32, 1.0));
  std::vector<std::vector<double>> lang_offset;
  for (std::size_t l = 0; l < 3; ++l) lang_offset.push_back(gaussian_vector(rng, 32, 0.6));

  ProjectOptions opts;
  opts.languages = langs;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto base = dir / langs[l];
    write_lines(base.string() + ".txt", *texts[l]);
    std::vector<std::vector<double>> rows;
    for (std::size_t g = 0; g < sentences; ++g) {
      rows.push_back(add(add(meaning[g], lang_offset[l]), gaussian_vector(rng, 32, 0.1)));
    }
    write_vectors(base.string() + ".reprs.json", rows);
    opts.sentences.push_back(base.string() + ".txt");
    opts.reprs.push_back(base.string() + ".reprs.json");

    if (with_tokens) {
      std::vector<std::vector<RawToken>> toks;
      for (std::size_t g = 0; g < sentences; ++g) {
        std::vector<RawToken> list;
        for (const auto& w : split_words((*texts[l])[g])) {
          std::mt19937_64 word_rng(std::hash<std::string>{}(w));
          list.push_back({w, add(gaussian_vector(word_rng, 16, 1.0), gaussian_vector(rng, 16, 0.05))});
        }
        toks.push_back(std::move(list));
      }
      write_tokens(base.string() + ".tokens.json", toks);
      opts.tokens.push_back(base.string() + ".tokens.json");
    }

    std::vector<fs::path> layer_files;
    for (std::size_t t = 0; t < layers; ++t) {
      // Deeper layers mix in more of the shared meaning.
      const double w = static_cast<double>(t + 1) / static_cast<double>(layers + 1);
      std::vector<std::vector<double>> lrows;
      for (std::size_t g = 0; g < sentences; ++g) {
        std::vector<double> v(24);
        for (std::size_t c = 0; c < 24; ++c) v[c] = w * meaning[g][c] + (1.0 - w) * 2.0 * lang_offset[l][c];
        lrows.push_back(add(v, gaussian_vector(rng, 24, 0.1)));
      }
      const auto file = dir / (langs[l] + ".layer" + std::to_string(t) + ".json");
      write_vectors(file, lrows);
      layer_files.push_back(file);
    }
    if (layers > 0) opts.layers.push_back(layer_files);
  }
  return opts;
}

// --- gendered template sets -------------------------------------------------

inline std::vector<std::string> occupations(std::size_t count) {
  const std::vector<std::string> first{"financial", "personal", "medical",  "legal",    "software",
                                       "sales",     "chief",    "senior",   "junior",   "public",
                                       "marketing", "research", "clinical", "civil",    "industrial",
                                       "biological", "nurse",   "accounting", "office", "retail"};
  const std::vector<std::string> second{"manager", "advisor", "clerk",     "scientist", "engineer",
                                        "analyst", "officer", "assistant", "midwife",   "technician",
                                        "designer", "planner", "inspector", "director",  "consultant",
                                        "specialist", "supervisor", "writer", "teacher", "operator",
                                        "coordinator", "agent", "auditor", "trainer", "editor",
                                        "architect", "broker", "developer", "examiner", "therapist",
                                        "chemist", "surveyor", "economist", "pharmacist", "translator",
                                        "programmer", "administrator", "representative", "estimator",
                                        "dispatcher", "investigator", "mechanic", "curator", "producer",
                                        "recruiter", "strategist", "biologist", "statistician", "librarian",
                                        "counselor", "paralegal"};
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    const auto a = first[i % first.size()];
    const auto b = second[(i / first.size()) % second.size()];
    if (i < first.size() * second.size()) {
      out.push_back(a + " " + b);
    } else {
      out.push_back("personal " + a + " " + b);
    }
  }
  out[0] = "financial manager";
  out[1] = "personal financial advisor";
  return out;
}

/// Two template sets treated as two languages: `female` and `male`.
/// Tokens are the occupation words only.
inline ProjectOptions write_gender_templates(const fs::path& dir, std::size_t sentences, std::uint64_t seed = 11) {
  const auto occ = occupations(sentences);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> occ_vec;
  for (std::size_t i = 0; i < sentences; ++i) occ_vec.push_back(gaussian_vector(rng, 32, 1.0));

  ProjectOptions opts;
  opts.languages = {"female", "male"};
  const std::vector<std::string> pronoun{"her", "him"};
  for (std::size_t l = 0; l < 2; ++l) {
    const auto gender = gaussian_vector(rng, 32, 0.3);
    std::vector<std::string> lines;
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<RawToken>> toks;
    for (std::size_t i = 0; i < sentences; ++i) {
      lines.push_back("I've known " + pronoun[l] + " for a long time, my friend works as a " + occ[i]);
      rows.push_back(add(add(occ_vec[i], gender), gaussian_vector(rng, 32, 0.05)));
      std::vector<RawToken> list;
      for (const auto& w : split_words(occ[i])) {
        std::mt19937_64 word_rng(std::hash<std::string>{}(w));
        list.push_back({w, add(gaussian_vector(word_rng, 8, 1.0), gaussian_vector(rng, 8, 0.1))});
      }
      toks.push_back(std::move(list));
    }
    const auto base = (dir / opts.languages[l]).string();
    write_lines(base + ".txt", lines);
    write_vectors(base + ".reprs.json", rows);
    write_tokens(base + ".tokens.json", toks);
    opts.sentences.push_back(base + ".txt");
    opts.reprs.push_back(base + ".reprs.json");
    opts.tokens.push_back(base + ".tokens.json");
  }
  return opts;
}

// --- planted cosine distances -------------------------------------------------

/// 10 groups x 3 languages x 6 layers. Each language vector lies at an
/// angle in a group-specific plane, so the cosine distance of a pair is
/// exactly 1 - cos(angle difference). Divergent pairs are planted at
/// chosen (group, layer) cells.
struct PlantedLinks {
  static constexpr std::size_t kGroups = 10;
  static constexpr std::size_t kLayers = 6;
  static constexpr std::size_t kDim = 12;
  inline static const std::vector<std::string> kLangs{"en", "es", "fr"};

  // angle[layer][group][lang]
  std::vector<std::vector<std::vector<double>>> angle;

  PlantedLinks() : angle(kLayers, std::vector<std::vector<double>>(kGroups, {0.0, 0.25, 0.5})) {
    angle[2][1] = {0.0, 0.3, 2.6};   // fr far from both
    angle[2][4] = {0.0, 2.2, 2.4};   // en far from both
    angle[2][7] = {0.0, 1.9, 0.1};   // es far from both
    angle[0][3] = {0.0, 0.2, 1.75};  // en-fr only
    angle[5][9] = {0.0, 3.0, 0.1};   // es far from both
  }

  double expected_distance(std::size_t layer, std::size_t group, std::size_t a, std::size_t b) const {
    return 1.0 - std::cos(angle[layer][group][a] - angle[layer][group][b]);
  }

  std::vector<double> vector(std::size_t layer, std::size_t group, std::size_t lang) const {
    std::vector<double> v(kDim, 0.0);
    const double r = 1.0 + 0.1 * static_cast<double>(lang);  // norms differ; cosine ignores them
    v[group % kDim] = r * std::cos(angle[layer][group][lang]);
    v[(group + 1) % kDim] = r * std::sin(angle[layer][group][lang]);
    return v;
  }

  /// Writes sentences, sentence vectors and layer stacks for the fixture.
  ProjectOptions write(const fs::path& dir) const {
    ProjectOptions opts;
    opts.languages = kLangs;
    std::mt19937_64 rng(3);
    for (std::size_t l = 0; l < kLangs.size(); ++l) {
      const auto base = (dir / kLangs[l]).string();
      std::vector<std::string> lines;
      std::vector<std::vector<double>> rows;
      for (std::size_t g = 0; g < kGroups; ++g) {
        lines.push_back(kLangs[l] + " sentence " + std::to_string(g));
        rows.push_back(add(vector(kLayers - 1, g, l), gaussian_vector(rng, kDim, 0.01)));
      }
      write_lines(base + ".txt", lines);
      write_vectors(base + ".reprs.json", rows);
      opts.sentences.push_back(base + ".txt");
      opts.reprs.push_back(base + ".reprs.json");
      std::vector<fs::path> files;
      for (std::size_t t = 0; t < kLayers; ++t) {
        std::vector<std::vector<double>> lrows;
        for (std::size_t g = 0; g < kGroups; ++g) lrows.push_back(vector(t, g, l));
        files.push_back(base + ".layer" + std::to_string(t) + ".json");
        write_vectors(files.back(), lrows);
      }
      opts.layers.push_back(files);
    }
    return opts;
  }
};

/// Writes a small multilingual corpus under `raw` and projects it into
/// `out` with few epochs. Returns the options used.
inline ProjectOptions build_small_dataset(const fs::path& raw, const fs::path& out, std::size_t sentences = 12,
                                          std::size_t layers = 2, bool with_tokens = true) {
  fs::create_directories(raw);
  auto opts = write_multilingual(raw, sentences, layers, 7, with_tokens);
  opts.out = out;
  opts.umap.layout.n_epochs = 30;
  run_project(opts);
  return opts;
}

/// Reads a whole file as bytes.
inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- command line ------------------------------------------------------------

inline std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

/// Command-line arguments equivalent to `opts` (without --out).
inline std::string cli_args(const ProjectOptions& opts) {
  std::string args = " --langs ";
  for (std::size_t i = 0; i < opts.languages.size(); ++i) args += (i ? "," : "") + opts.languages[i];
  args += " --sentences";
  for (const auto& p : opts.sentences) args += " " + quote(p);
  args += " --reprs";
  for (const auto& p : opts.reprs) args += " " + quote(p);
  if (!opts.tokens.empty()) {
    args += " --tokens";
    for (const auto& p : opts.tokens) args += " " + quote(p);
  }
  if (!opts.layers.empty()) {
    args += " --layers";
    for (const auto& list : opts.layers) {
      std::string joined;
      for (const auto& p : list) joined += (joined.empty() ? "" : ",") + p.string();
      args += " '" + joined + "'";
    }
  }
  return args;
}

#ifdef EMBSCOPE_CLI
/// Runs the command-line tool with output discarded; returns its exit code.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(EMBSCOPE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

inline std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = testing::slurp(e.path());
  return out;
}

}  // namespace embscope::testing
