#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embscope/detail/json_io.hpp"
#include "embscope/detail/utf8.hpp"
#include "embscope/error.hpp"

namespace embscope {

/// Sentences of one language, in file order. The line index is the
/// alignment key across languages.
struct RawCorpus {
  std::string language;
  std::vector<std::string> sentences;

  std::size_t size() const noexcept { return sentences.size(); }
  bool operator==(const RawCorpus&) const = default;
};

/// Dense row-major n x d matrix of finite reals, n >= 1, d >= 2.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ < 1) throw ValidationError("", "embedding matrix needs at least one row");
    if (cols_ < 2) throw ValidationError("", "embedding dimension must be at least 2");
    if (values_.size() != rows_ * cols_) {
      throw ValidationError("", "embedding matrix storage does not match its shape");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw ValidationError("", "non-finite value at row " + std::to_string(i / cols_) +
                                      ", column " + std::to_string(i % cols_));
      }
    }
  }

  /// Builds from nested rows; all rows must have the same length.
  static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("", "embedding matrix needs at least one row");
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) {
        throw ValidationError("", "ragged row " + std::to_string(i) + ": expected " +
                                      std::to_string(d) + " values, found " +
                                      std::to_string(rows[i].size()));
      }
      values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return EmbeddingMatrix(rows.size(), d, std::move(values));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Stacks matrices of equal width vertically, in order.
inline EmbeddingMatrix concat_rows(std::span<const EmbeddingMatrix> parts) {
  if (parts.empty()) throw ValidationError("", "nothing to concatenate");
  const std::size_t d = parts.front().cols();
  std::size_t n = 0;
  std::vector<double> values;
  for (const auto& part : parts) {
    if (part.cols() != d) throw ValidationError("", "cannot stack matrices of different widths");
    n += part.rows();
    values.insert(values.end(), part.values().begin(), part.values().end());
  }
  return EmbeddingMatrix(n, d, std::move(values));
}

struct TokenVector {
  std::string surface;
  std::vector<double> vector;
  bool operator==(const TokenVector&) const = default;
};

/// Per-sentence token lists. Surfaces come from the token file verbatim.
struct TokenEmbeddingSet {
  std::vector<std::vector<TokenVector>> sentences;
  std::size_t dim = 0;

  std::size_t size() const noexcept { return sentences.size(); }
  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
  /// All token vectors, sentence-major.
  EmbeddingMatrix matrix() const {
    std::vector<double> values;
    values.reserve(token_count() * dim);
    for (const auto& s : sentences) {
      for (const auto& t : s) values.insert(values.end(), t.vector.begin(), t.vector.end());
    }
    return EmbeddingMatrix(token_count(), dim, std::move(values));
  }
  bool operator==(const TokenEmbeddingSet&) const = default;
};

/// One sentence index per language; with line alignment gid == index.
struct ParallelGroup {
  std::size_t gid = 0;
  std::map<std::string, std::size_t> members;
  bool operator==(const ParallelGroup&) const = default;
};

/// Per-layer high-dimensional representations of one language's sentences.
struct LayerStack {
  std::string language;
  std::vector<EmbeddingMatrix> layers;

  std::size_t layer_count() const noexcept { return layers.size(); }
  std::size_t rows() const noexcept { return layers.empty() ? 0 : layers.front().rows(); }
};

/// Language codes double as file-name components.
inline void validate_language_code(std::string_view code) {
  const bool ok = !code.empty() && std::all_of(code.begin(), code.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
  if (!ok) {
    throw ValidationError("language", "invalid language code '" + std::string(code) +
                                          "' (letters, digits, '-' and '_' only)");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<double> read_vector(const json& node, const std::string& where,
                                       const std::string& source) {
  if (!node.is_array()) throw ValidationError(source, where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t c = 0; c < node.size(); ++c) {
    const auto& v = node[c];
    if (v.is_null()) {
      throw ValidationError(source, where + ": non-finite value at column " + std::to_string(c));
    }
    if (!v.is_number()) {
      throw ValidationError(source, where + ": value at column " + std::to_string(c) +
                                        " is not a number");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

/// Reads one sentence per line (LF or CRLF), trimming surrounding
/// whitespace. Blank lines and invalid UTF-8 are rejected with their
/// 1-based line number.
inline RawCorpus load_sentences(const std::filesystem::path& path, std::string language) {
  validate_language_code(language);
  std::string text = detail::read_file(path);
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  if (text.empty()) throw ValidationError(path.string(), "empty sentence file");

  RawCorpus corpus{std::move(language), {}};
  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!detail::is_valid_utf8(line)) throw ValidationError(where, "invalid UTF-8");
    line = detail::trim(line);
    if (line.empty()) throw ValidationError(where, "blank line");
    corpus.sentences.emplace_back(line);
  }
  return corpus;
}

/// Reads `{"vectors": [[...], ...]}`; row i belongs to sentence i.
inline EmbeddingMatrix load_sentence_embeddings(const std::filesystem::path& path,
                                                std::size_t expected_rows) {
  const std::string source = path.string();
  const auto doc = detail::parse_json_file(path);
  if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array()) {
    throw ValidationError(source, "$.vectors: expected an array of rows");
  }
  const auto& rows = doc["vectors"];
  if (rows.size() != expected_rows) {
    throw ValidationError(source, "row count mismatch: file has " + std::to_string(rows.size()) +
                                      " rows, corpus has " + std::to_string(expected_rows) +
                                      " sentences");
  }
  if (rows.empty()) throw ValidationError(source, "$.vectors: no rows");
  std::vector<double> values;
  std::size_t d = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "$.vectors[" + std::to_string(r) + "] (row " + std::to_string(r) + ")";
    auto row = detail::read_vector(rows[r], where, source);
    if (r == 0) {
      d = row.size();
      if (d < 2) throw ValidationError(source, where + ": embedding dimension must be at least 2");
      values.reserve(rows.size() * d);
    } else if (row.size() != d) {
      throw ValidationError(source, where + ": ragged row, expected " + std::to_string(d) +
                                        " values, found " + std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return EmbeddingMatrix(rows.size(), d, std::move(values));
}

/// Reads `{"sentences": [{"tokens": [{"t": "...", "v": [...]}, ...]}, ...]}`.
/// The token dimension may differ from the sentence-level dimension.
inline TokenEmbeddingSet load_token_embeddings(const std::filesystem::path& path,
                                               const RawCorpus& corpus) {
  const std::string source = path.string();
  const auto doc = detail::parse_json_file(path);
  if (!doc.is_object() || !doc.contains("sentences") || !doc["sentences"].is_array()) {
    throw ValidationError(source, "$.sentences: expected an array");
  }
  const auto& sentences = doc["sentences"];
  if (sentences.size() != corpus.size()) {
    throw ValidationError(source, "sentence count mismatch: file has " +
                                      std::to_string(sentences.size()) + " entries, corpus has " +
                                      std::to_string(corpus.size()));
  }
  TokenEmbeddingSet set;
  set.sentences.reserve(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const std::string base = "$.sentences[" + std::to_string(s) + "]";
    const auto& entry = sentences[s];
    if (!entry.is_object() || !entry.contains("tokens") || !entry["tokens"].is_array()) {
      throw ValidationError(source, base + ".tokens: expected an array");
    }
    const auto& tokens = entry["tokens"];
    if (tokens.empty()) throw ValidationError(source, base + ".tokens: empty token list");
    std::vector<TokenVector> list;
    list.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const std::string where = base + ".tokens[" + std::to_string(t) + "]";
      const auto& tok = tokens[t];
      if (!tok.is_object() || !tok.contains("t") || !tok["t"].is_string()) {
        throw ValidationError(source, where + ".t: expected a string");
      }
      if (!tok.contains("v")) throw ValidationError(source, where + ".v: missing");
      auto vec = detail::read_vector(tok["v"], where + ".v", source);
      if (set.dim == 0) {
        if (vec.size() < 2) {
          throw ValidationError(source, where + ".v: token dimension must be at least 2");
        }
        set.dim = vec.size();
      } else if (vec.size() != set.dim) {
        throw ValidationError(source, where + ".v: dimension " + std::to_string(vec.size()) +
                                          " differs from " + std::to_string(set.dim));
      }
      list.push_back({tok["t"].get<std::string>(), std::move(vec)});
    }
    set.sentences.push_back(std::move(list));
  }
  return set;
}

/// Reads one sentence-level representation document per layer, layer 0
/// first. All layers must share the row count and dimension.
inline LayerStack load_layer_stack(std::span<const std::filesystem::path> paths,
                                   std::string language, std::size_t expected_rows) {
  validate_language_code(language);
  if (paths.empty()) throw ValidationError(language, "layer stack needs at least one layer");
  LayerStack stack{std::move(language), {}};
  for (const auto& path : paths) {
    auto layer = load_sentence_embeddings(path, expected_rows);
    if (!stack.layers.empty() && layer.cols() != stack.layers.front().cols()) {
      throw ValidationError(path.string(), "layer dimension " + std::to_string(layer.cols()) +
                                               " differs from layer 0 dimension " +
                                               std::to_string(stack.layers.front().cols()));
    }
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

/// Line-index alignment: group g maps every language to sentence g.
inline std::vector<ParallelGroup> align_corpora(std::span<const RawCorpus> corpora) {
  if (corpora.size() < 2) throw ValidationError("align", "alignment needs at least 2 corpora");
  bool equal = true;
  std::string lengths;
  for (const auto& c : corpora) {
    equal = equal && c.size() == corpora.front().size();
    lengths += (lengths.empty() ? "" : ", ") + c.language + "=" + std::to_string(c.size());
  }
  if (!equal) throw ValidationError("align", "unequal sentence counts: " + lengths);
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    for (std::size_t j = i + 1; j < corpora.size(); ++j) {
      if (corpora[i].language == corpora[j].language) {
        throw ValidationError("align", "duplicate language '" + corpora[i].language + "'");
      }
    }
  }
  std::vector<ParallelGroup> groups(corpora.front().size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].gid = g;
    for (const auto& c : corpora) groups[g].members.emplace(c.language, g);
  }
  return groups;
}

}  // namespace embscope
