#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "embscope/dataset.hpp"
#include "embscope/detail/utf8.hpp"
#include "embscope/error.hpp"

namespace embscope {

inline constexpr std::size_t kMinSuggestChars = 2;
inline constexpr std::size_t kDefaultSuggestLimit = 10;

struct Suggestion {
  std::string text;
  std::size_t id = 0;
  bool operator==(const Suggestion&) const = default;
};

/// Sentences of one language sorted by case-folded text, then id.
class SuggestIndex {
 public:
  SuggestIndex() = default;

  explicit SuggestIndex(const MultiscaleDocument& doc) {
    entries_.reserve(doc.sentences.size());
    for (const auto& s : doc.sentences) entries_.push_back({detail::fold_case(s.text), s.text, s.id});
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.folded != b.folded ? a.folded < b.folded : a.id < b.id;
    });
  }

  std::size_t size() const noexcept { return entries_.size(); }

  /// Sentences whose folded text starts with the folded prefix, in
  /// lexicographic order. Empty below two characters.
  std::vector<Suggestion> suggest(std::string_view prefix, std::size_t limit = kDefaultSuggestLimit) const {
    if (limit < 1) throw ValidationError("limit", "must be at least 1");
    const std::string folded = detail::fold_case(prefix);
    if (detail::count_code_points(folded) < kMinSuggestChars) return {};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), folded,
                               [](const Entry& e, const std::string& p) { return e.folded < p; });
    std::vector<Suggestion> out;
    for (; it != entries_.end() && out.size() < limit && it->folded.starts_with(folded); ++it) {
      out.push_back({it->text, it->id});
    }
    return out;
  }

 private:
  struct Entry {
    std::string folded;
    std::string text;
    std::size_t id;
  };
  std::vector<Entry> entries_;
};

inline std::vector<Suggestion> suggest(const SuggestIndex& index, std::string_view prefix,
                                       std::size_t limit = kDefaultSuggestLimit) {
  return index.suggest(prefix, limit);
}

struct SelectionMember {
  std::string language;
  std::size_t sentence = 0;
  std::vector<TokenPoint> tokens;
  bool operator==(const SelectionMember&) const = default;
};

/// A sentence and its translations, with their token coordinates.
struct Selection {
  std::size_t gid = 0;
  std::vector<SelectionMember> members;  // manifest language order
  bool operator==(const Selection&) const = default;
};

/// One token occurrence; (language, sentence, position) identifies it.
struct TokenRef {
  std::string language;
  std::size_t sentence = 0;
  std::size_t position = 0;
  std::string t;
  Coord xy{};
  auto operator<=>(const TokenRef&) const = default;
};

namespace detail {

inline void check_query_language(const Dataset& ds, const std::string& language) {
  if (!ds.has_language(language)) throw ValidationError("lang", "unknown language '" + language + "'");
}

inline void check_sentence_id(const Dataset& ds, std::size_t id) {
  if (id >= ds.manifest.sentence_count) {
    throw ValidationError("sentence", "id " + std::to_string(id) + " out of range [0, " +
                                          std::to_string(ds.manifest.sentence_count) + ")");
  }
}

}  // namespace detail

/// Resolves the parallel group of a sentence. Alignment is by line index,
/// so the group id is the sentence id in every language.
inline Selection select_sentence(const Dataset& ds, const std::string& language, std::size_t sentence_id) {
  detail::check_query_language(ds, language);
  detail::check_sentence_id(ds, sentence_id);
  Selection sel{sentence_id, {}};
  for (const auto& lang : ds.manifest.languages) {
    const auto& sp = ds.multiscale.at(lang).sentences[sentence_id];
    sel.members.push_back({lang, sp.id, sp.tokens});
  }
  return sel;
}

/// Tokens of the brushed sentences and their translations, ordered by
/// manifest language, sentence, position. An empty brush yields every
/// token of the dataset.
inline std::vector<TokenRef> brush(const Dataset& ds, const std::string& language,
                                   const std::set<std::size_t>& sentence_ids) {
  detail::check_query_language(ds, language);
  for (auto id : sentence_ids) detail::check_sentence_id(ds, id);
  std::vector<TokenRef> out;
  for (const auto& lang : ds.manifest.languages) {
    const auto& doc = ds.multiscale.at(lang);
    const auto emit = [&](std::size_t s) {
      const auto& tokens = doc.sentences[s].tokens;
      for (std::size_t p = 0; p < tokens.size(); ++p) out.push_back({lang, s, p, tokens[p].t, tokens[p].xy});
    };
    if (sentence_ids.empty()) {
      for (std::size_t s = 0; s < doc.sentences.size(); ++s) emit(s);
    } else {
      for (auto s : sentence_ids) emit(s);
    }
  }
  return out;
}

}  // namespace embscope
