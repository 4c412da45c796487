#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "embscope/dataset.hpp"
#include "embscope/error.hpp"
#include "embscope/linkage.hpp"
#include "embscope/model.hpp"
#include "embscope/query.hpp"
#include "embscope/reduce/umap.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that breaks Eigen headers.
#include <httplib.h>

namespace embscope {

struct ServerConfig {
  std::filesystem::path data_root;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t suggest_limit = kDefaultSuggestLimit;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

using QueryParams = std::map<std::string, std::string>;

// --- JSON views of query results -------------------------------------------

inline nlohmann::ordered_json to_json(const DistanceLink& link) {
  return {{"gid", link.gid},           {"lang_a", link.lang_a},     {"lang_b", link.lang_b},
          {"layer", link.layer},       {"distance", link.distance}, {"is_max_pair", link.is_max_pair}};
}

inline nlohmann::ordered_json to_json(const Selection& sel) {
  nlohmann::ordered_json members = nlohmann::ordered_json::array();
  for (const auto& m : sel.members) {
    nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
    for (const auto& t : m.tokens) tokens.push_back({{"t", t.t}, {"xy", {t.xy[0], t.xy[1]}}});
    members.push_back({{"language", m.language}, {"sentence", m.sentence}, {"tokens", std::move(tokens)}});
  }
  return {{"gid", sel.gid}, {"members", std::move(members)}};
}

inline nlohmann::ordered_json to_json(const TokenRef& t) {
  return {{"language", t.language}, {"sentence", t.sentence}, {"position", t.position},
          {"t", t.t},               {"xy", {t.xy[0], t.xy[1]}}};
}

inline nlohmann::ordered_json to_json(const Suggestion& s) { return {{"text", s.text}, {"id", s.id}}; }

inline nlohmann::ordered_json manifest_summary(const DatasetManifest& m) {
  return {{"id", m.id},
          {"name", m.name},
          {"languages", m.languages},
          {"sentence_count", m.sentence_count},
          {"layer_count", m.layer_count},
          {"granularities", m.granularities}};
}

/// Read-only request router over immutable dataset snapshots. Safe to call
/// from concurrent request threads.
class Api {
 public:
  explicit Api(std::vector<std::shared_ptr<const Dataset>> datasets,
               std::size_t suggest_limit = kDefaultSuggestLimit)
      : suggest_limit_(suggest_limit) {
    for (auto& ds : datasets) {
      Entry entry{ds, {}};
      for (const auto& [lang, doc] : ds->multiscale) entry.suggest.emplace(lang, SuggestIndex(doc));
      entries_.emplace(ds->manifest.id, std::move(entry));
    }
  }

  static Api from_data_root(const std::filesystem::path& root, std::size_t suggest_limit = kDefaultSuggestLimit) {
    return Api(load_data_root(root), suggest_limit);
  }

  std::size_t dataset_count() const noexcept { return entries_.size(); }

  /// Routes `GET path?params`. Never throws.
  ApiResponse handle(std::string_view path, const QueryParams& params) const {
    try {
      return route(path, params);
    } catch (const HttpError& e) {
      return error(e.status, e.what());
    } catch (const ValidationError& e) {
      return error(400, e.what());
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }

 private:
  struct Entry {
    std::shared_ptr<const Dataset> dataset;
    std::map<std::string, SuggestIndex> suggest;
  };

  struct HttpError : std::runtime_error {
    HttpError(int s, const std::string& msg) : std::runtime_error(msg), status(s) {}
    int status;
  };

  static ApiResponse ok(const nlohmann::ordered_json& body) { return {200, body.dump()}; }

  static ApiResponse error(int status, const std::string& message) {
    nlohmann::ordered_json body = {{"error", {{"status", status}, {"message", message}}}};
    return {status, body.dump()};
  }

  static std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
      const auto slash = path.find('/');
      const auto part = path.substr(0, slash);
      if (!part.empty()) parts.push_back(part);
      if (slash == std::string_view::npos) break;
      path.remove_prefix(slash + 1);
    }
    return parts;
  }

  static std::optional<std::string> param(const QueryParams& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  }

  static std::string required(const QueryParams& params, const std::string& key) {
    auto v = param(params, key);
    if (!v) throw HttpError(400, "missing query parameter '" + key + "'");
    return *v;
  }

  static std::size_t parse_index(std::string_view text, const std::string& key) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
      throw HttpError(400, "parameter '" + key + "' must be a non-negative integer");
    }
    return value;
  }

  static double parse_real(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (text.empty() || used != text.size() || !std::isfinite(value)) {
      throw HttpError(400, "parameter '" + key + "' must be a finite number");
    }
    return value;
  }

  const Entry& dataset(std::string_view id) const {
    const auto it = entries_.find(std::string(id));
    if (it == entries_.end()) throw HttpError(404, "unknown dataset '" + std::string(id) + "'");
    return it->second;
  }

  static std::string language(const Dataset& ds, const QueryParams& params) {
    auto lang = required(params, "lang");
    if (!ds.has_language(lang)) {
      throw HttpError(404, "dataset '" + ds.manifest.id + "' has no language '" + lang + "'");
    }
    return lang;
  }

  static std::size_t sentence_param(const Dataset& ds, std::string_view text, const std::string& key) {
    const auto id = parse_index(text, key);
    if (id >= ds.manifest.sentence_count) {
      throw HttpError(400, "sentence id " + std::to_string(id) + " out of range [0, " +
                               std::to_string(ds.manifest.sentence_count) + ")");
    }
    return id;
  }

  ApiResponse route(std::string_view path, const QueryParams& params) const {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "datasets" || parts.size() > 4) {
      throw HttpError(404, "no route for '" + std::string(path) + "'");
    }
    if (parts.size() == 2) {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& [id, entry] : entries_) list.push_back(manifest_summary(entry.dataset->manifest));
      return ok(list);
    }
    const auto& entry = dataset(parts[2]);
    const Dataset& ds = *entry.dataset;
    if (parts.size() == 3) return ok(to_json(ds.manifest));

    const auto view = parts[3];
    if (view == "multiscale") return ok(to_json(ds.multiscale.at(language(ds, params))));
    if (view == "layers") {
      const auto lang = language(ds, params);
      const auto it = ds.layers.find(lang);
      if (it == ds.layers.end()) throw HttpError(404, "dataset '" + ds.manifest.id + "' has no layer data");
      return ok(to_json(it->second));
    }
    if (view == "selection") {
      const auto lang = language(ds, params);
      const auto id = sentence_param(ds, required(params, "sentence"), "sentence");
      return ok(to_json(select_sentence(ds, lang, id)));
    }
    if (view == "brush") {
      const auto lang = language(ds, params);
      std::set<std::size_t> ids;
      const std::string raw = param(params, "ids").value_or("");
      std::string_view rest = raw;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        ids.insert(sentence_param(ds, rest.substr(0, comma), "ids"));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
        if (rest.empty()) throw HttpError(400, "parameter 'ids' has a trailing comma");
      }
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& t : brush(ds, lang, ids)) list.push_back(to_json(t));
      return ok(list);
    }
    if (view == "links") {
      const auto layer = parse_index(required(params, "layer"), "layer");
      if (layer >= ds.manifest.layer_count) {
        throw HttpError(400, "layer " + std::to_string(layer) + " out of range [0, " +
                                 std::to_string(ds.manifest.layer_count) + ")");
      }
      const auto t = param(params, "threshold");
      const double threshold = t ? parse_real(*t, "threshold") : kDefaultLinkThreshold;
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& link : ds.links.links(layer, threshold)) list.push_back(to_json(link));
      return ok(list);
    }
    if (view == "suggest") {
      const auto lang = language(ds, params);
      const auto q = required(params, "q");
      const auto l = param(params, "limit");
      const std::size_t limit = l ? parse_index(*l, "limit") : suggest_limit_;
      if (limit < 1) throw HttpError(400, "parameter 'limit' must be at least 1");
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& s : entry.suggest.at(lang).suggest(q, limit)) list.push_back(to_json(s));
      return ok(list);
    }
    throw HttpError(404, "no route for '" + std::string(path) + "'");
  }

  std::map<std::string, Entry> entries_;
  std::size_t suggest_limit_;
};

/// HTTP front end for an Api. bind() then listen(); stop() from another
/// thread ends listen().
class Server {
 public:
  Server(std::shared_ptr<const Api> api, std::string host)
      : api_(std::move(api)), host_(std::move(host)) {
    // No SO_REUSEPORT, so a port held by another server fails to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    server_.Get(R"(/api(/.*)?)", [api = api_](const httplib::Request& req, httplib::Response& res) {
      QueryParams params;
      for (const auto& [k, v] : req.params) params.emplace(k, v);  // first value wins
      const auto out = api->handle(req.path, params);
      res.status = out.status;
      res.set_content(out.body, "application/json; charset=utf-8");
    });
  }

  /// Binds the port (0 picks a free one) and returns it.
  int bind(int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host_) : (server_.bind_to_port(host_, port) ? port : -1);
    if (bound < 0) throw Error("cannot bind " + host_ + ":" + std::to_string(port) + " (port in use?)");
    return bound;
  }

  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  std::shared_ptr<const Api> api_;
  std::string host_;
  httplib::Server server_;
};

}  // namespace embscope
