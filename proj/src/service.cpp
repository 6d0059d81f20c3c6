#include "biblionet/service.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>

#include "httplib.h"

#include "biblionet/error.hpp"
#include "biblionet/exports.hpp"
#include "biblionet/geo.hpp"

namespace biblionet {

void apply_environment(ServiceConfig& config) {
  const char* port = std::getenv("BIBLIONET_PORT");
  if (port == nullptr || *port == '\0') return;
  const std::string_view value(port);
  int parsed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc{} || ptr != value.data() + value.size() || parsed < 0 || parsed > 65535) {
    throw InvalidArgument("BIBLIONET_PORT", "'" + std::string(value) + "' is not a port number");
  }
  config.port = parsed;
}

namespace {

// Percent-escapes the separators used by cache keys.
std::string escape_key_part(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (c == '%' || c == '&' || c == '=' || c == '|') {
      static constexpr char hex[] = "0123456789ABCDEF";
      out += '%';
      out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
      out += hex[static_cast<unsigned char>(c) & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string cache_key(const AnalysisRequest& request, std::uint64_t snapshot_version) {
  std::string key = "v" + std::to_string(snapshot_version) + "|" + escape_key_part(request.endpoint) + "|";
  bool first = true;
  for (const auto& [name, value] : request.params) {
    if (!first) key += '&';
    first = false;
    key += escape_key_part(name);
    key += '=';
    key += escape_key_part(value);
  }
  return key;
}

CorpusSnapshot load_snapshot(const ServiceConfig& config) {
  CorpusSnapshot snap;
  snap.corpus = load_corpus(config.corpus_path);
  const auto report = validate_corpus(snap.corpus);
  if (!report.empty()) {
    if (!config.drop_invalid) {
      throw Error("corpus has " + std::to_string(report.size()) + " violation(s), first: " +
                  report.front().id + " " + report.front().rule + " (" + report.front().detail +
                  "); use --drop-invalid to skip offending records");
    }
    snap.corpus = drop_invalid(snap.corpus, report);
  }
  if (config.lexicon_path) snap.lexicons = load_lexicons(*config.lexicon_path);
  if (config.gazetteer_path) {
    snap.gazetteer = load_gazetteer(*config.gazetteer_path);
    snap.corpus = with_detected_studied(snap.corpus, *snap.gazetteer);
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Request canonicalization

namespace {

struct RequestError {
  int status;
  std::string code;
  std::string message;
  std::string parameter;
};

std::string error_body(const RequestError& e) {
  Json err;
  err["code"] = e.code;
  err["message"] = e.message;
  if (!e.parameter.empty()) err["parameter"] = e.parameter;
  return Json{{"error", std::move(err)}}.dump();
}

RequestError bad_parameter(const std::string& name, const std::string& message) {
  return {400, "invalid_parameter", name + ": " + message, name};
}

class ParamReader {
 public:
  ParamReader(const QueryParams& query, std::initializer_list<std::string_view> allowed) {
    for (const auto& [name, value] : query) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        throw bad_parameter(name, "unknown parameter");
      }
      if (!values_.emplace(name, value).second) throw bad_parameter(name, "given more than once");
    }
  }

  std::optional<std::string> text(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<long long> integer(const std::string& name, long long min, long long max) const {
    const auto raw = text(name);
    if (!raw) return std::nullopt;
    long long value = 0;
    const auto* begin = raw->data();
    const auto* end = begin + raw->size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (raw->empty() || ec != std::errc{} || ptr != end) {
      throw bad_parameter(name, "'" + *raw + "' is not an integer");
    }
    if (value < min || value > max) {
      throw bad_parameter(name, "must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    }
    return value;
  }

  std::string choice(const std::string& name, std::initializer_list<std::string_view> options,
                     std::string_view fallback) const {
    const auto raw = text(name);
    if (!raw) return std::string(fallback);
    if (std::find(options.begin(), options.end(), *raw) == options.end()) {
      std::string list;
      for (const auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
      throw bad_parameter(name, "expected one of " + list);
    }
    return *raw;
  }

 private:
  std::map<std::string, std::string> values_;
};

constexpr long long kMaxCount = 1'000'000;

AnalysisRequest canonicalize(std::string_view path, const QueryParams& query,
                             const CorpusSnapshot& snap) {
  AnalysisRequest req;
  if (path == "/api/summary") {
    ParamReader params(query, {});
    req.endpoint = "summary";
  } else if (path == "/api/geo/activity") {
    ParamReader params(query, {"from", "to"});
    req.endpoint = "geo/activity";
    const long long from = params.integer("from", -100000, 100000)
                               .value_or(snap.corpus.min_year().value_or(kMinYear));
    const long long to =
        params.integer("to", -100000, 100000).value_or(snap.corpus.max_year().value_or(kMaxYear));
    if (from > to) throw bad_parameter("from", "must not exceed 'to'");
    req.params = {{"from", std::to_string(from)}, {"to", std::to_string(to)}};
  } else if (path == "/api/geo/classes") {
    ParamReader params(query, {"k", "role", "columns", "themesK"});
    req.endpoint = "geo/classes";
    const auto k = params.integer("k", 1, kMaxCount);
    req.params["k"] = k ? std::to_string(*k) : "auto";
    req.params["role"] = params.choice("role", {"studied", "affiliation"}, "studied");
    req.params["columns"] = params.choice("columns", {"lexicons", "themes"}, "lexicons");
    if (req.params["columns"] == "themes") {
      req.params["themesK"] = std::to_string(
          params.integer("themesK", 1, kMaxCount).value_or(static_cast<long long>(kDefaultThemeCount)));
    } else if (params.text("themesK")) {
      throw bad_parameter("themesK", "only valid with columns=themes");
    }
  } else if (path == "/api/network") {
    ParamReader params(query, {"scope", "minWeight", "level"});
    req.endpoint = "network";
    req.params["scope"] = params.choice("scope", {"seed", "neighborhood"}, "seed");
    req.params["minWeight"] = std::to_string(params.integer("minWeight", 1, kMaxCount).value_or(1));
    req.params["level"] = std::to_string(params.integer("level", 0, kMaxCount).value_or(0));
  } else if (path == "/api/themes") {
    ParamReader params(query, {"k", "top"});
    req.endpoint = "themes";
    req.params["k"] = std::to_string(
        params.integer("k", 1, kMaxCount).value_or(static_cast<long long>(kDefaultThemeCount)));
    req.params["top"] = std::to_string(params.integer("top", 0, kMaxCount).value_or(50));
  } else if (path.rfind("/api/themes/", 0) == 0 && path.size() > 18 &&
             path.substr(path.size() - 6) == "/cloud") {
    const auto id_text = path.substr(12, path.size() - 18);
    std::size_t id = 0;
    const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (id_text.empty() || ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
      throw RequestError{404, "unknown_theme", "theme id '" + std::string(id_text) + "' is not a number", "id"};
    }
    ParamReader params(query, {"k", "top"});
    req.endpoint = "themes/cloud";
    req.params["id"] = std::to_string(id);
    req.params["k"] = std::to_string(
        params.integer("k", 1, kMaxCount).value_or(static_cast<long long>(kDefaultThemeCount)));
    req.params["top"] = std::to_string(params.integer("top", 0, kMaxCount).value_or(50));
  } else {
    throw RequestError{404, "not_found", "no endpoint at '" + std::string(path) + "'", ""};
  }
  return req;
}

bool is_get_endpoint(std::string_view path) {
  return path == "/api/summary" || path == "/api/geo/activity" || path == "/api/geo/classes" ||
         path == "/api/network" || path.rfind("/api/themes", 0) == 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalysisService

AnalysisService::AnalysisService(ServiceConfig config)
    : config_(std::move(config)),
      responses_(config_.cache_capacity),
      theme_models_(config_.cache_capacity),
      network_models_(config_.cache_capacity) {}

std::uint64_t AnalysisService::publish(CorpusSnapshot snapshot) {
  std::lock_guard reload_lock(reload_mutex_);
  snapshot.version = ++last_version_;
  auto next = std::make_shared<const CorpusSnapshot>(std::move(snapshot));
  {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = next;
  }
  responses_.clear();
  theme_models_.clear();
  network_models_.clear();
  return next->version;
}

std::uint64_t AnalysisService::reload() { return publish(load_snapshot(config_)); }

std::uint64_t AnalysisService::install(Corpus corpus, std::vector<Lexicon> lexicons,
                                       std::optional<Gazetteer> gazetteer) {
  CorpusSnapshot snap;
  snap.corpus = gazetteer ? with_detected_studied(corpus, *gazetteer) : std::move(corpus);
  snap.lexicons = std::move(lexicons);
  snap.gazetteer = std::move(gazetteer);
  return publish(std::move(snap));
}

std::shared_ptr<const CorpusSnapshot> AnalysisService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

std::shared_ptr<const ThemeModel> AnalysisService::theme_model(const CorpusSnapshot& snap,
                                                               std::size_t k) {
  const std::string key = cache_key({"themes-model", {{"k", std::to_string(k)}}}, snap.version);
  return theme_models_.get_or_compute(key, [&] {
    return std::make_shared<const ThemeModel>(extract_themes(snap.corpus, k, config_.seed));
  });
}

std::shared_ptr<const AnalysisService::NetworkModel> AnalysisService::network_model(
    const CorpusSnapshot& snap, Scope scope, std::uint64_t min_weight) {
  const std::string key = cache_key(
      {"network-model", {{"scope", std::string(to_string(scope))}, {"minWeight", std::to_string(min_weight)}}},
      snap.version);
  return network_models_.get_or_compute(key, [&] {
    NetworkModel model;
    model.graph = build_cooccurrence(snap.corpus, scope, min_weight);
    if (model.graph.node_count() > 0) {
      model.hierarchy = detect_communities(model.graph, config_.seed);
      model.positions = layout(model.graph, config_.seed, config_.layout_iterations);
    }
    return std::make_shared<const NetworkModel>(std::move(model));
  });
}

std::string AnalysisService::compute(const CorpusSnapshot& snap, const AnalysisRequest& req) {
  const auto& p = req.params;
  if (req.endpoint == "summary") return summary_json(snap.corpus).dump();

  if (req.endpoint == "geo/activity") {
    const PeriodFilter period{std::stoi(p.at("from")), std::stoi(p.at("to"))};
    return activity_json(country_activity(snap.corpus, period)).dump();
  }

  if (req.endpoint == "geo/classes") {
    const auto role = *parse_role(p.at("role"));
    ContingencyTable table;
    if (p.at("columns") == "themes") {
      table = build_theme_contingency(snap.corpus, *theme_model(snap, std::stoul(p.at("themesK"))), role);
    } else {
      if (snap.lexicons.empty()) {
        throw RequestError{400, "missing_lexicons", "no lexicon file configured", "columns"};
      }
      table = build_contingency(snap.corpus, snap.lexicons, role);
    }
    const auto trimmed = table.without_empty();
    const std::size_t k = p.at("k") == "auto" ? std::min<std::size_t>(4, trimmed.rows().size())
                                              : std::stoul(p.at("k"));
    const auto classification = classify_countries(trimmed, k);
    const auto residuals = representation_residuals(trimmed);
    auto doc = classification_json(country_activity(snap.corpus, PeriodFilter{}), trimmed,
                                   residuals, classification, role);
    for (const auto& row : table.rows()) {
      if (std::find(trimmed.rows().begin(), trimmed.rows().end(), row) == trimmed.rows().end()) {
        doc["excluded"].push_back(row);
      }
    }
    return doc.dump();
  }

  if (req.endpoint == "network") {
    const auto model = network_model(snap, *parse_scope(p.at("scope")), std::stoull(p.at("minWeight")));
    if (model->graph.node_count() == 0) {
      Json doc = graph_json(model->graph, {}, {});
      doc["level"] = 0;
      doc["levels"] = 0;
      doc["modularity"] = nullptr;
      return doc.dump();
    }
    const std::size_t level = std::min<std::size_t>(std::stoull(p.at("level")), model->hierarchy.coarsest());
    Json doc = graph_json(model->graph, cut_level(model->hierarchy, level), model->positions);
    doc["level"] = level;
    doc["levels"] = model->hierarchy.level_count();
    doc["modularity"] = model->hierarchy.modularity[level];
    return doc.dump();
  }

  if (req.endpoint == "themes") {
    return themes_json(*theme_model(snap, std::stoul(p.at("k"))), std::stoul(p.at("top"))).dump();
  }

  if (req.endpoint == "themes/cloud") {
    const auto model = theme_model(snap, std::stoul(p.at("k")));
    const auto id = std::stoul(p.at("id"));
    if (id >= model->themes.size()) {
      throw RequestError{404, "unknown_theme",
                         "theme " + std::to_string(id) + " does not exist for k=" + p.at("k"), "id"};
    }
    return word_cloud_json(word_cloud(*model, id, std::stoul(p.at("top")))).dump();
  }
  throw RequestError{404, "not_found", "unknown endpoint", ""};
}

HttpResponse AnalysisService::handle(std::string_view method, std::string_view path,
                                     const QueryParams& query, bool from_loopback) {
  try {
    if (path == "/api/admin/reload") {
      if (method != "POST") throw RequestError{405, "method_not_allowed", "use POST", ""};
      if (!from_loopback) {
        throw RequestError{403, "forbidden", "reload is only accepted from the local host", ""};
      }
      if (!query.empty()) throw bad_parameter(query.begin()->first, "unknown parameter");
      std::uint64_t version = 0;
      try {
        version = reload();
      } catch (const std::exception& e) {
        throw RequestError{500, "reload_failed", e.what(), ""};
      }
      return {200, Json{{"version", version}}.dump()};
    }
    if (!is_get_endpoint(path)) {
      throw RequestError{404, "not_found", "no endpoint at '" + std::string(path) + "'", ""};
    }
    if (method != "GET") throw RequestError{405, "method_not_allowed", "use GET", ""};

    const auto snap = snapshot();
    if (!snap) throw RequestError{503, "corpus_not_loaded", "no corpus is loaded", ""};
    const auto request = canonicalize(path, query, *snap);
    const auto key = cache_key(request, snap->version);
    return {200, responses_.get_or_compute(key, [&] { return compute(*snap, request); })};
  } catch (const RequestError& e) {
    return {e.status, error_body(e)};
  } catch (const InvalidArgument& e) {
    return {400, error_body({400, "invalid_parameter", e.what(), e.parameter()})};
  } catch (const std::exception& e) {
    return {500, error_body({500, "internal_error", e.what(), ""})};
  }
}

// ---------------------------------------------------------------------------
// HTTP transport

namespace {

bool is_loopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr.rfind("::ffff:127.", 0) == 0 ||
         addr.rfind("127.", 0) == 0;
}

}  // namespace

HttpServer::HttpServer(AnalysisService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const QueryParams query(req.params.begin(), req.params.end());
    const auto out = service_.handle(req.method, req.path, query, is_loopback(req.remote_addr));
    res.status = out.status;
    res.set_content(out.body, "application/json; charset=utf-8");
  };
  // SO_REUSEPORT (httplib's default) would let a second server share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  server_->Get(R"(/.*)", handler);
  server_->Post(R"(/.*)", handler);
}

HttpServer::~HttpServer() {
  if (server_->is_running()) server_->stop();
}

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host + " on any port");
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
  }
  return port;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

bool HttpServer::running() const { return server_->is_running(); }

void serve(const ServiceConfig& config) {
  AnalysisService service(config);
  const auto version = service.reload();
  HttpServer server(service);
  const int port = server.bind(config.host, config.port);
  std::cerr << "biblionet: serving " << config.corpus_path.string() << " (snapshot " << version
            << ", " << service.snapshot()->corpus.size() << " papers) on http://" << config.host
            << ":" << port << "\n";
  server.run();
}

}  // namespace biblionet
