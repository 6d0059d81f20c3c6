#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biblionet/corpus.hpp"
#include "biblionet/network.hpp"
#include "biblionet/result_cache.hpp"
#include "biblionet/text.hpp"
#include "biblionet/themes.hpp"

namespace httplib {
class Server;
}

namespace biblionet {

struct ServiceConfig {
  std::filesystem::path corpus_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> gazetteer_path;
  bool drop_invalid = false;
  std::size_t cache_capacity = 0;  // 0 keeps every entry
  int layout_iterations = 300;
};

/// Applies BIBLIONET_PORT when set. Throws InvalidArgument on a bad value.
void apply_environment(ServiceConfig& config);

/// Endpoint name plus parameters in canonical form.
struct AnalysisRequest {
  std::string endpoint;
  std::map<std::string, std::string> params;
};

/// Injective encoding of (request, snapshot version).
std::string cache_key(const AnalysisRequest& request, std::uint64_t snapshot_version);

/// Everything a request can read. Never modified once published.
struct CorpusSnapshot {
  Corpus corpus;
  std::vector<Lexicon> lexicons;
  std::optional<Gazetteer> gazetteer;
  std::uint64_t version = 0;
};

/// Loads, validates and prepares a snapshot from the configured files.
/// Throws Error when loading fails or the corpus has violations and
/// `drop_invalid` is unset.
CorpusSnapshot load_snapshot(const ServiceConfig& config);

struct HttpResponse {
  int status = 200;
  std::string body;
};

using QueryParams = std::multimap<std::string, std::string>;

/// Transport-independent request handling over an atomically swapped
/// snapshot. Responses are pure functions of (snapshot, canonical
/// parameters, configured seed).
class AnalysisService {
 public:
  explicit AnalysisService(ServiceConfig config);

  const ServiceConfig& config() const { return config_; }

  /// Loads the configured files into a new snapshot and publishes it.
  /// On failure the current snapshot stays in place and the error propagates.
  std::uint64_t reload();

  /// Publishes an in-memory snapshot (tests and embedding).
  std::uint64_t install(Corpus corpus, std::vector<Lexicon> lexicons = {},
                        std::optional<Gazetteer> gazetteer = std::nullopt);

  std::shared_ptr<const CorpusSnapshot> snapshot() const;

  HttpResponse handle(std::string_view method, std::string_view path, const QueryParams& query,
                      bool from_loopback = true);

  std::size_t cached_responses() const { return responses_.size(); }
  std::uint64_t cache_hits() const { return responses_.hits(); }

 private:
  struct NetworkModel {
    KeywordGraph graph;
    CommunityHierarchy hierarchy;
    LayoutPositions positions;
  };

  std::uint64_t publish(CorpusSnapshot snapshot);
  std::shared_ptr<const ThemeModel> theme_model(const CorpusSnapshot& snap, std::size_t k);
  std::shared_ptr<const NetworkModel> network_model(const CorpusSnapshot& snap, Scope scope,
                                                    std::uint64_t min_weight);
  std::string compute(const CorpusSnapshot& snap, const AnalysisRequest& request);

  ServiceConfig config_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const CorpusSnapshot> snapshot_;
  std::mutex reload_mutex_;
  std::uint64_t last_version_ = 0;

  ResultCache<std::string> responses_;
  ResultCache<std::shared_ptr<const ThemeModel>> theme_models_;
  ResultCache<std::shared_ptr<const NetworkModel>> network_models_;
};

/// HTTP front end for an AnalysisService.
class HttpServer {
 public:
  explicit HttpServer(AnalysisService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port and
  /// throws Error when the port is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires a successful bind().
  void run();
  void stop();
  bool running() const;

 private:
  AnalysisService& service_;
  std::unique_ptr<httplib::Server> server_;
};

/// Loads the corpus, binds and serves until the process stops. Throws Error
/// when the corpus cannot be loaded or the port is busy.
void serve(const ServiceConfig& config);

}  // namespace biblionet
