#include "coke/remote.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace coke {

using nlohmann::json;

namespace {

// httplib wants host and port split out of the base URL.
struct ParsedUrl {
  std::string host_port;  // scheme://host:port
};

ParsedUrl parse_base_url(const std::string& url) {
  if (url.empty()) throw ValidationError("remote backend: empty endpoint URL");
  std::string trimmed = url;
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
  return {trimmed};
}

}  // namespace

struct RemoteBackend::Impl {
  RemoteOptions options;
  httplib::Client client;

  explicit Impl(RemoteOptions opts)
      : options(std::move(opts)), client(parse_base_url(options.base_url).host_port) {
    client.set_connection_timeout(options.timeout_seconds, 0);
    client.set_read_timeout(options.timeout_seconds, 0);
  }

  json post(const std::string& endpoint, const json& body, bool allow_retry) {
    const std::string payload = body.dump();
    int attempts = allow_retry ? 2 : 1;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      auto res = client.Post(endpoint, payload, "application/json");
      if (!res) {
        last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status != 200) {
        throw BackendError("POST " + endpoint + " to " + options.base_url + ": HTTP " +
                           std::to_string(res->status) + " " + res->body.substr(0, 200));
      }
      json reply = json::parse(res->body, nullptr, false);
      if (reply.is_discarded()) {
        throw BackendError("POST " + endpoint + " to " + options.base_url +
                           ": response is not valid JSON");
      }
      if (options.wire_log) options.wire_log(endpoint, payload, res->body);
      return reply;
    }
    throw BackendError("POST " + endpoint + " to " + options.base_url + ": " + last_error);
  }
};

RemoteBackend::RemoteBackend(RemoteOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

RemoteBackend::~RemoteBackend() = default;

std::vector<CandidateRationale> RemoteBackend::generate(const std::string& story,
                                                        const std::string& aspect, std::size_t n,
                                                        std::uint64_t seed) {
  if (n < 1) throw ValidationError("generate: n must be >= 1");
  json body;
  body["aspect"] = aspect;
  body["story"] = story;
  body["n"] = n;
  body["seed"] = seed;
  body["temperature"] = impl_->options.temperature;

  const json reply = impl_->post("/v1/generate", body, impl_->options.retry_generate);
  if (!reply.contains("candidates") || !reply["candidates"].is_array()) {
    throw BackendError("generate(" + aspect + "): response lacks a candidates array");
  }
  const auto& arr = reply["candidates"];
  if (arr.size() != n) {
    throw BackendError("generate(" + aspect + "): asked for " + std::to_string(n) +
                       " candidates, server returned " + std::to_string(arr.size()));
  }
  std::vector<CandidateRationale> out;
  out.reserve(n);
  for (std::size_t j = 0; j < arr.size(); ++j) {
    const auto& item = arr[j];
    if (!item.is_object() || !item.contains("keywords") || !item["keywords"].is_array()) {
      throw BackendError("generate(" + aspect + "): candidate " + std::to_string(j) +
                         " lacks a keywords array");
    }
    CandidateRationale cand;
    cand.sample_index = j;
    cand.keywords.source = KeywordSource::generated;
    for (const auto& kw : item["keywords"]) {
      if (!kw.is_string()) {
        throw BackendError("generate(" + aspect + "): candidate " + std::to_string(j) +
                           " has a non-string keyword");
      }
      cand.keywords.items.push_back(kw.get<std::string>());
    }
    if (item.contains("rationale") && item["rationale"].is_string()) {
      cand.rationale_text = item["rationale"].get<std::string>();
    }
    out.push_back(std::move(cand));
  }
  return out;
}

ScoreResult RemoteBackend::score(const std::string& story, const std::string& aspect,
                                 const std::vector<std::string>& keywords) {
  json body;
  body["aspect"] = aspect;
  body["story"] = story;
  body["keywords"] = keywords;

  const json reply = impl_->post("/v1/score", body, false);
  ScoreResult result;
  if (reply.contains("distribution")) {
    const auto& dist = reply["distribution"];
    if (!dist.is_object()) {
      throw BackendError("score(" + aspect + "): distribution must be an object");
    }
    LikertDistribution d;
    for (int level = 1; level <= 5; ++level) {
      const std::string key = std::to_string(level);
      if (dist.contains(key)) {
        if (!dist[key].is_number()) {
          throw BackendError("score(" + aspect + "): distribution[" + key + "] is not a number");
        }
        d.p[static_cast<std::size_t>(level - 1)] = dist[key].get<double>();
      }
    }
    try {
      d.validate();
    } catch (const BackendError& e) {
      throw BackendError("score(" + aspect + "): " + e.what());
    }
    result.distribution = d;
    result.score = d.expectation();
    return result;
  }
  if (!reply.contains("score") || !reply["score"].is_number()) {
    throw BackendError("score(" + aspect + "): response lacks a numeric score");
  }
  result.score = reply["score"].get<double>();
  if (result.score < 0.0 || result.score > 1.0) {
    throw BackendError("score(" + aspect + "): score " + std::to_string(result.score) +
                       " outside [0, 1]");
  }
  return result;
}

LikertDistribution score_to_distribution(double score) {
  LikertDistribution d;
  const double level = std::clamp(score, 0.0, 1.0) * 4.0;  // 0..4
  const std::size_t lo = static_cast<std::size_t>(std::floor(level));
  const double frac = level - static_cast<double>(lo);
  if (lo >= 4) {
    d.p[4] = 1.0;
  } else {
    d.p[lo] = 1.0 - frac;
    d.p[lo + 1] = frac;
  }
  return d;
}

struct MockServer::Impl {
  MockServerOptions options;
  MockRationalizer rationalizer;
  std::unique_ptr<RidgeScorer> ridge;
  HashScorer hash_scorer;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> started{false};

  Impl(MockServerOptions opts, StopwordList stop, SentimentLexicon lexicon)
      : options(std::move(opts)),
        rationalizer(options.rationalizer, std::move(stop), std::move(lexicon)),
        hash_scorer(options.seed) {
    if (!options.ridge_model_path.empty()) {
      ridge = std::make_unique<RidgeScorer>(RidgeScorerModel::load(options.ridge_model_path));
    }
    install_routes();
  }

  void install_routes() {
    server.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [this](const json& body) {
        const std::string story = body.at("story").get<std::string>();
        const std::string aspect = body.at("aspect").get<std::string>();
        const std::size_t n = body.at("n").get<std::size_t>();
        const std::uint64_t seed = body.value("seed", options.seed);
        auto candidates = rationalizer.generate(story, aspect, n, seed);
        json out;
        out["candidates"] = json::array();
        for (const auto& cand : candidates) {
          json c;
          c["keywords"] = cand.keywords.items;
          if (cand.rationale_text) c["rationale"] = *cand.rationale_text;
          out["candidates"].push_back(std::move(c));
        }
        return out;
      });
    });
    server.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [this](const json& body) {
        const std::string story = body.at("story").get<std::string>();
        const std::string aspect = body.at("aspect").get<std::string>();
        std::vector<std::string> keywords;
        if (body.contains("keywords")) keywords = body["keywords"].get<std::vector<std::string>>();
        Scorer& scorer = ridge ? static_cast<Scorer&>(*ridge) : hash_scorer;
        const ScoreResult r = scorer.score(story, aspect, keywords);
        json out;
        if (options.serve_distribution) {
          const LikertDistribution d = score_to_distribution(r.score);
          json dist;
          for (int level = 1; level <= 5; ++level) {
            dist[std::to_string(level)] = d.p[static_cast<std::size_t>(level - 1)];
          }
          out["distribution"] = std::move(dist);
        } else {
          out["score"] = r.score;
        }
        return out;
      });
    });
  }

  template <typename Fn>
  void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    try {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        res.status = 400;
        res.set_content("{\"error\":\"invalid JSON\"}", "application/json");
        return;
      }
      const json out = fn(body);
      res.set_content(out.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      json err;
      err["error"] = e.what();
      res.set_content(err.dump(), "application/json");
    }
  }
};

MockServer::MockServer(MockServerOptions options, StopwordList stop, SentimentLexicon lexicon)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(stop), std::move(lexicon))) {}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
  if (!impl_->server.bind_to_port("127.0.0.1", impl_->options.port)) {
    throw BackendError("serve-mock: cannot bind port " + std::to_string(impl_->options.port));
  }
  impl_->thread = std::thread([this]() { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  impl_->started = true;
}

void MockServer::stop() {
  if (impl_ && impl_->started.exchange(false)) {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
  }
}

void MockServer::run() {
  if (!impl_->server.bind_to_port("0.0.0.0", impl_->options.port)) {
    throw BackendError("serve-mock: cannot bind port " + std::to_string(impl_->options.port));
  }
  impl_->server.listen_after_bind();
}

int MockServer::port() const { return impl_->options.port; }

}  // namespace coke
