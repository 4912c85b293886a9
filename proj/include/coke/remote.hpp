#pragma once

#include <functional>
#include <memory>
#include <string>

#include "coke/backends.hpp"
#include "coke/ridge.hpp"

namespace coke {

// Sink for request/response pairs, one JSON object per call, replayable.
using WireLog = std::function<void(const std::string& endpoint, const std::string& request,
                                   const std::string& response)>;

struct RemoteOptions {
  std::string base_url;        // e.g. http://127.0.0.1:8089
  double temperature = 1.0;    // forwarded to /v1/generate
  int timeout_seconds = 30;
  bool retry_generate = false;  // generation is never retried unless set
  WireLog wire_log;
};

// JSON-over-HTTP client for the rationalizer/scorer wire protocol:
//   POST /v1/generate {"aspect","story","n","seed","temperature"}
//     -> {"candidates":[{"keywords":[...],"rationale":"..."}]}
//   POST /v1/score {"aspect","story","keywords":[...]}
//     -> {"score": x} or {"distribution":{"1":p1,...,"5":p5}}
class RemoteBackend final : public Rationalizer, public Scorer {
 public:
  explicit RemoteBackend(RemoteOptions options);
  ~RemoteBackend() override;

  std::vector<CandidateRationale> generate(const std::string& story, const std::string& aspect,
                                           std::size_t n, std::uint64_t seed) override;
  ScoreResult score(const std::string& story, const std::string& aspect,
                    const std::vector<std::string>& keywords) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct MockServerOptions {
  int port = 8089;
  std::uint64_t seed = 7;
  MockRationalizerConfig rationalizer;
  // When set, /v1/score answers with a Likert distribution instead of a
  // plain score.
  bool serve_distribution = false;
  std::string ridge_model_path;  // empty -> deterministic hash scorer
};

// Serves the wire protocol over the mock rationalizer and either a ridge
// model or the hash scorer. Used by `coke backend serve-mock` and by the
// remote-client integration tests.
class MockServer {
 public:
  MockServer(MockServerOptions options, StopwordList stop, SentimentLexicon lexicon);
  ~MockServer();

  // Binds and serves on a background thread; returns once the socket accepts
  // connections. Throws BackendError if the port cannot be bound.
  void start();
  void stop();
  // Foreground serving for the CLI; blocks until stop() or a signal.
  void run();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Spreads a score over the two adjacent Likert levels so that the
// distribution's expectation reproduces the score exactly.
LikertDistribution score_to_distribution(double score);

}  // namespace coke
