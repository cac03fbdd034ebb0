#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "trustmw/graph.hpp"
#include "trustmw/ontology.hpp"
#include "trustmw/policy.hpp"
#include "trustmw/query.hpp"
#include "trustmw/trust.hpp"

namespace trustmw::middleware {

using policy::ComplianceResult;
using policy::DataRequest;
using trust::PenaltyKind;
using trust::ScoreName;
using trust::ScoreUpdate;

struct MiddlewareConfig {
  trust::AssessmentConfig assessment;
  trust::PenaltyConfig penalties;
  std::size_t probe_sample = 25;
  std::string tm_id = "tm1";
  bool parallel_retrieval = true;
};

// key=value lines, '#' comments. Keys: behaviorWeight, identityWeight,
// threshold, duaViolation, noDuaRequest, missingCategory, missingProperties,
// toleranceGrace, penalizeOrganization, probeSample, tmId,
// parallelRetrieval. Throws Error(invalid_argument) for unknown keys or bad
// values.
MiddlewareConfig parse_config(const std::string& text);
MiddlewareConfig load_config(const std::filesystem::path& path);

struct AppliedPenalty {
  std::string principal;
  PenaltyKind kind = PenaltyKind::dua_violation;
  ScoreName score = ScoreName::behavior;
  Score before;
  Score after;

  friend bool operator==(const AppliedPenalty&, const AppliedPenalty&) = default;
};

struct AccessDecision {
  bool granted = false;
  ComplianceResult compliance;
  trust::Assessment assessment;
  std::vector<AppliedPenalty> applied_penalties;
  // The custodian/recipient pair was locked when the request arrived.
  bool lockout_triggered = false;
};

struct StageTimings {
  double recipient_policy_check = 0;  // seconds
  double data_credibility_check = 0;
  double trust_score_update = 0;
  double data_retrieval = 0;
  double total = 0;
};

struct DataResponse {
  std::string request_id;
  AccessDecision decision;
  std::optional<query::BindingSet> records;  // granted only
  std::vector<std::string> custodian_notices;
  StageTimings timings;
};

// Throws Error(integrity) when the decision contradicts its parts.
void check_response(const DataResponse& response);

// Every instance of the category with one column per declared property group
// (first value, empty literal when absent). One row per instance, sorted.
query::BindingSet retrieve(const Graph& graph, const std::string& category);
// Same result, materializing rows with OpenMP threads.
query::BindingSet retrieve_parallel(const Graph& graph, const std::string& category);

// Append-only line-delimited JSON, kept in memory or appended to a file.
// discard() keeps nothing.
class TransactionLog {
 public:
  static std::shared_ptr<TransactionLog> memory();
  static std::shared_ptr<TransactionLog> file(const std::filesystem::path& path);
  static std::shared_ptr<TransactionLog> discard();

  bool enabled() const noexcept { return keep_ || out_.is_open(); }
  void append(const std::string& line);
  std::vector<std::string> lines() const;

 private:
  TransactionLog() = default;
  mutable std::mutex mutex_;
  bool keep_ = false;
  std::vector<std::string> lines_;
  std::ofstream out_;
};

std::vector<std::string> read_log(const std::filesystem::path& path);

// Delivers a batch of updates to one peer; true means acknowledged.
class PeerTransport {
 public:
  virtual ~PeerTransport() = default;
  virtual bool send(const std::string& peer, const std::vector<ScoreUpdate>& updates) = 0;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{20};
};

struct PeerResult {
  std::string peer;
  std::size_t acked = 0;     // updates acknowledged in this round
  std::size_t retained = 0;  // updates still owed to this peer
  bool reachable = true;
};

class Middleware {
 public:
  // Registers every principal found in the graph, seeding scores from any
  // existing projection, then refreshes the projection.
  Middleware(Graph graph, MiddlewareConfig config, policy::PolicyRegistry policies,
             std::shared_ptr<TransactionLog> log = TransactionLog::discard());

  // The full exchange cycle. Throws Error(validation) for a malformed
  // request and Error(not_found) for an unknown user or custodian.
  DataResponse handle_request(const DataRequest& request);

  // Persists a fresh agreement for a locked pair and resets the pair.
  void rewrite_dua(const ontology::DuaRecord& dua);

  std::vector<PeerResult> propagate_scores(const std::vector<std::string>& peers, PeerTransport& transport,
                                           const RetryPolicy& retry = {});
  std::size_t receive_scores(const std::vector<ScoreUpdate>& updates);

  std::size_t pending_updates() const;
  const trust::TrustRegistry& registry() const { return registry_; }
  const MiddlewareConfig& config() const { return config_; }
  const policy::PolicyRegistry& policies() const { return policies_; }
  TransactionLog& log() { return *log_; }

  // Runs fn with shared access to the graph.
  template <class Fn>
  auto read_graph(Fn&& fn) const {
    std::shared_lock lock(graph_mutex_);
    return fn(static_cast<const Graph&>(graph_));
  }

 private:
  struct Pending {
    ScoreUpdate update;
    std::set<std::string> acked;
  };

  trust::TrustRecord ensure_principal(const std::string& iri);
  void enqueue(std::vector<ScoreUpdate> updates);
  void project(const std::vector<std::string>& iris);

  Graph graph_;
  mutable std::shared_mutex graph_mutex_;
  MiddlewareConfig config_;
  policy::PolicyRegistry policies_;
  trust::TrustRegistry registry_;
  std::shared_ptr<TransactionLog> log_;
  std::mutex commit_mutex_;
  mutable std::mutex queue_mutex_;
  std::deque<Pending> queue_;
};

struct ReplayReport {
  std::size_t transactions = 0;
  std::size_t decision_mismatches = 0;
};

// Re-executes logged requests and DUA rewrites against `fresh`, counting
// decisions that differ from the logged ones.
ReplayReport replay(const std::vector<std::string>& lines, Middleware& fresh);

}  // namespace trustmw::middleware
