#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "trustmw/graph.hpp"
#include "trustmw/ontology.hpp"
#include "trustmw/query.hpp"
#include "trustmw/trust.hpp"

namespace trustmw::policy {

using trust::PenaltyKind;

// Which party a failed check blames. Recipient-side checks decide
// compliance; custodian-side checks only affect the custodian's credibility.
enum class Side { recipient, custodian };
const char* to_string(Side side);

struct PolicyTemplate {
  std::string id;
  std::string description;
  // Query text with {userLabel}, {custodianLabel}, {categoryIri},
  // {categoryList} and {purposeIri} placeholders.
  std::string query_template;
  std::optional<PenaltyKind> failure_penalty;
  Side side = Side::recipient;
};

struct Bindings {
  std::string user_label;
  std::string custodian_label;
  std::string category;
  std::vector<std::string> category_list;
  std::string purpose;
};

// Substitutes every placeholder. Throws Error(invalid_argument) for an empty
// label or IRI the template uses, or for a placeholder left unresolved.
std::string instantiate(const PolicyTemplate& policy, const Bindings& bindings,
                        const Namespaces& ns = Namespaces{});

struct DataRequest {
  std::string user;       // IRI
  std::string custodian;  // IRI
  std::string category;   // data-category class IRI
  std::string purpose;    // permitted-use individual IRI
  std::string request_id;
  std::int64_t timestamp = 0;

  friend bool operator==(const DataRequest&, const DataRequest&) = default;
};

// Throws Error(validation) for missing fields or undeclared category/purpose.
void validate_request(const DataRequest& request, const Graph& graph);

enum class Outcome { passed, failed, not_evaluated };
const char* to_string(Outcome outcome);

struct PolicyOutcome {
  std::string policy_id;
  Outcome outcome = Outcome::not_evaluated;
  Side side = Side::recipient;
  std::optional<PenaltyKind> failure_penalty;

  friend bool operator==(const PolicyOutcome&, const PolicyOutcome&) = default;
};

struct ComplianceResult {
  std::vector<PolicyOutcome> per_policy;
  // Conjunction of the recipient-side outcomes.
  bool compliant = false;
  // Outcome of the custodian-side checks; false when not evaluated.
  bool custodian_has_data = false;
  // Completeness probe; true when not evaluated.
  bool custodian_complete = true;

  friend bool operator==(const ComplianceResult&, const ComplianceResult&) = default;
};

std::optional<PenaltyKind> penalty_for(const ComplianceResult& result);

struct StageTimes {
  double recipient_policy_check = 0;  // seconds
  double data_credibility_check = 0;
};

// Every declared property group of the category appears on at least one of
// the first `sample` instances. Categories without instances count as complete.
bool probe_completeness(const Graph& graph, const std::string& category, std::size_t sample);

class PolicyRegistry {
 public:
  // Throws Error(conflict) for a duplicate id, Error(parse) when the
  // instantiated template does not parse and Error(validation) when it uses
  // a vocabulary IRI the graph does not declare.
  void register_policy(PolicyTemplate policy, const Graph& vocabulary);

  const std::vector<PolicyTemplate>& policies() const { return policies_; }
  const PolicyTemplate* find(const std::string& id) const;
  std::size_t size() const { return policies_.size(); }

  void set_probe_sample(std::size_t sample) { probe_sample_ = sample; }
  std::size_t probe_sample() const { return probe_sample_; }

  // Runs the recipient-side policies in registration order, stopping at the
  // first failure, then the custodian-side policies and the completeness
  // probe when the request is compliant.
  // Throws Error(not_found) for an unknown user or custodian.
  ComplianceResult evaluate(const DataRequest& request, const Graph& graph, StageTimes* times = nullptr) const;

  // Instantiated and parsed query for a request (cached by text).
  std::shared_ptr<const query::QueryAst> compile(const PolicyTemplate& policy, const Bindings& bindings,
                                                 const Namespaces& ns) const;

 private:
  std::vector<PolicyTemplate> policies_;
  std::size_t probe_sample_ = 25;
  struct Cache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const query::QueryAst>> asts;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// The three recipient-side checks plus custodian-has-category on the
// custodian side.
std::vector<PolicyTemplate> builtin_policies();
PolicyRegistry make_builtin_registry(const Graph& vocabulary);

// Reads <id>.rq query templates with <id>.json sidecars
// ({"id", "description", "failurePenalty", "side"}), sorted by file name.
std::vector<PolicyTemplate> load_policy_directory(const std::filesystem::path& dir);

}  // namespace trustmw::policy
