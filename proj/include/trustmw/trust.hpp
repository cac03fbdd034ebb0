#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "trustmw/graph.hpp"
#include "trustmw/ontology.hpp"
#include "trustmw/score.hpp"

namespace trustmw::trust {

using ontology::PrincipalKind;
using ontology::PrincipalRef;

enum class ScoreName { behavior, identity, credibility };
const char* to_string(ScoreName name);
ScoreName score_name_from_string(std::string_view text);
const std::string& score_predicate(ScoreName name);

// Orders replicated writes of one score: higher version wins, ties broken by
// the originating middleware id.
struct ScoreStamp {
  std::uint64_t version = 0;
  std::string origin;
  friend auto operator<=>(const ScoreStamp&, const ScoreStamp&) = default;
};

struct TrustRecord {
  PrincipalRef principal;
  std::optional<Score> behavior;     // users only
  Score identity = Score::one();
  std::optional<Score> credibility;  // organizations only
  std::uint64_t version = 0;
  std::set<std::string> locked_with;
  std::uint32_t forgiven = 0;  // violations absorbed by the tolerance grace
  std::map<ScoreName, ScoreStamp> stamps;

  bool is_user() const noexcept { return principal.kind == PrincipalKind::user; }
  std::optional<Score> get(ScoreName name) const;

  friend bool operator==(const TrustRecord&, const TrustRecord&) = default;
};

struct AssessmentConfig {
  Score behavior_weight = Score::from_units(Score::kScale / 2);
  Score identity_weight = Score::from_units(Score::kScale / 2);
  Score threshold = Score::from_units(Score::kScale / 2);

  // Normalizes the weights so they sum to exactly one.
  static AssessmentConfig make(double behavior_weight, double identity_weight, double threshold);
};

struct Assessment {
  bool passed = false;
  double weighted_average = 0;
};

enum class PenaltyKind { dua_violation, no_dua_request, missing_category, missing_properties };
const char* to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(std::string_view text);
bool targets_user(PenaltyKind kind);

struct PenaltyConfig {
  Score dua_violation = Score::parse("0.01");
  Score no_dua_request = Score::parse("0.02");
  Score missing_category = Score::parse("0.02");
  Score missing_properties = Score::parse("0.01");
  std::uint32_t tolerance_grace = 0;
  // Also deduct the user's penalty from the organization's identity score.
  bool penalize_organization = false;

  Score deduction(PenaltyKind kind) const;
  // Throws Error(invalid_argument) unless every deduction is in (0,1].
  void validate() const;
};

// Users start with behavior=identity=1, organizations with
// credibility=identity=1. Version starts at 1.
TrustRecord init_principal(const PrincipalRef& ref);

Assessment assess(const TrustRecord& record, const AssessmentConfig& cfg);

TrustRecord apply_user_penalty(const TrustRecord& record, PenaltyKind kind, const PenaltyConfig& cfg);
TrustRecord apply_org_penalty(const TrustRecord& record, PenaltyKind kind, const PenaltyConfig& cfg);
// Deducts from an organization's identity score (the optional org-side
// consequence of a user violation).
TrustRecord apply_identity_deduction(const TrustRecord& record, Score deduction);

// True when exchanges between the custodian and the recipient organization
// are blocked.
bool check_lockout(const TrustRecord& custodian, const TrustRecord& recipient_org);
bool lock_condition(const TrustRecord& custodian, const TrustRecord& recipient_org);
// Records the pair as locked on both sides.
void lock_pair(TrustRecord& custodian, TrustRecord& recipient_org);

// Persists a fresh agreement and clears the pair's lock. Scores that
// triggered the lock go back to 1.
void rewrite_dua_reset(TrustRecord& custodian, TrustRecord& recipient_org, const ontology::DuaRecord& dua,
                       Graph& graph);

// Replaces the tst:*Trust triples of the principal with the record's values.
void project_scores(Graph& graph, const TrustRecord& record);
// Reads a record's scores back from the graph projection, if present.
void read_projection(const Graph& graph, TrustRecord& record);

struct ScoreUpdate {
  std::string principal;
  PrincipalKind kind = PrincipalKind::user;
  ScoreName score = ScoreName::behavior;
  Score value;
  std::uint64_t version = 0;
  std::string origin;

  friend bool operator==(const ScoreUpdate&, const ScoreUpdate&) = default;
};

// Thread-safe home of every trust record. Mutations are serialized; reads
// return snapshots.
class TrustRegistry {
 public:
  explicit TrustRegistry(std::string origin = "local");

  const std::string& origin() const noexcept { return origin_; }

  // Throws Error(conflict) if already registered.
  TrustRecord register_principal(const PrincipalRef& ref);
  // Registers the principal unless present; returns the current record.
  TrustRecord ensure(const PrincipalRef& ref);
  void restore(TrustRecord record);

  std::optional<TrustRecord> find(const std::string& iri) const;
  // Throws Error(not_found).
  TrustRecord get(const std::string& iri) const;
  std::vector<TrustRecord> snapshot() const;
  std::size_t size() const;

  // Applies fn to the current record. Changed scores are stamped with the
  // new version and returned as updates for peers.
  std::vector<ScoreUpdate> mutate(const std::string& iri, const std::function<TrustRecord(const TrustRecord&)>& fn);
  // Mutates two records as one step (lock and reset act on pairs).
  std::vector<ScoreUpdate> mutate_pair(const std::string& a, const std::string& b,
                                       const std::function<void(TrustRecord&, TrustRecord&)>& fn);

  // Applies a replicated update when its stamp beats the local one. Unknown
  // principals are registered first. Returns true if applied.
  bool apply_remote(const ScoreUpdate& update);

 private:
  std::vector<ScoreUpdate> commit(const TrustRecord& before, TrustRecord after);

  std::string origin_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, TrustRecord> records_;
};

}  // namespace trustmw::trust
