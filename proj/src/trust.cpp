#include "trustmw/trust.hpp"

#include <cmath>

#include "trustmw/error.hpp"

namespace trustmw::trust {

using namespace ontology::vocab;

const char* to_string(ScoreName name) {
  switch (name) {
    case ScoreName::behavior: return "behavior";
    case ScoreName::identity: return "identity";
    case ScoreName::credibility: return "credibility";
  }
  return "?";
}

ScoreName score_name_from_string(std::string_view text) {
  if (text == "behavior") return ScoreName::behavior;
  if (text == "identity") return ScoreName::identity;
  if (text == "credibility") return ScoreName::credibility;
  throw Error(ErrorCode::invalid_argument, "unknown score name '" + std::string(text) + "'");
}

const std::string& score_predicate(ScoreName name) {
  switch (name) {
    case ScoreName::behavior: return kBehaviorTrust;
    case ScoreName::identity: return kIdentityTrust;
    case ScoreName::credibility: break;
  }
  return kCredibilityTrust;
}

std::optional<Score> TrustRecord::get(ScoreName name) const {
  switch (name) {
    case ScoreName::behavior: return behavior;
    case ScoreName::identity: return identity;
    case ScoreName::credibility: return credibility;
  }
  return std::nullopt;
}

AssessmentConfig AssessmentConfig::make(double behavior_weight, double identity_weight, double threshold) {
  if (!(behavior_weight >= 0) || !(identity_weight >= 0) || behavior_weight + identity_weight <= 0) {
    throw Error(ErrorCode::invalid_argument, "assessment weights must be non-negative and not both zero");
  }
  if (!(threshold >= 0 && threshold <= 1)) {
    throw Error(ErrorCode::invalid_argument, "assessment threshold must lie in [0,1]");
  }
  AssessmentConfig cfg;
  const auto b = static_cast<std::int32_t>(
      std::llround(behavior_weight / (behavior_weight + identity_weight) * Score::kScale));
  cfg.behavior_weight = Score::from_units(b);
  cfg.identity_weight = Score::from_units(Score::kScale - b);
  cfg.threshold = Score::from_units(static_cast<std::int32_t>(std::llround(threshold * Score::kScale)));
  return cfg;
}

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::dua_violation: return "duaViolation";
    case PenaltyKind::no_dua_request: return "noDuaRequest";
    case PenaltyKind::missing_category: return "missingCategory";
    case PenaltyKind::missing_properties: return "missingProperties";
  }
  return "?";
}

PenaltyKind penalty_kind_from_string(std::string_view text) {
  for (auto k : {PenaltyKind::dua_violation, PenaltyKind::no_dua_request, PenaltyKind::missing_category,
                 PenaltyKind::missing_properties}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown penalty kind '" + std::string(text) + "'");
}

bool targets_user(PenaltyKind kind) {
  return kind == PenaltyKind::dua_violation || kind == PenaltyKind::no_dua_request;
}

Score PenaltyConfig::deduction(PenaltyKind kind) const {
  switch (kind) {
    case PenaltyKind::dua_violation: return dua_violation;
    case PenaltyKind::no_dua_request: return no_dua_request;
    case PenaltyKind::missing_category: return missing_category;
    case PenaltyKind::missing_properties: return missing_properties;
  }
  return Score::zero();
}

void PenaltyConfig::validate() const {
  for (auto k : {PenaltyKind::dua_violation, PenaltyKind::no_dua_request, PenaltyKind::missing_category,
                 PenaltyKind::missing_properties}) {
    Score d = deduction(k);
    if (d <= Score::zero() || d > Score::one()) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("penalty ") + to_string(k) + " must lie in (0,1], got " + d.to_string());
    }
  }
}

TrustRecord init_principal(const PrincipalRef& ref) {
  TrustRecord r;
  r.principal = ref;
  r.identity = Score::one();
  if (ref.kind == PrincipalKind::user) {
    r.behavior = Score::one();
  } else {
    r.credibility = Score::one();
  }
  r.version = 1;
  return r;
}

namespace {

void require_kind(const TrustRecord& r, PrincipalKind kind, const char* op) {
  if (r.principal.kind != kind) {
    throw Error(ErrorCode::kind, std::string(op) + " expects a " + ontology::to_string(kind) + " record, got <" +
                                     r.principal.iri + ">");
  }
}

}  // namespace

Assessment assess(const TrustRecord& record, const AssessmentConfig& cfg) {
  require_kind(record, PrincipalKind::user, "assess");
  const std::int64_t numerator =
      std::int64_t{cfg.behavior_weight.units()} * record.behavior.value_or(Score::zero()).units() +
      std::int64_t{cfg.identity_weight.units()} * record.identity.units();
  const std::int64_t scale = Score::kScale;
  Assessment a;
  a.passed = numerator >= std::int64_t{cfg.threshold.units()} * scale;
  a.weighted_average = static_cast<double>(numerator) / static_cast<double>(scale * scale);
  return a;
}

TrustRecord apply_user_penalty(const TrustRecord& record, PenaltyKind kind, const PenaltyConfig& cfg) {
  require_kind(record, PrincipalKind::user, "apply_user_penalty");
  if (!targets_user(kind)) {
    throw Error(ErrorCode::invalid_argument, std::string(to_string(kind)) + " is not a user penalty");
  }
  TrustRecord out = record;
  ++out.version;
  if (out.forgiven < cfg.tolerance_grace) {
    ++out.forgiven;
    return out;
  }
  out.behavior = out.behavior.value_or(Score::zero()).minus(cfg.deduction(kind));
  return out;
}

TrustRecord apply_org_penalty(const TrustRecord& record, PenaltyKind kind, const PenaltyConfig& cfg) {
  require_kind(record, PrincipalKind::organization, "apply_org_penalty");
  if (targets_user(kind)) {
    throw Error(ErrorCode::invalid_argument, std::string(to_string(kind)) + " is not an organization penalty");
  }
  TrustRecord out = record;
  ++out.version;
  out.credibility = out.credibility.value_or(Score::zero()).minus(cfg.deduction(kind));
  return out;
}

TrustRecord apply_identity_deduction(const TrustRecord& record, Score deduction) {
  require_kind(record, PrincipalKind::organization, "apply_identity_deduction");
  TrustRecord out = record;
  ++out.version;
  out.identity = out.identity.minus(deduction);
  return out;
}

bool lock_condition(const TrustRecord& custodian, const TrustRecord& recipient_org) {
  require_kind(custodian, PrincipalKind::organization, "check_lockout");
  require_kind(recipient_org, PrincipalKind::organization, "check_lockout");
  return custodian.credibility.value_or(Score::zero()) <= Score::zero() ||
         recipient_org.identity <= Score::zero();
}

bool check_lockout(const TrustRecord& custodian, const TrustRecord& recipient_org) {
  return lock_condition(custodian, recipient_org) || custodian.locked_with.count(recipient_org.principal.iri) > 0 ||
         recipient_org.locked_with.count(custodian.principal.iri) > 0;
}

void lock_pair(TrustRecord& custodian, TrustRecord& recipient_org) {
  require_kind(custodian, PrincipalKind::organization, "lock_pair");
  require_kind(recipient_org, PrincipalKind::organization, "lock_pair");
  custodian.locked_with.insert(recipient_org.principal.iri);
  recipient_org.locked_with.insert(custodian.principal.iri);
  ++custodian.version;
  ++recipient_org.version;
}

void rewrite_dua_reset(TrustRecord& custodian, TrustRecord& recipient_org, const ontology::DuaRecord& dua,
                       Graph& graph) {
  if (!check_lockout(custodian, recipient_org)) {
    throw Error(ErrorCode::state, "exchanges between <" + custodian.principal.iri + "> and <" +
                                      recipient_org.principal.iri + "> are not locked");
  }
  if (dua.custodian != custodian.principal.iri || dua.recipient != recipient_org.principal.iri) {
    throw Error(ErrorCode::mismatch, "DUA <" + dua.iri + "> does not bind <" + custodian.principal.iri + "> and <" +
                                         recipient_org.principal.iri + ">");
  }
  ontology::validate_dua(dua);
  ontology::write_dua(graph, dua);
  custodian.locked_with.erase(recipient_org.principal.iri);
  recipient_org.locked_with.erase(custodian.principal.iri);
  if (custodian.credibility.value_or(Score::zero()) <= Score::zero()) custodian.credibility = Score::one();
  if (recipient_org.identity <= Score::zero()) recipient_org.identity = Score::one();
  ++custodian.version;
  ++recipient_org.version;
}

void project_scores(Graph& graph, const TrustRecord& record) {
  const Term subject = Term::iri(record.principal.iri);
  for (auto name : {ScoreName::behavior, ScoreName::identity, ScoreName::credibility}) {
    const auto value = record.get(name);
    const Term predicate = Term::iri(score_predicate(name));
    Term fresh = Term::typed(value ? value->to_string() : "0.0", iri::xsd_float());
    bool present = false;
    for (const auto& t : graph.match({subject, predicate, Variable{"o"}})) {
      if (value && t.object == fresh) {
        present = true;
      } else {
        graph.remove(t);
      }
    }
    if (value && !present) graph.insert(Triple{subject, predicate, std::move(fresh)});
  }
}

void read_projection(const Graph& graph, TrustRecord& record) {
  const Term subject = Term::iri(record.principal.iri);
  for (auto name : {ScoreName::behavior, ScoreName::identity, ScoreName::credibility}) {
    if (!record.get(name)) continue;
    auto m = graph.match({subject, Term::iri(score_predicate(name)), Variable{"o"}});
    if (m.empty()) continue;
    const Score value = Score::parse(m.front().object.lexical());
    if (value > Score::one()) {
      throw Error(ErrorCode::validation, "score of <" + record.principal.iri + "> exceeds 1");
    }
    switch (name) {
      case ScoreName::behavior: record.behavior = value; break;
      case ScoreName::identity: record.identity = value; break;
      case ScoreName::credibility: record.credibility = value; break;
    }
  }
}

TrustRegistry::TrustRegistry(std::string origin) : origin_(std::move(origin)) {}

TrustRecord TrustRegistry::register_principal(const PrincipalRef& ref) {
  std::unique_lock lock(mutex_);
  if (records_.count(ref.iri)) throw Error(ErrorCode::conflict, "<" + ref.iri + "> is already registered");
  TrustRecord r = init_principal(ref);
  records_.emplace(ref.iri, r);
  return r;
}

TrustRecord TrustRegistry::ensure(const PrincipalRef& ref) {
  std::unique_lock lock(mutex_);
  auto [it, added] = records_.try_emplace(ref.iri);
  if (added) it->second = init_principal(ref);
  return it->second;
}

void TrustRegistry::restore(TrustRecord record) {
  std::unique_lock lock(mutex_);
  records_[record.principal.iri] = std::move(record);
}

std::optional<TrustRecord> TrustRegistry::find(const std::string& iri) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(iri);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

TrustRecord TrustRegistry::get(const std::string& iri) const {
  auto r = find(iri);
  if (!r) throw Error(ErrorCode::not_found, "no trust record for <" + iri + ">");
  return *std::move(r);
}

std::vector<TrustRecord> TrustRegistry::snapshot() const {
  std::shared_lock lock(mutex_);
  std::vector<TrustRecord> out;
  out.reserve(records_.size());
  for (const auto& [iri, r] : records_) out.push_back(r);
  return out;
}

std::size_t TrustRegistry::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<ScoreUpdate> TrustRegistry::commit(const TrustRecord& before, TrustRecord after) {
  if (after.version <= before.version) after.version = before.version + 1;
  std::vector<ScoreUpdate> updates;
  for (auto name : {ScoreName::behavior, ScoreName::identity, ScoreName::credibility}) {
    auto value = after.get(name);
    if (!value || value == before.get(name)) continue;
    after.stamps[name] = ScoreStamp{after.version, origin_};
    updates.push_back(ScoreUpdate{after.principal.iri, after.principal.kind, name, *value, after.version, origin_});
  }
  records_[after.principal.iri] = std::move(after);
  return updates;
}

std::vector<ScoreUpdate> TrustRegistry::mutate(const std::string& iri,
                                               const std::function<TrustRecord(const TrustRecord&)>& fn) {
  std::unique_lock lock(mutex_);
  auto it = records_.find(iri);
  if (it == records_.end()) throw Error(ErrorCode::not_found, "no trust record for <" + iri + ">");
  const TrustRecord before = it->second;
  TrustRecord after = fn(before);
  if (after.principal.iri != iri) throw Error(ErrorCode::invalid_argument, "mutation changed the principal");
  return commit(before, std::move(after));
}

std::vector<ScoreUpdate> TrustRegistry::mutate_pair(const std::string& a, const std::string& b,
                                                    const std::function<void(TrustRecord&, TrustRecord&)>& fn) {
  std::unique_lock lock(mutex_);
  auto ia = records_.find(a);
  auto ib = records_.find(b);
  if (ia == records_.end()) throw Error(ErrorCode::not_found, "no trust record for <" + a + ">");
  if (ib == records_.end()) throw Error(ErrorCode::not_found, "no trust record for <" + b + ">");
  const TrustRecord before_a = ia->second;
  const TrustRecord before_b = ib->second;
  TrustRecord after_a = before_a;
  TrustRecord after_b = before_b;
  fn(after_a, after_b);
  auto updates = commit(before_a, std::move(after_a));
  auto more = commit(before_b, std::move(after_b));
  updates.insert(updates.end(), more.begin(), more.end());
  return updates;
}

bool TrustRegistry::apply_remote(const ScoreUpdate& u) {
  std::unique_lock lock(mutex_);
  auto [it, added] = records_.try_emplace(u.principal);
  TrustRecord& r = it->second;
  if (added) {
    r = init_principal(PrincipalRef{u.principal, u.kind, {}, std::nullopt});
    r.version = 0;
  }
  if (!r.get(u.score)) return false;
  const ScoreStamp incoming{u.version, u.origin};
  auto stamp = r.stamps.find(u.score);
  if (stamp != r.stamps.end() && !(stamp->second < incoming)) return false;
  switch (u.score) {
    case ScoreName::behavior: r.behavior = u.value; break;
    case ScoreName::identity: r.identity = u.value; break;
    case ScoreName::credibility: r.credibility = u.value; break;
  }
  r.stamps[u.score] = incoming;
  r.version = std::max(r.version, u.version);
  return true;
}

}  // namespace trustmw::trust
