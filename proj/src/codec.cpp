#include "trustmw/codec.hpp"

#include "trustmw/error.hpp"

namespace trustmw::codec {

namespace {

std::string iri_field(const json& j, const char* key, const Namespaces& ns, bool required = true) {
  if (!j.contains(key)) {
    if (required) throw Error(ErrorCode::validation, std::string("missing field '") + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw Error(ErrorCode::validation, std::string("field '") + key + "' must be a string");
  std::string value = j[key].get<std::string>();
  const auto colon = value.find(':');
  if (colon != std::string::npos && value.find("://") == std::string::npos && ns.find(value.substr(0, colon))) {
    value = ns.expand(value);
  }
  return value;
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorCode::validation, std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

std::string optional_string(const json& j, const char* key) {
  return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string();
}

}  // namespace

json to_json(const policy::DataRequest& r) {
  return {{"requestId", r.request_id}, {"user", r.user},       {"custodian", r.custodian},
          {"category", r.category},    {"purpose", r.purpose}, {"timestamp", r.timestamp}};
}

policy::DataRequest request_from_json(const json& j, const Namespaces& ns) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "request must be a JSON object");
  policy::DataRequest r;
  r.request_id = string_field(j, "requestId");
  r.user = iri_field(j, "user", ns);
  r.custodian = iri_field(j, "custodian", ns);
  r.category = iri_field(j, "category", ns);
  r.purpose = iri_field(j, "purpose", ns);
  if (j.contains("timestamp")) {
    if (!j["timestamp"].is_number_integer()) throw Error(ErrorCode::validation, "timestamp must be an integer");
    r.timestamp = j["timestamp"].get<std::int64_t>();
  }
  return r;
}

json to_json(const policy::ComplianceResult& c) {
  json per = json::array();
  for (const auto& p : c.per_policy) {
    per.push_back({{"policy", p.policy_id}, {"side", policy::to_string(p.side)}, {"outcome", policy::to_string(p.outcome)}});
  }
  return {{"perPolicy", per},
          {"compliant", c.compliant},
          {"custodianHasData", c.custodian_has_data},
          {"custodianComplete", c.custodian_complete}};
}

json to_json(const middleware::AppliedPenalty& p) {
  return {{"principal", p.principal},
          {"kind", trust::to_string(p.kind)},
          {"score", trust::to_string(p.score)},
          {"before", p.before.to_string()},
          {"after", p.after.to_string()}};
}

json to_json(const middleware::AccessDecision& d) {
  json penalties = json::array();
  for (const auto& p : d.applied_penalties) penalties.push_back(to_json(p));
  return {{"granted", d.granted},
          {"compliance", to_json(d.compliance)},
          {"assessment", {{"passed", d.assessment.passed}, {"weightedAverage", d.assessment.weighted_average}}},
          {"appliedPenalties", penalties},
          {"lockoutTriggered", d.lockout_triggered}};
}

json to_json(const middleware::StageTimings& t) {
  return {{"recipientPolicyCheck", t.recipient_policy_check},
          {"dataCredibilityCheck", t.data_credibility_check},
          {"trustScoreUpdate", t.trust_score_update},
          {"dataRetrieval", t.data_retrieval},
          {"total", t.total}};
}

json to_json(const query::BindingSet& rows) {
  json out = json::array();
  for (const auto& row : rows.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < rows.variables.size(); ++i) obj[rows.variables[i]] = row[i].lexical();
    out.push_back(std::move(obj));
  }
  return {{"variables", rows.variables}, {"rows", out}};
}

json to_json(const middleware::DataResponse& r) {
  json out = {{"requestId", r.request_id},
              {"decision", to_json(r.decision)},
              {"custodianNotices", r.custodian_notices},
              {"timings", to_json(r.timings)}};
  if (r.records) {
    out["records"] = to_json(*r.records);
  } else {
    out["records"] = nullptr;
  }
  return out;
}

json to_json(const trust::ScoreUpdate& u) {
  return {{"principal", u.principal},
          {"kind", ontology::to_string(u.kind)},
          {"score", trust::to_string(u.score)},
          {"value", u.value.to_string()},
          {"version", u.version},
          {"origin", u.origin}};
}

trust::ScoreUpdate update_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "score update must be a JSON object");
  trust::ScoreUpdate u;
  u.principal = string_field(j, "principal");
  const std::string kind = string_field(j, "kind");
  if (kind == "user") {
    u.kind = ontology::PrincipalKind::user;
  } else if (kind == "organization") {
    u.kind = ontology::PrincipalKind::organization;
  } else {
    throw Error(ErrorCode::validation, "unknown principal kind '" + kind + "'");
  }
  try {
    u.score = trust::score_name_from_string(string_field(j, "score"));
    u.value = Score::parse(string_field(j, "value"));
  } catch (const Error& e) {
    throw Error(ErrorCode::validation, e.what());
  }
  if (u.value > Score::one()) throw Error(ErrorCode::validation, "score value exceeds 1");
  if (!j.contains("version") || !j["version"].is_number_unsigned()) {
    throw Error(ErrorCode::validation, "version must be a non-negative integer");
  }
  u.version = j["version"].get<std::uint64_t>();
  u.origin = string_field(j, "origin");
  return u;
}

json to_json(const trust::TrustRecord& r) {
  json out = {{"principal", r.principal.iri},
              {"kind", ontology::to_string(r.principal.kind)},
              {"label", r.principal.label},
              {"identity", r.identity.to_string()},
              {"version", r.version},
              {"lockedWith", r.locked_with},
              {"forgiven", r.forgiven}};
  if (r.behavior) out["behavior"] = r.behavior->to_string();
  if (r.credibility) out["credibility"] = r.credibility->to_string();
  if (r.principal.affiliation) out["affiliation"] = *r.principal.affiliation;
  json stamps = json::object();
  for (const auto& [name, stamp] : r.stamps) {
    stamps[trust::to_string(name)] = {{"version", stamp.version}, {"origin", stamp.origin}};
  }
  out["stamps"] = stamps;
  return out;
}

json to_json(const ontology::DuaRecord& d) {
  return {{"iri", d.iri},
          {"custodian", d.custodian},
          {"recipient", d.recipient},
          {"requestedData", d.requested_data},
          {"permittedUseOrDisclosure", d.permitted_uses},
          {"term", d.term},
          {"terminationEffect", d.termination_effect},
          {"terminationCause", d.termination_cause},
          {"storage", d.storage},
          {"access", d.access},
          {"protections", d.protections}};
}

ontology::DuaRecord dua_from_json(const json& j, const Namespaces& ns) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "DUA must be a JSON object");
  ontology::DuaRecord d;
  d.iri = iri_field(j, "iri", ns);
  d.custodian = iri_field(j, "custodian", ns);
  d.recipient = iri_field(j, "recipient", ns);
  auto iri_set = [&](const char* key, std::set<std::string>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw Error(ErrorCode::validation, std::string("field '") + key + "' must be an array");
    for (const auto& item : j[key]) out.insert(iri_field(json{{"v", item}}, "v", ns));
  };
  iri_set("requestedData", d.requested_data);
  iri_set("permittedUseOrDisclosure", d.permitted_uses);
  d.term = optional_string(j, "term");
  d.termination_effect = optional_string(j, "terminationEffect");
  d.termination_cause = optional_string(j, "terminationCause");
  d.storage = optional_string(j, "storage");
  d.access = optional_string(j, "access");
  d.protections = optional_string(j, "protections");
  return d;
}

}  // namespace trustmw::codec
