#pragma once

#include "json.hpp"
#include "trustmw/middleware.hpp"

// JSON shapes shared by the HTTP API and the transaction log.
namespace trustmw::codec {

using nlohmann::json;

json to_json(const policy::DataRequest& request);
// Every IRI field may be absolute or a prefixed name. Throws Error(validation) for missing or mistyped fields.
policy::DataRequest request_from_json(const json& j, const Namespaces& ns = Namespaces{});

json to_json(const policy::ComplianceResult& result);
json to_json(const middleware::AccessDecision& decision);
json to_json(const middleware::AppliedPenalty& penalty);
json to_json(const middleware::StageTimings& timings);
json to_json(const query::BindingSet& rows);
json to_json(const middleware::DataResponse& response);

json to_json(const trust::ScoreUpdate& update);
trust::ScoreUpdate update_from_json(const json& j);

json to_json(const trust::TrustRecord& record);

json to_json(const ontology::DuaRecord& dua);
ontology::DuaRecord dua_from_json(const json& j, const Namespaces& ns = Namespaces{});

}  // namespace trustmw::codec
