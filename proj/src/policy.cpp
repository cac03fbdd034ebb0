#include "trustmw/policy.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "trustmw/error.hpp"

namespace trustmw::policy {

using namespace ontology::vocab;
using Clock = std::chrono::steady_clock;

const char* to_string(Side side) { return side == Side::recipient ? "recipient" : "custodian"; }

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::passed: return "passed";
    case Outcome::failed: return "failed";
    case Outcome::not_evaluated: return "notEvaluated";
  }
  return "?";
}

namespace {

bool is_local_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

// Prefixed form when a registered namespace covers the IRI.
std::string compact(const std::string& iri, const Namespaces& ns) {
  std::string best;
  std::size_t best_len = 0;
  for (const auto& [prefix, base] : ns.entries()) {
    if (base.size() > best_len && iri.size() > base.size() && iri.compare(0, base.size(), base) == 0 &&
        is_local_name(std::string_view(iri).substr(base.size()))) {
      best = prefix + ":" + iri.substr(base.size());
      best_len = base.size();
    }
  }
  return best.empty() ? "<" + iri + ">" : best;
}

std::string require(const std::string& value, const char* what) {
  if (value.empty()) throw Error(ErrorCode::invalid_argument, std::string("empty ") + what + " in policy substitution");
  return value;
}

bool is_standard(const std::string& iri) {
  for (auto base : {iri::rdf, iri::rdfs, iri::xsd, iri::owl}) {
    if (iri.compare(0, base.size(), base) == 0) return true;
  }
  return false;
}

void collect_iris(const std::vector<TriplePattern>& patterns, std::vector<std::string>& out) {
  for (const auto& p : patterns) {
    for (const auto* pt : {&p.subject, &p.predicate, &p.object}) {
      if (const auto* t = std::get_if<Term>(pt); t && t->is_iri()) out.push_back(t->lexical());
    }
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string instantiate(const PolicyTemplate& policy, const Bindings& b, const Namespaces& ns) {
  const std::string& text = policy.query_template;
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      out += text[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1 || j >= text.size() || text[j] != '}') {
      out += text[i++];
      continue;
    }
    const std::string name = text.substr(i + 1, j - i - 1);
    if (name == "userLabel") {
      out += escape_literal(require(b.user_label, "user label"));
    } else if (name == "custodianLabel") {
      out += escape_literal(require(b.custodian_label, "custodian label"));
    } else if (name == "categoryIri") {
      out += compact(require(b.category, "category IRI"), ns);
    } else if (name == "purposeIri") {
      out += compact(require(b.purpose, "purpose IRI"), ns);
    } else if (name == "categoryList") {
      if (b.category_list.empty()) throw Error(ErrorCode::invalid_argument, "empty category list in policy substitution");
      for (std::size_t k = 0; k < b.category_list.size(); ++k) {
        if (k) out += ", ";
        out += "STR(" + compact(require(b.category_list[k], "category IRI"), ns) + ")";
      }
    } else {
      throw Error(ErrorCode::invalid_argument, "policy " + policy.id + " has unknown placeholder {" + name + "}");
    }
    i = j + 1;
  }
  return out;
}

void validate_request(const DataRequest& r, const Graph& graph) {
  auto reject = [&](const std::string& why) {
    throw Error(ErrorCode::validation, "invalid request " + r.request_id + ": " + why);
  };
  if (r.request_id.empty()) reject("missing requestId");
  if (r.user.empty()) reject("missing user");
  if (r.custodian.empty()) reject("missing custodian");
  if (r.category.empty()) reject("missing category");
  if (r.purpose.empty()) reject("missing purpose");
  const auto& cats = ontology::data_categories();
  if (std::find(cats.begin(), cats.end(), r.category) == cats.end() || !ontology::is_declared(graph, r.category)) {
    reject("undeclared data category <" + r.category + ">");
  }
  const auto& uses = ontology::permitted_uses();
  if (std::find(uses.begin(), uses.end(), r.purpose) == uses.end()) reject("unknown purpose <" + r.purpose + ">");
}

std::optional<PenaltyKind> penalty_for(const ComplianceResult& result) {
  for (const auto& p : result.per_policy) {
    if (p.side == Side::recipient && p.outcome == Outcome::failed) return p.failure_penalty;
  }
  if (!result.compliant) return std::nullopt;
  for (const auto& p : result.per_policy) {
    if (p.side == Side::custodian && p.outcome == Outcome::failed) return p.failure_penalty;
  }
  if (!result.custodian_complete) return PenaltyKind::missing_properties;
  return std::nullopt;
}

bool probe_completeness(const Graph& graph, const std::string& category, std::size_t sample) {
  const auto type = graph.find_id(Term::iri(iri::rdf_type()));
  const auto cls = graph.find_id(Term::iri(category));
  if (!type || !cls) return true;
  std::vector<TermId> instances;
  graph.scan(kNoTerm, *type, *cls, [&](const auto& t) {
    instances.push_back(t.s);
    return instances.size() < sample;
  });
  if (instances.empty()) return true;
  for (const auto& group : ontology::property_groups(category)) {
    const auto p = graph.find_id(Term::iri(group));
    if (!p) return false;
    const bool seen = std::any_of(instances.begin(), instances.end(),
                                  [&](TermId s) { return graph.count(s, *p, kNoTerm, 1) > 0; });
    if (!seen) return false;
  }
  return true;
}

void PolicyRegistry::register_policy(PolicyTemplate policy, const Graph& vocabulary) {
  if (policy.id.empty()) throw Error(ErrorCode::invalid_argument, "policy id is empty");
  if (find(policy.id)) throw Error(ErrorCode::conflict, "policy " + policy.id + " is already registered");
  Bindings probe{"probe_user", "probe_custodian", kPatient, {kPatient}, kPublicHealth};
  const auto ast = query::parse(instantiate(policy, probe, vocabulary.namespaces()), vocabulary.namespaces());
  if (ast.form != query::Form::ask) {
    throw Error(ErrorCode::validation, "policy " + policy.id + " must be an ASK query");
  }
  std::vector<std::string> iris;
  collect_iris(ast.bgp, iris);
  for (const auto& f : ast.filters) {
    for (const auto& operand : f.rhs) {
      if (operand.term.is_iri()) iris.push_back(operand.term.lexical());
    }
  }
  for (const auto& iri : iris) {
    if (!is_standard(iri) && !ontology::is_declared(vocabulary, iri)) {
      throw Error(ErrorCode::validation, "policy " + policy.id + " uses undeclared vocabulary <" + iri + ">");
    }
  }
  policies_.push_back(std::move(policy));
}

const PolicyTemplate* PolicyRegistry::find(const std::string& id) const {
  for (const auto& p : policies_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::shared_ptr<const query::QueryAst> PolicyRegistry::compile(const PolicyTemplate& policy, const Bindings& b,
                                                               const Namespaces& ns) const {
  std::string text = instantiate(policy, b, ns);
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->asts.find(text);
  if (it != cache_->asts.end()) return it->second;
  auto ast = std::make_shared<const query::QueryAst>(query::parse(text, ns));
  // Request labels are bounded by the principal set, so the cache stays small.
  return cache_->asts.emplace(std::move(text), std::move(ast)).first->second;
}

ComplianceResult PolicyRegistry::evaluate(const DataRequest& request, const Graph& graph, StageTimes* times) const {
  const auto user = ontology::read_principal(graph, request.user);
  const auto custodian = ontology::read_principal(graph, request.custodian);
  if (user.kind != ontology::PrincipalKind::user) {
    throw Error(ErrorCode::not_found, "<" + request.user + "> is not a user");
  }
  if (custodian.kind != ontology::PrincipalKind::organization) {
    throw Error(ErrorCode::not_found, "<" + request.custodian + "> is not an organization");
  }
  const Bindings b{user.label, custodian.label, request.category, {request.category}, request.purpose};

  ComplianceResult result;
  for (const auto& policy : policies_) {
    result.per_policy.push_back({policy.id, Outcome::not_evaluated, policy.side, policy.failure_penalty});
  }
  StageTimes local;
  auto run = [&](std::size_t i) {
    return query::eval_ask(*compile(policies_[i], b, graph.namespaces()), graph);
  };

  result.compliant = true;
  auto start = Clock::now();
  for (std::size_t i = 0; i < policies_.size() && result.compliant; ++i) {
    if (policies_[i].side != Side::recipient) continue;
    const bool passed = run(i);
    result.per_policy[i].outcome = passed ? Outcome::passed : Outcome::failed;
    result.compliant = passed;
  }
  local.recipient_policy_check = seconds_since(start);

  // Custodian-side checks only matter for a request that could be granted.
  if (result.compliant) {
    start = Clock::now();
    result.custodian_has_data = true;
    for (std::size_t i = 0; i < policies_.size(); ++i) {
      if (policies_[i].side != Side::custodian) continue;
      const bool passed = run(i);
      result.per_policy[i].outcome = passed ? Outcome::passed : Outcome::failed;
      result.custodian_has_data = result.custodian_has_data && passed;
    }
    if (result.custodian_has_data) {
      result.custodian_complete = probe_completeness(graph, request.category, probe_sample_);
    }
    local.data_credibility_check = seconds_since(start);
  }
  if (times) *times = local;
  return result;
}

std::vector<PolicyTemplate> builtin_policies() {
  static const char* kPrefix = R"(ASK{
   ?dataCustodian a syn:Organization . 
   ?dataCustodian rdfs:label "{custodianLabel}"^^rdf:PlainLiteral . 
   ?user a tst:User . 
   ?user rdfs:label "{userLabel}"^^rdf:PlainLiteral . 
   ?user syn:isAffiliatedWith ?organization . 
   ?dua a dua:DataUsageAgreement . 
   ?dua dua:hasRecipient ?organization . 
   ?dua dua:hasDataCustodian ?dataCustodian . 
)";
  std::vector<PolicyTemplate> out;
  out.push_back({"dua-exists", "A DUA binds the user's organization and the data custodian.",
                 std::string(kPrefix) + "}", PenaltyKind::no_dua_request, Side::recipient});
  out.push_back({"requested-data-in-dua", "The DUA lists the requested data category.",
                 std::string(kPrefix) + "   ?dua dua:requestedData {categoryIri}^^rdf:PlainLiteral . \n}",
                 PenaltyKind::dua_violation, Side::recipient});
  out.push_back({"custodian-has-category", "The custodian holds the data category requested in the DUA.",
                 R"(ASK {
  ?dataCustodian a syn:Organization .
  ?dataCustodian rdfs:label "{custodianLabel}"^^rdf:PlainLiteral .
  ?user a tst:User .
  ?user rdfs:label "{userLabel}"^^rdf:PlainLiteral .
  ?user syn:isAffiliatedWith ?org .
  ?dua a dua:DataUsageAgreement .
  ?dua dua:hasRecipient ?org .
  ?dua dua:hasDataCustodian ?dataCustodian .
  ?dua dua:requestedData ?requestedData.
  ?dataCustodian syn:hasDataCategory {categoryIri} .
  FILTER(STR(?requestedData) IN ( {categoryList}))
})",
                 PenaltyKind::missing_category, Side::custodian});
  out.push_back({"purpose-permitted", "The DUA permits the purpose stated in the request.",
                 std::string(kPrefix) + "   ?dua dua:hasPermittedUseOrDisclosure {purposeIri} . \n}",
                 PenaltyKind::dua_violation, Side::recipient});
  return out;
}

PolicyRegistry make_builtin_registry(const Graph& vocabulary) {
  PolicyRegistry reg;
  for (auto& p : builtin_policies()) reg.register_policy(std::move(p), vocabulary);
  return reg;
}

std::vector<PolicyTemplate> load_policy_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::io, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> queries;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rq") queries.push_back(entry.path());
  }
  std::sort(queries.begin(), queries.end());
  std::vector<PolicyTemplate> out;
  for (const auto& path : queries) {
    auto sidecar = path;
    sidecar.replace_extension(".json");
    PolicyTemplate p;
    p.id = path.stem().string();
    p.query_template = read_text(path);
    if (std::filesystem::exists(sidecar)) {
      nlohmann::json meta;
      try {
        meta = nlohmann::json::parse(read_text(sidecar));
        p.id = meta.value("id", p.id);
        p.description = meta.value("description", "");
        if (meta.contains("failurePenalty") && !meta["failurePenalty"].is_null()) {
          p.failure_penalty = trust::penalty_kind_from_string(meta["failurePenalty"].get<std::string>());
        }
        const std::string side = meta.value("side", "recipient");
        if (side == "custodian") {
          p.side = Side::custodian;
        } else if (side != "recipient") {
          throw Error(ErrorCode::validation, "unknown side '" + side + "'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, sidecar.string() + ": " + e.what());
      } catch (const Error& e) {
        throw Error(ErrorCode::validation, sidecar.string() + ": " + e.what());
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace trustmw::policy
