#include "trustmw/ontology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "trustmw/error.hpp"

namespace trustmw::ontology {

using namespace vocab;

namespace vocab {
std::string syn(std::string_view local) { return std::string(iri::syn) + std::string(local); }
std::string dua(std::string_view local) { return std::string(iri::dua) + std::string(local); }
std::string tst(std::string_view local) { return std::string(iri::tst) + std::string(local); }
}  // namespace vocab

namespace {

Term I(const std::string& iri) { return Term::iri(iri); }

struct Declarations {
  std::vector<Triple> triples;

  void add(const std::string& s, const std::string& p, Term o) {
    triples.push_back(Triple::make(I(s), I(p), std::move(o)));
  }
  void cls(const std::string& iri, const std::string& label, const std::string& parent = {}) {
    add(iri, kRdfType, I(kRdfsClass));
    add(iri, kRdfsLabel, Term::literal(label));
    if (!parent.empty()) add(iri, kRdfsSubClassOf, I(parent));
  }
  void prop(const std::string& iri, const std::string& domain, const std::string& range) {
    add(iri, kRdfType, I(kRdfProperty));
    if (!domain.empty()) add(iri, kRdfsDomain, I(domain));
    if (!range.empty()) add(iri, kRdfsRange, I(range));
  }
};

const std::string kPlainLiteral = iri::rdf_plain_literal();
const std::string kFloat = iri::xsd_float();

const std::vector<Triple>& declarations() {
  static const std::vector<Triple> all = [] {
    Declarations d;
    // Trust vocabulary.
    d.cls(tst("Trust"), "Trust");
    d.cls(tst("IdentityTrust"), "Identity trust", tst("Trust"));
    d.cls(tst("BehavioralTrust"), "Behavioral trust", tst("Trust"));
    d.cls(tst("Veracity"), "Veracity", tst("Trust"));
    d.cls(tst("Objectivity"), "Objectivity", tst("Veracity"));
    d.cls(tst("Truthfulness"), "Truthfulness", tst("Veracity"));
    d.cls(tst("Credibility"), "Credibility", tst("Veracity"));
    d.cls(tst("Provenance"), "Provenance", tst("Trust"));
    d.cls(kUser, "User");
    d.prop(kBehaviorTrust, kUser, kFloat);
    d.prop(kIdentityTrust, "", kFloat);
    d.prop(kCredibilityTrust, kOrganization, kFloat);

    // DUA vocabulary.
    d.cls(kDataUsageAgreement, "Data usage agreement");
    d.cls(kTermAndTermination, "Term and termination");
    d.cls(kPermittedUseOrDisclosure, "Permitted use or disclosure");
    d.cls(kDataSecurityPlan, "Data security plan");
    d.prop(kHasRecipient, kDataUsageAgreement, kOrganization);
    d.prop(kHasDataCustodian, kDataUsageAgreement, kOrganization);
    d.prop(kRequestedData, kDataUsageAgreement, kData);
    d.prop(kHasPermittedUseOrDisclosure, kDataUsageAgreement, kPermittedUseOrDisclosure);
    d.prop(kHasTermAndTermination, kDataUsageAgreement, kTermAndTermination);
    d.prop(kHasDataSecurityPlan, kDataUsageAgreement, kDataSecurityPlan);
    for (const auto& p : {kTerm, kTerminationEffect, kTerminationCause}) d.prop(p, kTermAndTermination, kPlainLiteral);
    for (const auto& p : {kStorage, kAccess, kProtections}) d.prop(p, kDataSecurityPlan, kPlainLiteral);
    const std::pair<const std::string*, const char*> uses[] = {
        {&kIrbApprovedResearch, "IRB approved research"},
        {&kPublicHealth, "Public health"},
        {&kHealthCareOperation, "Health care operation"}};
    for (const auto& [iri, label] : uses) {
      d.add(*iri, kRdfType, I(kPermittedUseOrDisclosure));
      d.add(*iri, kRdfsLabel, Term::literal(label));
    }

    // Contact-tracing vocabulary.
    d.cls(kData, "Data");
    d.cls(kOrganization, "Organization");
    d.prop(kIsAffiliatedWith, kUser, kOrganization);
    d.prop(kHasRole, kUser, kPlainLiteral);
    d.prop(kHasDataCategory, kOrganization, kRdfsClass);
    const std::pair<const char*, const char*> categories[] = {
        {"Patient", "Patient"},
        {"Encounter", "Encounter"},
        {"Observation", "Observation"},
        {"TestResult", "Test result"},
        {"ContactTrace", "Contact tracing"},
        {"PreExistingCondition", "Pre-existing condition"},
        {"Symptom", "Symptoms and clinical course"},
        {"Interview", "Interview"},
        {"RiskFactor", "Risk factor"},
        {"LocatingInformation", "Locating information"}};
    for (const auto& [local, label] : categories) d.cls(syn(local), label, kData);
    for (const auto& p : property_groups(kPatient)) d.prop(p, kPatient, "");
    for (const auto& p : property_groups(kEncounter)) d.prop(p, kEncounter, kPlainLiteral);
    for (const auto& p : property_groups(kObservation)) d.prop(p, kObservation, kPlainLiteral);
    return d.triples;
  }();
  return all;
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {dua("Organization"), kOrganization},
      {dua("Data"), kData},
      {tst("Organization"), kOrganization},
      {tst("Data"), kData},
  };
  return table;
}

std::optional<std::string> single_object(const Graph& g, const std::string& s, const std::string& p) {
  auto m = g.match({I(s), I(p), Variable{"o"}});
  if (m.empty()) return std::nullopt;
  return m.front().object.lexical();
}

std::vector<Term> objects(const Graph& g, const std::string& s, const std::string& p) {
  std::vector<Term> out;
  for (auto& t : g.match({I(s), I(p), Variable{"o"}})) out.push_back(std::move(t.object));
  return out;
}

bool is_a(const Graph& g, const std::string& s, const std::string& cls) {
  return g.contains(Triple{I(s), I(kRdfType), I(cls)});
}

std::string term_node(const std::string& dua_iri) { return dua_iri + "_term"; }
std::string plan_node(const std::string& dua_iri) { return dua_iri + "_security_plan"; }

}  // namespace

const std::vector<std::string>& permitted_uses() {
  static const std::vector<std::string> uses = {kIrbApprovedResearch, kPublicHealth, kHealthCareOperation};
  return uses;
}

const std::vector<std::string>& data_categories() {
  static const std::vector<std::string> cats = {
      kPatient,          kEncounter,     kObservation,       kTestResult,
      syn("ContactTrace"), syn("PreExistingCondition"), syn("Symptom"), syn("Interview"),
      syn("RiskFactor"), syn("LocatingInformation")};
  return cats;
}

const std::vector<std::string>& property_groups(const std::string& category) {
  static const std::map<std::string, std::vector<std::string>> groups = {
      {kPatient,
       {syn("hasTestResult"), syn("hasContact"), syn("hasPreExistingCondition"), syn("hasSymptom"),
        syn("hasInterview"), syn("hasRiskFactor"), syn("hasLocatingInformation"), syn("hasEncounter"),
        syn("hasObservation")}},
      {kEncounter, {syn("encounterDate"), syn("encounterType")}},
      {kObservation, {syn("observationCode"), syn("observationValue")}},
  };
  static const std::vector<std::string> none;
  auto it = groups.find(category);
  return it == groups.end() ? none : it->second;
}

const std::string& canonical_iri(const std::string& iri) {
  auto it = aliases().find(iri);
  return it == aliases().end() ? iri : it->second;
}

std::size_t canonicalize(Graph& graph) {
  std::vector<Triple> stale;
  for (const auto& [from, to] : aliases()) {
    Term alias = I(from);
    for (int pos = 0; pos < 3; ++pos) {
      TriplePattern p{Variable{"s"}, Variable{"p"}, Variable{"o"}};
      (pos == 0 ? p.subject : pos == 1 ? p.predicate : p.object) = alias;
      for (auto& t : graph.match(p)) stale.push_back(std::move(t));
    }
  }
  std::sort(stale.begin(), stale.end());
  stale.erase(std::unique(stale.begin(), stale.end()), stale.end());
  auto fix = [](const Term& t) { return t.is_iri() ? Term::iri(canonical_iri(t.lexical())) : t; };
  for (const auto& t : stale) {
    graph.remove(t);
    graph.insert(Triple{fix(t.subject), fix(t.predicate), fix(t.object)});
  }
  return stale.size();
}

std::size_t bootstrap_vocabulary(Graph& graph) {
  std::size_t added = 0;
  for (const auto& t : declarations()) added += graph.insert(t) ? 1 : 0;
  return added;
}

Graph vocabulary_graph() {
  Graph g;
  bootstrap_vocabulary(g);
  return g;
}

bool is_declared(const Graph& graph, const std::string& iri) {
  return is_a(graph, iri, kRdfsClass) || is_a(graph, iri, kRdfProperty) ||
         is_a(graph, iri, kPermittedUseOrDisclosure);
}

const char* to_string(PrincipalKind kind) {
  return kind == PrincipalKind::user ? "user" : "organization";
}

PrincipalRef read_principal(const Graph& graph, const std::string& iri) {
  PrincipalRef ref;
  ref.iri = iri;
  if (is_a(graph, iri, kUser)) {
    ref.kind = PrincipalKind::user;
    ref.affiliation = single_object(graph, iri, kIsAffiliatedWith);
  } else if (is_a(graph, iri, kOrganization)) {
    ref.kind = PrincipalKind::organization;
  } else {
    throw Error(ErrorCode::not_found, "no user or organization <" + iri + ">");
  }
  ref.label = single_object(graph, iri, kRdfsLabel).value_or("");
  return ref;
}

std::vector<PrincipalRef> list_principals(const Graph& graph) {
  std::vector<PrincipalRef> out;
  for (const auto* cls : {&kUser, &kOrganization}) {
    for (const auto& t : graph.match({Variable{"x"}, I(kRdfType), I(*cls)})) {
      if (t.subject.is_iri()) out.push_back(read_principal(graph, t.subject.lexical()));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.iri < b.iri; });
  return out;
}

DuaReadResult read_dua(const Graph& graph, const std::string& iri) {
  if (iri.empty() || !is_a(graph, iri, kDataUsageAgreement)) {
    throw Error(ErrorCode::not_found, "no data usage agreement <" + iri + ">");
  }
  DuaReadResult out;
  DuaRecord& r = out.record;
  r.iri = iri;
  r.custodian = single_object(graph, iri, kHasDataCustodian).value_or("");
  r.recipient = single_object(graph, iri, kHasRecipient).value_or("");
  if (r.custodian.empty()) out.warnings.push_back("no data custodian");
  if (r.recipient.empty()) out.warnings.push_back("no recipient");
  if (!r.custodian.empty() && r.custodian == r.recipient) {
    throw Error(ErrorCode::integrity, "DUA <" + iri + "> names the same organization as custodian and recipient");
  }
  // Categories may be stored as IRIs or as plain literals of the IRI.
  for (const auto& t : objects(graph, iri, kRequestedData)) r.requested_data.insert(t.lexical());
  for (const auto& t : objects(graph, iri, kHasPermittedUseOrDisclosure)) r.permitted_uses.insert(t.lexical());
  if (r.requested_data.empty()) out.warnings.push_back("no requested data categories");
  if (r.permitted_uses.empty()) out.warnings.push_back("no permitted use or disclosure");

  if (auto node = single_object(graph, iri, kHasTermAndTermination)) {
    r.term = single_object(graph, *node, kTerm).value_or("");
    r.termination_effect = single_object(graph, *node, kTerminationEffect).value_or("");
    r.termination_cause = single_object(graph, *node, kTerminationCause).value_or("");
  } else {
    out.warnings.push_back("no term and termination section");
  }
  if (auto node = single_object(graph, iri, kHasDataSecurityPlan)) {
    r.storage = single_object(graph, *node, kStorage).value_or("");
    r.access = single_object(graph, *node, kAccess).value_or("");
    r.protections = single_object(graph, *node, kProtections).value_or("");
  } else {
    out.warnings.push_back("no data security plan");
  }
  return out;
}

void validate_dua(const DuaRecord& r) {
  auto reject = [&](const std::string& why) {
    throw Error(ErrorCode::validation, "invalid DUA <" + r.iri + ">: " + why);
  };
  if (r.iri.empty()) reject("missing IRI");
  if (r.custodian.empty()) reject("missing custodian");
  if (r.recipient.empty()) reject("missing recipient");
  if (r.custodian == r.recipient) reject("custodian and recipient are the same organization");
  for (const auto& use : r.permitted_uses) {
    const auto& allowed = permitted_uses();
    if (std::find(allowed.begin(), allowed.end(), use) == allowed.end()) {
      reject("unknown permitted use <" + use + ">");
    }
  }
  for (const auto* s : {&r.iri, &r.custodian, &r.recipient}) {
    if (s->find_first_of(" \t\n") != std::string::npos) reject("IRI contains whitespace");
  }
}

std::size_t write_dua(Graph& graph, const DuaRecord& r) {
  validate_dua(r);
  std::vector<Triple> fresh;
  auto add = [&](const std::string& s, const std::string& p, Term o) {
    fresh.push_back(Triple{I(s), I(p), std::move(o)});
  };
  add(r.iri, kRdfType, I(kDataUsageAgreement));
  add(r.iri, kHasDataCustodian, I(r.custodian));
  add(r.iri, kHasRecipient, I(r.recipient));
  for (const auto& c : r.requested_data) add(r.iri, kRequestedData, Term::literal(c));
  for (const auto& u : r.permitted_uses) add(r.iri, kHasPermittedUseOrDisclosure, I(u));
  if (!r.term.empty() || !r.termination_effect.empty() || !r.termination_cause.empty()) {
    const std::string node = term_node(r.iri);
    add(r.iri, kHasTermAndTermination, I(node));
    add(node, kRdfType, I(kTermAndTermination));
    if (!r.term.empty()) add(node, kTerm, Term::literal(r.term));
    if (!r.termination_effect.empty()) add(node, kTerminationEffect, Term::literal(r.termination_effect));
    if (!r.termination_cause.empty()) add(node, kTerminationCause, Term::literal(r.termination_cause));
  }
  if (!r.storage.empty() || !r.access.empty() || !r.protections.empty()) {
    const std::string node = plan_node(r.iri);
    add(r.iri, kHasDataSecurityPlan, I(node));
    add(node, kRdfType, I(kDataSecurityPlan));
    if (!r.storage.empty()) add(node, kStorage, Term::literal(r.storage));
    if (!r.access.empty()) add(node, kAccess, Term::literal(r.access));
    if (!r.protections.empty()) add(node, kProtections, Term::literal(r.protections));
  }

  std::vector<Triple> stale = graph.match({I(r.iri), Variable{"p"}, Variable{"o"}});
  for (const auto* link : {&kHasTermAndTermination, &kHasDataSecurityPlan}) {
    for (const auto& node : objects(graph, r.iri, *link)) {
      if (!node.is_iri()) continue;
      auto sub = graph.match({node, Variable{"p"}, Variable{"o"}});
      stale.insert(stale.end(), sub.begin(), sub.end());
    }
  }
  for (const auto& t : stale) graph.remove(t);
  for (const auto& t : fresh) graph.insert(t);
  return fresh.size();
}

std::vector<std::string> duas_between(const Graph& graph, const std::string& custodian,
                                      const std::string& recipient) {
  std::vector<std::string> out;
  for (const auto& t : graph.match({Variable{"d"}, I(kHasDataCustodian), I(custodian)})) {
    if (graph.contains(Triple{t.subject, I(kHasRecipient), I(recipient)}) &&
        is_a(graph, t.subject.lexical(), kDataUsageAgreement)) {
      out.push_back(t.subject.lexical());
    }
  }
  return out;
}

ValidationReport validate_instances(const Graph& graph) {
  ValidationReport report;
  auto violation = [&](const std::string& iri, const char* rule, std::string message) {
    report.violations.push_back(Violation{iri, rule, std::move(message)});
  };
  for (const auto& t : graph.match({Variable{"u"}, I(kRdfType), I(kUser)})) {
    const std::string& user = t.subject.lexical();
    const auto n = graph.match({t.subject, I(kIsAffiliatedWith), Variable{"o"}}).size();
    if (n != 1) violation(user, "user-affiliation", "user has " + std::to_string(n) + " affiliations, expected 1");
  }
  for (const auto& t : graph.match({Variable{"d"}, I(kRdfType), I(kDataUsageAgreement)})) {
    const std::string& dua = t.subject.lexical();
    const auto custodians = graph.match({t.subject, I(kHasDataCustodian), Variable{"o"}}).size();
    const auto recipients = graph.match({t.subject, I(kHasRecipient), Variable{"o"}}).size();
    if (custodians != 1 || recipients != 1) {
      violation(dua, "dua-parties",
                "DUA has " + std::to_string(custodians) + " custodians and " + std::to_string(recipients) +
                    " recipients, expected 1 each");
    }
  }
  for (const auto* score : {&kBehaviorTrust, &kIdentityTrust, &kCredibilityTrust}) {
    for (const auto& t : graph.match({Variable{"x"}, I(*score), Variable{"v"}})) {
      const std::string& lex = t.object.lexical();
      double value = -1;
      auto [ptr, ec] = std::from_chars(lex.data(), lex.data() + lex.size(), value);
      const bool parsed = t.object.is_literal() && ec == std::errc{} && ptr == lex.data() + lex.size() &&
                          std::isfinite(value);
      if (!parsed || value < 0.0 || value > 1.0) {
        violation(t.subject.lexical(), "trust-range", "score '" + lex + "' is not a decimal in [0,1]");
      }
    }
  }
  return report;
}

}  // namespace trustmw::ontology
