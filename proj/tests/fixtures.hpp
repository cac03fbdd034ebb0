#pragma once

#include <string>

#include "trustmw/graph.hpp"

namespace trustmw::testing {

inline std::string syn(const std::string& local) { return std::string(iri::syn) + local; }
inline std::string dua(const std::string& local) { return std::string(iri::dua) + local; }
inline std::string tst(const std::string& local) { return std::string(iri::tst) + local; }
inline std::string rdfs(const std::string& local) { return std::string(iri::rdfs) + local; }

inline Term I(const std::string& iri) { return Term::iri(iri); }
inline Term L(const std::string& lexical) { return Term::literal(lexical); }
inline Triple T(Term s, Term p, Term o) { return Triple::make(std::move(s), std::move(p), std::move(o)); }

// One user in an organization holding a single DUA with the custodian.
inline const char* kDuaScenarioLines = R"(# twelve-triple DUA scenario
syn:org_custodian rdf:type syn:Organization .
syn:org_custodian rdfs:label "DataCustodian" .
syn:org_1 rdf:type syn:Organization .
syn:org_1 rdfs:label "Org 1" .
syn:user_105 rdf:type tst:User .
syn:user_105 rdfs:label "physician_105" .
syn:user_105 syn:isAffiliatedWith syn:org_1 .
syn:dua_1 rdf:type dua:DataUsageAgreement .
syn:dua_1 dua:hasRecipient syn:org_1 .
syn:dua_1 dua:hasDataCustodian syn:org_custodian .
syn:dua_1 dua:requestedData "http://example.org/contact-tracing#Patient" .
syn:dua_1 dua:hasPermittedUseOrDisclosure dua:PublicHealth .
)";

inline Graph dua_scenario() {
  Graph g;
  load_lines(g, kDuaScenarioLines);
  return g;
}

}  // namespace trustmw::testing
