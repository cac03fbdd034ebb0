#pragma once

// Reference policy queries, kept byte for byte as parser and evaluator fixtures.

namespace trustmw::testing {

inline constexpr const char* kListingDuaExists = R"(ASK{
   ?dataCustodian a syn:Organization . 
   ?dataCustodian rdfs:label "DataCustodian"^^rdf:PlainLiteral . 
   ?user a tst:User . 
   ?user rdfs:label "physician_105"^^rdf:PlainLiteral . 
   ?user syn:isAffiliatedWith ?organization . 
   ?dua a dua:DataUsageAgreement . 
   ?dua dua:hasRecipient ?organization . 
   ?dua dua:hasDataCustodian ?dataCustodian . 
})";

inline constexpr const char* kListingRequestedData = R"(ASK{
   ?dataCustodian a syn:Organization . 
   ?dataCustodian rdfs:label "DataCustodian"^^rdf:PlainLiteral . 
   ?user a tst:User . 
   ?user rdfs:label "nurse_207"^^rdf:PlainLiteral . 
   ?user syn:isAffiliatedWith ?organization . 
   ?dua a dua:DataUsageAgreement . 
   ?dua dua:hasRecipient ?organization . 
   ?dua dua:hasDataCustodian ?dataCustodian . 
   ?dua dua:requestedData syn:Patient^^rdf:PlainLiteral . 
})";

inline constexpr const char* kListingCustodianCategory = R"(ASK {
  ?dataCustodian a syn:Organization .
  ?dataCustodian rdfs:label "DataCustodian"^^rdf:PlainLiteral .
  ?user a tst:User .
  ?user rdfs:label "nurse_629"^^rdf:PlainLiteral .
  ?user syn:isAffiliatedWith ?org .
  ?dua a dua:DataUsageAgreement .
  ?dua dua:hasRecipient ?org .
  ?dua dua:hasDataCustodian ?dataCustodian .
  ?dua dua:requestedData ?requestedData.
  FILTER(STR(?requestedData) IN ( STR(syn:Encounter), STR(syn:Observation), STR(syn:Patient)))
})";

inline constexpr const char* kListingBehaviorUpdate = R"(DELETE {
   ?user tst:behaviorTrust "1.0"^^xsd:float . 
}
INSERT {
   ?user tst:behaviorTrust "0.9"^^xsd:float . 
}
WHERE {
   ?user a tst:User . 
   ?user rdfs:label "research_scientist_731"^^rdf:PlainLiteral . 
})";

}  // namespace trustmw::testing
