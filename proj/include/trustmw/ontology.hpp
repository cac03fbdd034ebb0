#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trustmw/graph.hpp"

namespace trustmw::ontology {

// Vocabulary IRIs shared by every module. Contact-tracing (syn:) classes
// replace the Data/Organization classes of the DUA and trust vocabularies.
namespace vocab {
std::string syn(std::string_view local);
std::string dua(std::string_view local);
std::string tst(std::string_view local);

inline const std::string kRdfType = iri::rdf_type();
inline const std::string kRdfsClass = std::string(iri::rdfs) + "Class";
inline const std::string kRdfProperty = std::string(iri::rdf) + "Property";
inline const std::string kRdfsLabel = std::string(iri::rdfs) + "label";
inline const std::string kRdfsSubClassOf = std::string(iri::rdfs) + "subClassOf";
inline const std::string kRdfsDomain = std::string(iri::rdfs) + "domain";
inline const std::string kRdfsRange = std::string(iri::rdfs) + "range";

inline const std::string kData = syn("Data");
inline const std::string kOrganization = syn("Organization");
inline const std::string kPatient = syn("Patient");
inline const std::string kEncounter = syn("Encounter");
inline const std::string kObservation = syn("Observation");
inline const std::string kTestResult = syn("TestResult");
inline const std::string kIsAffiliatedWith = syn("isAffiliatedWith");
inline const std::string kHasRole = syn("hasRole");
inline const std::string kHasDataCategory = syn("hasDataCategory");

inline const std::string kUser = tst("User");
inline const std::string kBehaviorTrust = tst("behaviorTrust");
inline const std::string kIdentityTrust = tst("identityTrust");
inline const std::string kCredibilityTrust = tst("credibilityTrust");

inline const std::string kDataUsageAgreement = dua("DataUsageAgreement");
inline const std::string kTermAndTermination = dua("TermAndTermination");
inline const std::string kPermittedUseOrDisclosure = dua("PermittedUseOrDisclosure");
inline const std::string kDataSecurityPlan = dua("DataSecurityPlan");
inline const std::string kHasRecipient = dua("hasRecipient");
inline const std::string kHasDataCustodian = dua("hasDataCustodian");
inline const std::string kRequestedData = dua("requestedData");
inline const std::string kHasPermittedUseOrDisclosure = dua("hasPermittedUseOrDisclosure");
inline const std::string kHasTermAndTermination = dua("hasTermAndTermination");
inline const std::string kHasDataSecurityPlan = dua("hasDataSecurityPlan");
inline const std::string kTerm = dua("term");
inline const std::string kTerminationEffect = dua("terminationEffect");
inline const std::string kTerminationCause = dua("terminationCause");
inline const std::string kStorage = dua("storage");
inline const std::string kAccess = dua("access");
inline const std::string kProtections = dua("protections");

inline const std::string kIrbApprovedResearch = dua("IRBApprovedResearch");
inline const std::string kPublicHealth = dua("PublicHealth");
inline const std::string kHealthCareOperation = dua("HealthCareOperation");
}  // namespace vocab

// The enumerated permitted-use individuals.
const std::vector<std::string>& permitted_uses();
// Data-category classes (subclasses of syn:Data).
const std::vector<std::string>& data_categories();
// Predicates every instance of the category is expected to carry. Empty for
// categories without instance data.
const std::vector<std::string>& property_groups(const std::string& category);

// Maps superseded DUA/trust Data and Organization class IRIs to syn:.
const std::string& canonical_iri(const std::string& iri);
// Rewrites triples that mention superseded IRIs. Returns triples rewritten.
std::size_t canonicalize(Graph& graph);

// Adds the vocabulary declarations. Idempotent.
std::size_t bootstrap_vocabulary(Graph& graph);
// Declarations as a standalone graph, in the shipped line format.
Graph vocabulary_graph();
// True if the vocabulary declares the IRI (permitted uses count).
bool is_declared(const Graph& graph, const std::string& iri);

enum class PrincipalKind { user, organization };

struct PrincipalRef {
  std::string iri;
  PrincipalKind kind = PrincipalKind::user;
  std::string label;
  std::optional<std::string> affiliation;  // users only

  friend bool operator==(const PrincipalRef&, const PrincipalRef&) = default;
};

const char* to_string(PrincipalKind kind);

// Throws Error(not_found) if the IRI is neither a tst:User nor an
// syn:Organization.
PrincipalRef read_principal(const Graph& graph, const std::string& iri);
// Every user and organization in the graph, sorted by IRI.
std::vector<PrincipalRef> list_principals(const Graph& graph);

struct DuaRecord {
  std::string iri;
  std::string custodian;
  std::string recipient;
  std::set<std::string> requested_data;
  std::set<std::string> permitted_uses;
  std::string term;
  std::string termination_effect;
  std::string termination_cause;
  std::string storage;
  std::string access;
  std::string protections;

  friend bool operator==(const DuaRecord&, const DuaRecord&) = default;
};

struct DuaReadResult {
  DuaRecord record;
  std::vector<std::string> warnings;
};

DuaReadResult read_dua(const Graph& graph, const std::string& iri);
// Replaces every triple rooted at record.iri (including its term and
// security-plan nodes). Throws Error(validation) and leaves the graph
// untouched when the record is invalid.
std::size_t write_dua(Graph& graph, const DuaRecord& record);
void validate_dua(const DuaRecord& record);
// DUAs naming the custodian/recipient pair, sorted.
std::vector<std::string> duas_between(const Graph& graph, const std::string& custodian,
                                      const std::string& recipient);

struct Violation {
  std::string iri;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

// Rules: "user-affiliation" (exactly one organization per user),
// "dua-parties" (one custodian and one recipient per DUA) and "trust-range"
// (score literals are decimals in [0,1]).
ValidationReport validate_instances(const Graph& graph);

}  // namespace trustmw::ontology
