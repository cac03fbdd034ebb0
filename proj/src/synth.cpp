#include "trustmw/synth.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <random>

#include "trustmw/error.hpp"
#include "trustmw/ontology.hpp"

namespace trustmw::synth {

using namespace ontology::vocab;

namespace {

Term I(const std::string& iri) { return Term::iri(iri); }
Term L(std::string lexical) { return Term::literal(std::move(lexical)); }

const Term& float_one() {
  static const Term one = Term::typed("1.0", iri::xsd_float());
  return one;
}

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const std::array<const char*, N>& values) {
  return values[rng() % N];
}

constexpr std::array<const char*, 5> kRoles = {"physician", "nurse", "research_scientist", "epidemiologist",
                                               "data_analyst"};

struct DuaProfile {
  std::vector<std::string> categories;
  std::string purpose;
};

DuaProfile profile(const GeneratorSpec& spec, std::size_t k) {
  DuaProfile p;
  if (k < spec.patient_dua_count) {
    p.categories.push_back(kPatient);
    switch (k % 4) {
      case 0: p.categories.insert(p.categories.end(), {kEncounter, kObservation}); break;
      case 1: p.categories.push_back(kObservation); break;
      case 3: p.categories.push_back(kEncounter); break;
      default: break;
    }
    p.purpose = k < spec.public_health_dua_count ? kPublicHealth
                : k % 2 == 0                     ? kIrbApprovedResearch
                                                 : kHealthCareOperation;
  } else {
    const std::size_t j = k - spec.patient_dua_count;
    switch (j % 3) {
      case 0: p.categories = {kEncounter}; break;
      case 1: p.categories = {kEncounter, kObservation}; break;
      default: p.categories = {kTestResult}; break;
    }
    p.purpose = j % 2 == 0 ? kIrbApprovedResearch : kHealthCareOperation;
  }
  return p;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (!(public_health_dua_count <= patient_dua_count && patient_dua_count <= dua_count && dua_count <= org_count)) {
    throw Error(ErrorCode::invalid_argument,
                "generator spec needs publicHealthDuaCount <= patientDuaCount <= duaCount <= orgCount");
  }
  if (org_count == 0 || user_count < org_count) {
    throw Error(ErrorCode::invalid_argument, "generator spec needs at least one user per organization");
  }
}

std::string custodian_iri() { return syn("org_custodian"); }
std::string org_iri(std::size_t n) { return syn("org_" + std::to_string(n)); }
std::string dua_iri(std::size_t k) { return syn("dua_" + std::to_string(k + 1)); }
std::string patient_iri(std::size_t i) { return syn("patient_" + std::to_string(i)); }
std::string user_iri(const std::string& label) { return syn(label); }

void append_demographics(Graph& g, const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  auto add = [&](const std::string& s, const std::string& p, Term o) { g.insert(Triple{I(s), I(p), std::move(o)}); };

  const std::string custodian = custodian_iri();
  add(custodian, kRdfType, I(kOrganization));
  add(custodian, kRdfsLabel, L("DataCustodian"));
  add(custodian, kCredibilityTrust, float_one());
  add(custodian, kIdentityTrust, float_one());
  for (const auto* c : {&kPatient, &kEncounter, &kObservation}) add(custodian, kHasDataCategory, I(*c));

  // Organization n (1-based) holds DUA k when holder[k] == n.
  std::vector<std::size_t> order(spec.org_count);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t n = 1; n <= spec.org_count; ++n) {
    add(org_iri(n), kRdfType, I(kOrganization));
    add(org_iri(n), kRdfsLabel, L("Org " + std::to_string(n)));
    add(org_iri(n), kCredibilityTrust, float_one());
    add(org_iri(n), kIdentityTrust, float_one());
  }

  for (std::size_t k = 0; k < spec.dua_count; ++k) {
    const auto p = profile(spec, k);
    ontology::DuaRecord r;
    r.iri = dua_iri(k);
    r.custodian = custodian;
    r.recipient = org_iri(order[k]);
    r.requested_data.insert(p.categories.begin(), p.categories.end());
    r.permitted_uses = {p.purpose};
    r.term = "12 months";
    r.termination_effect = "return or destroy all data";
    r.termination_cause = "material breach";
    r.storage = "encrypted at rest";
    r.access = "role based";
    r.protections = "audit logging";
    ontology::write_dua(g, r);
  }

  // Users are dealt round-robin over a shuffled organization list so each
  // organization gets user_count / org_count of them.
  std::vector<std::optional<std::string>> pinned(spec.org_count);
  auto pin = [&](std::size_t org_index, const char* label) {
    if (!pinned[org_index]) pinned[org_index] = label;
  };
  if (spec.dua_count > 0) pin(order[0] - 1, kPhysician105);
  if (spec.dua_count > 1) pin(order[1] - 1, kNurse207);
  if (spec.dua_count > 5) pin(order[5] - 1, kNurse629);
  if (spec.dua_count < spec.org_count) pin(order[spec.dua_count] - 1, kResearchScientist731);

  for (std::size_t u = 0; u < spec.user_count; ++u) {
    const std::size_t org_index = u % spec.org_count;
    std::string label;
    std::string role;
    if (u < spec.org_count && pinned[org_index]) {
      label = *pinned[org_index];
      role = label.substr(0, label.rfind('_'));
    } else {
      role = pick(rng, kRoles);
      label = role + "_" + std::to_string(1000 + u);
    }
    const std::string iri = user_iri(label);
    add(iri, kRdfType, I(kUser));
    add(iri, kRdfsLabel, L(label));
    add(iri, kIsAffiliatedWith, I(org_iri(org_index + 1)));
    add(iri, kHasRole, L(role));
    add(iri, kBehaviorTrust, float_one());
    add(iri, kIdentityTrust, float_one());
  }
}

Graph generate_demographics(const GeneratorSpec& spec) {
  Graph g;
  append_demographics(g, spec);
  return g;
}

void append_patients(Graph& g, const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  static constexpr std::array<const char*, 3> kTestResults = {"positive", "negative", "inconclusive"};
  static constexpr std::array<const char*, 5> kConditions = {"none", "diabetes", "hypertension", "asthma", "copd"};
  static constexpr std::array<const char*, 5> kSymptoms = {"fever", "cough", "fatigue", "anosmia", "asymptomatic"};
  static constexpr std::array<const char*, 3> kInterviews = {"completed", "pending", "declined"};
  static constexpr std::array<const char*, 4> kRisks = {"healthcare worker", "congregate setting", "travel", "none"};
  static constexpr std::array<const char*, 4> kEncounterTypes = {"outpatient", "inpatient", "emergency",
                                                                 "telehealth"};
  static constexpr std::array<const char*, 4> kCodes = {"94500-6", "94309-2", "8310-5", "8867-4"};

  const auto& facets = ontology::property_groups(kPatient);
  const auto& enc_props = ontology::property_groups(kEncounter);
  const auto& obs_props = ontology::property_groups(kObservation);
  const Term type = I(kRdfType);
  const Term patient_cls = I(kPatient);
  const Term encounter_cls = I(kEncounter);
  const Term observation_cls = I(kObservation);

  for (std::size_t i = 0; i < spec.patient_count; ++i) {
    const Term patient = I(patient_iri(i));
    const Term encounter = I(syn("encounter_" + std::to_string(i)));
    const Term observation = I(syn("observation_" + std::to_string(i)));
    const std::size_t contact = rng() % spec.patient_count;
    char date[16];
    std::snprintf(date, sizeof date, "2020-%02d-%02d", static_cast<int>(rng() % 12 + 1),
                  static_cast<int>(rng() % 28 + 1));

    g.insert(Triple{patient, type, patient_cls});
    // Facet order follows property_groups(Patient).
    const Term values[] = {L(pick(rng, kTestResults)),
                           I(patient_iri(contact)),
                           L(pick(rng, kConditions)),
                           L(pick(rng, kSymptoms)),
                           L(pick(rng, kInterviews)),
                           L(pick(rng, kRisks)),
                           L("zip " + std::to_string(10000 + rng() % 90000)),
                           encounter,
                           observation};
    for (std::size_t f = 0; f < facets.size(); ++f) g.insert(Triple{patient, I(facets[f]), values[f]});

    g.insert(Triple{encounter, type, encounter_cls});
    g.insert(Triple{encounter, I(enc_props[0]), L(date)});
    g.insert(Triple{encounter, I(enc_props[1]), L(pick(rng, kEncounterTypes))});

    g.insert(Triple{observation, type, observation_cls});
    g.insert(Triple{observation, I(obs_props[0]), L(pick(rng, kCodes))});
    g.insert(Triple{observation, I(obs_props[1]), L(std::to_string(rng() % 1000) + "." + std::to_string(rng() % 10))});
  }
}

Graph generate_patients(const GeneratorSpec& spec) {
  Graph g;
  append_patients(g, spec);
  return g;
}

Graph generate(const GeneratorSpec& spec) {
  Graph g = ontology::vocabulary_graph();
  append_demographics(g, spec);
  append_patients(g, spec);
  return g;
}

std::size_t strip_category(Graph& g, const std::string& category) {
  std::vector<Triple> doomed = g.match({I(custodian_iri()), I(kHasDataCategory), I(category)});
  for (const auto& t : g.match({Variable{"i"}, I(kRdfType), I(category)})) {
    auto sub = g.match({t.subject, Variable{"p"}, Variable{"o"}});
    doomed.insert(doomed.end(), sub.begin(), sub.end());
  }
  std::size_t removed = 0;
  for (const auto& t : doomed) removed += g.remove(t) ? 1 : 0;
  return removed;
}

std::size_t strip_properties(Graph& g, const std::string& predicate) {
  std::size_t removed = 0;
  for (const auto& t : g.match({Variable{"s"}, I(predicate), Variable{"o"}})) removed += g.remove(t) ? 1 : 0;
  return removed;
}

}  // namespace trustmw::synth
