#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trustmw/graph.hpp"

namespace trustmw::synth {

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::size_t patient_count = 1000;
  std::size_t org_count = 10;
  std::size_t user_count = 100;
  std::size_t dua_count = 7;
  std::size_t patient_dua_count = 4;
  std::size_t public_health_dua_count = 2;

  // Throws Error(invalid_argument) unless
  // publicHealth <= patient <= dua <= org and user_count >= org_count.
  void validate() const;
};

// Fixed names of the generated universe.
std::string custodian_iri();  // labelled "DataCustodian"
std::string org_iri(std::size_t n);      // n in 1..org_count
std::string dua_iri(std::size_t k);      // k in 0..dua_count-1
std::string patient_iri(std::size_t i);  // i in 0..patient_count-1

// Users with fixed labels: the first user of the organization holding DUA 0
// is physician_105, nurse_207 belongs to the holder of DUA 1, nurse_629 to
// the holder of DUA 5 and research_scientist_731 to an organization without
// a DUA. Each is placed only when the spec has room for it.
inline constexpr const char* kPhysician105 = "physician_105";
inline constexpr const char* kNurse207 = "nurse_207";
inline constexpr const char* kNurse629 = "nurse_629";
inline constexpr const char* kResearchScientist731 = "research_scientist_731";
std::string user_iri(const std::string& label);

// Organizations, users, DUAs with the custodian, the custodian's category
// inventory and the initial trust projection.
void append_demographics(Graph& graph, const GeneratorSpec& spec);
Graph generate_demographics(const GeneratorSpec& spec);

// patient_count Patient individuals with one triple per facet group, each
// linked to its own Encounter and Observation individual.
void append_patients(Graph& graph, const GeneratorSpec& spec);
Graph generate_patients(const GeneratorSpec& spec);

// Everything above in one graph, vocabulary included.
Graph generate(const GeneratorSpec& spec);

// Removes the custodian's inventory entry for the category and every triple
// whose subject is an instance of it. Links pointing at removed instances
// stay. Returns the number of triples removed.
std::size_t strip_category(Graph& graph, const std::string& category);
// Removes every triple with the predicate.
std::size_t strip_properties(Graph& graph, const std::string& predicate);

}  // namespace trustmw::synth
