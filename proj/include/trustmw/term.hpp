#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace trustmw {

namespace iri {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view syn = "http://example.org/contact-tracing#";
inline constexpr std::string_view dua = "http://example.org/dua#";
inline constexpr std::string_view tst = "http://example.org/trust#";

std::string rdf_type();
std::string rdf_plain_literal();
std::string xsd_float();
}  // namespace iri

enum class TermKind : unsigned char { iri, plain_literal, typed_literal };

// An RDF term. Literal equality is lexical: "1.0" and "1.00" differ.
class Term {
 public:
  Term() = default;

  static Term iri(std::string value);
  static Term literal(std::string lexical);
  // A datatype of rdf:PlainLiteral collapses to a plain literal.
  static Term typed(std::string lexical, std::string datatype);

  TermKind kind() const noexcept { return kind_; }
  const std::string& lexical() const noexcept { return lexical_; }
  const std::string& datatype() const noexcept { return datatype_; }
  bool is_iri() const noexcept { return kind_ == TermKind::iri; }
  bool is_literal() const noexcept { return kind_ != TermKind::iri; }

  // Line-format spelling: <iri>, or a quoted literal with optional ^^<dt>.
  std::string to_line() const;

  friend bool operator==(const Term&, const Term&) = default;
  // Ordered by lexical form first so sorted output reads naturally.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  Term(TermKind kind, std::string lexical, std::string datatype)
      : kind_(kind), lexical_(std::move(lexical)), datatype_(std::move(datatype)) {}

  TermKind kind_ = TermKind::iri;
  std::string lexical_;
  std::string datatype_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  // Throws Error(invalid_argument) unless subject and predicate are IRIs.
  static Triple make(Term subject, Term predicate, Term object);

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

std::string to_line(const Triple& t);

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

inline bool is_variable(const PatternTerm& p) {
  return std::holds_alternative<Variable>(p);
}

// Prefix -> namespace IRI map used for prefixed-name expansion.
class Namespaces {
 public:
  // Pre-registers the project prefixes (syn/dua/tst) and rdf/rdfs/xsd/owl.
  Namespaces();

  void add(std::string prefix, std::string base);
  std::optional<std::string> find(std::string_view prefix) const;
  // "syn:Patient" -> absolute IRI; throws Error(not_found) for an unknown prefix.
  std::string expand(std::string_view prefixed) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return map_; }

 private:
  std::map<std::string, std::string, std::less<>> map_;
};

// Escapes whatever would break a quoted literal.
std::string escape_literal(std::string_view lexical);

}  // namespace trustmw
