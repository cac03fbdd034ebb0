#include "trustmw/term.hpp"

#include <charconv>
#include <cmath>

#include "trustmw/error.hpp"

namespace trustmw {

namespace iri {
std::string rdf_type() { return std::string(rdf) + "type"; }
std::string rdf_plain_literal() { return std::string(rdf) + "PlainLiteral"; }
std::string xsd_float() { return std::string(xsd) + "float"; }
}  // namespace iri

namespace {

bool has_whitespace(std::string_view s) {
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return true;
  }
  return false;
}

bool is_finite_decimal(std::string_view s) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return false;
  // from_chars accepts "inf" and "nan" spellings.
  for (const char* p = first; p != last; ++p) {
    if (std::isalpha(static_cast<unsigned char>(*p)) && *p != 'e' && *p != 'E') return false;
  }
  return std::isfinite(value);
}

}  // namespace

Term Term::iri(std::string value) {
  if (value.empty() || has_whitespace(value)) {
    throw Error(ErrorCode::invalid_argument, "invalid IRI '" + value + "'");
  }
  return Term(TermKind::iri, std::move(value), {});
}

Term Term::literal(std::string lexical) {
  return Term(TermKind::plain_literal, std::move(lexical), {});
}

Term Term::typed(std::string lexical, std::string datatype) {
  if (datatype.empty() || has_whitespace(datatype)) {
    throw Error(ErrorCode::invalid_argument, "invalid datatype IRI '" + datatype + "'");
  }
  if (datatype == iri::rdf_plain_literal()) return literal(std::move(lexical));
  if (datatype == iri::xsd_float() && !is_finite_decimal(lexical)) {
    throw Error(ErrorCode::invalid_argument,
                "xsd:float literal '" + lexical + "' is not a finite decimal");
  }
  return Term(TermKind::typed_literal, std::move(lexical), std::move(datatype));
}

std::string Term::to_line() const {
  switch (kind_) {
    case TermKind::iri:
      return "<" + lexical_ + ">";
    case TermKind::plain_literal:
      return "\"" + escape_literal(lexical_) + "\"";
    case TermKind::typed_literal:
      return "\"" + escape_literal(lexical_) + "\"^^<" + datatype_ + ">";
  }
  return {};
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.lexical_ <=> b.lexical_; c != 0) return c;
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  return a.datatype_ <=> b.datatype_;
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
  std::size_t h = std::hash<std::string>{}(t.lexical());
  h ^= std::hash<std::string>{}(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h ^ static_cast<std::size_t>(t.kind());
}

Triple Triple::make(Term subject, Term predicate, Term object) {
  if (!subject.is_iri()) {
    throw Error(ErrorCode::invalid_argument, "triple subject must be an IRI, got " + subject.to_line());
  }
  if (!predicate.is_iri()) {
    throw Error(ErrorCode::invalid_argument,
                "triple predicate must be an IRI, got " + predicate.to_line());
  }
  return Triple{std::move(subject), std::move(predicate), std::move(object)};
}

std::string to_line(const Triple& t) {
  return t.subject.to_line() + " " + t.predicate.to_line() + " " + t.object.to_line() + " .";
}

Namespaces::Namespaces() {
  map_.emplace("rdf", iri::rdf);
  map_.emplace("rdfs", iri::rdfs);
  map_.emplace("xsd", iri::xsd);
  map_.emplace("owl", iri::owl);
  map_.emplace("syn", iri::syn);
  map_.emplace("dua", iri::dua);
  map_.emplace("tst", iri::tst);
}

void Namespaces::add(std::string prefix, std::string base) {
  map_[std::move(prefix)] = std::move(base);
}

std::optional<std::string> Namespaces::find(std::string_view prefix) const {
  auto it = map_.find(prefix);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::string Namespaces::expand(std::string_view prefixed) const {
  auto colon = prefixed.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "not a prefixed name: " + std::string(prefixed));
  }
  auto base = find(prefixed.substr(0, colon));
  if (!base) {
    throw Error(ErrorCode::not_found,
                "unknown prefix '" + std::string(prefixed.substr(0, colon)) + "'");
  }
  return *base + std::string(prefixed.substr(colon + 1));
}

std::string escape_literal(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size());
  for (char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace trustmw
