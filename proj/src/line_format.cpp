#include <fstream>
#include <sstream>

#include "trustmw/error.hpp"
#include "trustmw/graph.hpp"

namespace trustmw {

namespace {

class LineParser {
 public:
  LineParser(const Namespaces& ns, std::string_view line, std::size_t line_no)
      : ns_(ns), line_(line), line_no_(line_no) {}

  Triple parse() {
    Term s = subject_or_predicate("subject");
    Term p = subject_or_predicate("predicate");
    Term o = object();
    skip_space();
    expect('.');
    skip_space();
    if (pos_ != line_.size()) fail("trailing characters after '.'");
    return Triple{std::move(s), std::move(p), std::move(o)};
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_no_, pos_ + 1, message);
  }

  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    if (pos_ >= line_.size() || line_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string iri_ref() {
    expect('<');
    auto end = line_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated IRI");
    std::string value(line_.substr(pos_, end - pos_));
    if (value.empty() || value.find_first_of(" \t\"<") != std::string::npos) fail("malformed IRI");
    pos_ = end + 1;
    return value;
  }

  std::string prefixed_name() {
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
    // "syn:x ." and "syn:x." both end the name before the final dot.
    std::string_view token = line_.substr(start, pos_ - start);
    if (pos_ == line_.size() && !token.empty() && token.back() == '.') {
      token.remove_suffix(1);
      --pos_;
    }
    auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      pos_ = start;
      fail("expected '<', '\"' or a prefixed name");
    }
    auto base = ns_.find(token.substr(0, colon));
    if (!base) {
      pos_ = start;
      fail("unknown prefix '" + std::string(token.substr(0, colon)) + "'");
    }
    return *base + std::string(token.substr(colon + 1));
  }

  std::string iri_or_name() {
    if (pos_ < line_.size() && line_[pos_] == '<') return iri_ref();
    return prefixed_name();
  }

  Term subject_or_predicate(const char* role) {
    skip_space();
    if (pos_ >= line_.size()) fail(std::string("missing ") + role);
    if (line_[pos_] == '"') fail(std::string(role) + " must be an IRI");
    return Term::iri(iri_or_name());
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= line_.size()) fail("unterminated literal");
      char c = line_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= line_.size()) fail("dangling escape");
      char e = line_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        default: --pos_; fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  Term object() {
    skip_space();
    if (pos_ >= line_.size()) fail("missing object");
    if (line_[pos_] != '"') return Term::iri(iri_or_name());
    std::string lexical = quoted();
    if (line_.substr(pos_, 2) != "^^") return Term::literal(std::move(lexical));
    pos_ += 2;
    const std::size_t at = pos_;
    std::string datatype = iri_or_name();
    try {
      return Term::typed(std::move(lexical), std::move(datatype));
    } catch (const Error& e) {
      pos_ = at;
      fail(e.what());
    }
  }

  const Namespaces& ns_;
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

std::size_t load_lines(Graph& graph, std::istream& in) {
  std::size_t added = 0;
  std::size_t line_no = 0;
  std::string line;
  // Parse everything first so a syntax error leaves the graph untouched.
  std::vector<Triple> parsed;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank_or_comment(line)) continue;
    parsed.push_back(LineParser(graph.namespaces(), line, line_no).parse());
  }
  for (const Triple& t : parsed) added += graph.insert(t) ? 1 : 0;
  return added;
}

std::size_t load_lines(Graph& graph, std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_lines(graph, in);
}

std::size_t load_file(Graph& graph, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return load_lines(graph, in);
}

std::string serialize_lines(const Graph& graph) {
  std::string out;
  for (const Triple& t : graph.triples()) {
    out += to_line(t);
    out += '\n';
  }
  return out;
}

}  // namespace trustmw
