#include <algorithm>
#include <cctype>
#include <set>

#include "trustmw/error.hpp"
#include "trustmw/query.hpp"

namespace trustmw::query {

namespace {

enum class Tok { iri, pname, var, string, word, punct, datatype_mark, number, langtag, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Token t;
      t.line = line_;
      t.column = pos_ - line_start_ + 1;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, pos_ - line_start_ + 1, message);
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        line_start_ = pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  void lex_one(Token& t) {
    const char c = text_[pos_];
    if (c == '<') {
      auto end = text_.find_first_of(">\n \t", pos_ + 1);
      if (end != std::string_view::npos && text_[end] == '>') {
        t.kind = Tok::iri;
        t.text = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        return;
      }
      t.kind = Tok::punct;
      t.text = "<";
      ++pos_;
      return;
    }
    if (c == '?' || c == '$') {
      std::size_t start = ++pos_;
      while (pos_ < text_.size() && (name_char(text_[pos_]) && text_[pos_] != '-')) ++pos_;
      if (pos_ == start) fail("empty variable name");
      t.kind = Tok::var;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (c == '"' || c == '\'') {
      t.kind = Tok::string;
      t.text = quoted(c);
      return;
    }
    if (c == '^' && text_.substr(pos_, 2) == "^^") {
      t.kind = Tok::datatype_mark;
      t.text = "^^";
      pos_ += 2;
      return;
    }
    if (c == '@') {
      std::size_t start = ++pos_;
      while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
      t.kind = Tok::langtag;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      t.kind = Tok::number;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (name_start(c) || c == ':') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == ':') {
        ++pos_;
        while (pos_ < text_.size() && (name_char(text_[pos_]) || text_[pos_] == '.')) ++pos_;
        // A local name never ends in '.', that dot terminates the triple.
        while (text_[pos_ - 1] == '.') --pos_;
        t.kind = Tok::pname;
      } else {
        t.kind = Tok::word;
      }
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    t.kind = Tok::punct;
    t.text = std::string(1, c);
    ++pos_;
  }

  std::string quoted(char quote) {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == quote) return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("dangling escape");
      char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

const std::set<std::string>& unsupported_words() {
  static const std::set<std::string> words = {
      "OPTIONAL", "UNION",  "GRAPH", "MINUS",    "BIND",    "VALUES", "SERVICE",
      "CONSTRUCT", "DESCRIBE", "FROM", "NAMED",  "DISTINCT", "REDUCED", "ORDER",
      "LIMIT",    "OFFSET", "GROUP", "HAVING",   "LOAD",    "CLEAR",  "DROP",
      "CREATE",   "ADD",    "MOVE",  "COPY",     "WITH",    "USING",  "BASE",
      "NOT",      "EXISTS", "REGEX", "LANG",     "DATATYPE", "BOUND", "DATA"};
  return words;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Namespaces& ns) : toks_(std::move(tokens)), ns_(ns) {}

  QueryAst run() {
    prologue();
    const Token& head = peek();
    std::string w = head.kind == Tok::word ? upper(head.text) : "";
    if (w == "ASK") {
      next();
      ast_.form = Form::ask;
      optional_where();
      group(ast_.bgp);
    } else if (w == "SELECT") {
      next();
      ast_.form = Form::select;
      select_clause();
      optional_where();
      group(ast_.bgp);
    } else if (w == "DELETE" || w == "INSERT") {
      ast_.form = Form::update;
      update();
    } else {
      reject_unsupported(head);
      fail(head, "expected ASK, SELECT, DELETE or INSERT");
    }
    if (peek().kind != Tok::end) {
      reject_unsupported(peek());
      fail(peek(), "unexpected '" + peek().text + "' after query body");
    }
    validate();
    return std::move(ast_);
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& message) {
    throw ParseError(t.line, t.column, message);
  }

  [[noreturn]] static void unsupported(const Token& t, const std::string& construct) {
    throw Error(ErrorCode::unsupported, std::to_string(t.line) + ":" + std::to_string(t.column) +
                                            ": unsupported feature: " + construct);
  }

  static void reject_unsupported(const Token& t) {
    if (t.kind == Tok::word && unsupported_words().count(upper(t.text))) unsupported(t, upper(t.text));
  }

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is_punct(const Token& t, char c) const {
    return t.kind == Tok::punct && t.text.size() == 1 && t.text[0] == c;
  }
  bool is_word(const Token& t, std::string_view w) const {
    return t.kind == Tok::word && upper(t.text) == w;
  }
  void expect_punct(char c) {
    const Token& t = next();
    if (!is_punct(t, c)) fail(t, std::string("expected '") + c + "'");
  }

  void prologue() {
    while (is_word(peek(), "PREFIX")) {
      next();
      const Token& name = next();
      if (name.kind != Tok::pname || name.text.back() != ':') fail(name, "expected prefix name");
      const Token& iri = next();
      if (iri.kind != Tok::iri) fail(iri, "expected IRI for prefix");
      ast_.prologue[name.text.substr(0, name.text.size() - 1)] = iri.text;
    }
    if (is_word(peek(), "BASE")) unsupported(peek(), "BASE");
  }

  void optional_where() {
    if (is_word(peek(), "WHERE")) next();
    reject_unsupported(peek());
  }

  void select_clause() {
    reject_unsupported(peek());
    if (is_punct(peek(), '*')) {
      next();
      select_all_ = true;
      return;
    }
    while (peek().kind == Tok::var) ast_.projection.push_back(next().text);
    if (is_punct(peek(), '(')) unsupported(peek(), "projection expression");
    if (ast_.projection.empty()) fail(peek(), "expected projection variables or '*'");
  }

  void update() {
    if (is_word(peek(), "DELETE")) {
      next();
      if (is_word(peek(), "WHERE")) unsupported(peek(), "DELETE WHERE");
      reject_unsupported(peek());
      template_block(ast_.delete_template);
    }
    if (is_word(peek(), "INSERT")) {
      next();
      reject_unsupported(peek());
      template_block(ast_.insert_template);
    }
    reject_unsupported(peek());
    if (!is_word(peek(), "WHERE")) fail(peek(), "expected WHERE");
    next();
    group(ast_.bgp);
  }

  void template_block(std::vector<TriplePattern>& out) {
    std::vector<FilterExpr> none;
    block(out, none, /*allow_filters=*/false);
  }

  void group(std::vector<TriplePattern>& out) { block(out, ast_.filters, true); }

  void block(std::vector<TriplePattern>& out, std::vector<FilterExpr>& filters, bool allow_filters) {
    expect_punct('{');
    while (!is_punct(peek(), '}')) {
      const Token& t = peek();
      if (t.kind == Tok::end) fail(t, "unterminated group, expected '}'");
      if (is_punct(t, '{')) unsupported(t, "nested group pattern");
      reject_unsupported(t);
      if (is_word(t, "FILTER")) {
        if (!allow_filters) fail(t, "FILTER not allowed in update template");
        next();
        filters.push_back(filter());
        if (is_punct(peek(), '.')) next();
        continue;
      }
      out.push_back(triple());
      const Token& sep = peek();
      if (is_punct(sep, '.')) {
        next();
      } else if (is_punct(sep, ';')) {
        unsupported(sep, "predicate-object list ';'");
      } else if (is_punct(sep, ',')) {
        unsupported(sep, "object list ','");
      } else if (!is_punct(sep, '}') && !is_word(sep, "FILTER")) {
        reject_unsupported(sep);
        fail(sep, "expected '.' or '}' after triple pattern");
      }
    }
    next();
  }

  std::string resolve(const Token& t) {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    if (auto it = ast_.prologue.find(prefix); it != ast_.prologue.end()) {
      return it->second + t.text.substr(colon + 1);
    }
    if (auto base = ns_.find(prefix)) return *base + t.text.substr(colon + 1);
    fail(t, "undeclared prefix '" + prefix + "'");
  }

  // IRI-ish token -> absolute IRI string.
  std::optional<std::string> iri_of(const Token& t) {
    if (t.kind == Tok::iri) return t.text;
    if (t.kind == Tok::pname) return resolve(t);
    return std::nullopt;
  }

  PatternTerm pattern_term(bool predicate_position) {
    const Token& t = next();
    switch (t.kind) {
      case Tok::var:
        return Variable{t.text};
      case Tok::iri:
      case Tok::pname: {
        std::string value = *iri_of(t);
        if (peek().kind == Tok::datatype_mark) {
          const Token& mark = next();
          const Token& dt = next();
          auto datatype = iri_of(dt);
          if (!datatype) fail(dt, "expected datatype IRI");
          // `syn:Patient^^rdf:PlainLiteral`: the IRI's absolute form as a plain literal.
          if (*datatype != iri::rdf_plain_literal()) unsupported(mark, "datatype on an IRI");
          return Term::literal(std::move(value));
        }
        return Term::iri(std::move(value));
      }
      case Tok::string: {
        std::string lexical = t.text;
        if (peek().kind == Tok::langtag) unsupported(peek(), "language tag");
        if (peek().kind == Tok::datatype_mark) {
          next();
          const Token& dt = next();
          auto datatype = iri_of(dt);
          if (!datatype) fail(dt, "expected datatype IRI");
          try {
            return Term::typed(std::move(lexical), std::move(*datatype));
          } catch (const Error& e) {
            fail(dt, e.what());
          }
        }
        return Term::literal(std::move(lexical));
      }
      case Tok::word:
        if (t.text == "a" && predicate_position) return Term::iri(iri::rdf_type());
        reject_unsupported(t);
        fail(t, "unexpected '" + t.text + "'");
      case Tok::number:
        unsupported(t, "numeric literal");
      case Tok::punct:
        if (t.text == "[" || t.text == "(") unsupported(t, "blank node or collection");
        fail(t, "unexpected '" + t.text + "'");
      default:
        fail(t, "unexpected token");
    }
  }

  TriplePattern triple() {
    if (peek().kind == Tok::pname && peek().text.rfind("_:", 0) == 0) unsupported(peek(), "blank node");
    TriplePattern p;
    p.subject = pattern_term(false);
    p.predicate = pattern_term(true);
    p.object = pattern_term(false);
    return p;
  }

  FilterOperand operand() {
    if (is_word(peek(), "STR")) {
      next();
      expect_punct('(');
      FilterOperand op{ground_term(), true};
      expect_punct(')');
      return op;
    }
    return FilterOperand{ground_term(), false};
  }

  Term ground_term() {
    const Token& t = peek();
    PatternTerm term = pattern_term(false);
    if (is_variable(term)) unsupported(t, "variable on the right of a FILTER");
    return std::get<Term>(std::move(term));
  }

  FilterExpr filter() {
    expect_punct('(');
    FilterExpr f;
    const Token& first = peek();
    if (is_word(first, "STR")) {
      next();
      expect_punct('(');
      const Token& v = next();
      if (v.kind != Tok::var) fail(v, "expected variable inside STR()");
      f.variable = v.text;
      f.lhs_str = true;
      expect_punct(')');
    } else if (first.kind == Tok::var) {
      f.variable = next().text;
    } else {
      reject_unsupported(first);
      unsupported(first, "filter expression");
    }
    const Token& op = peek();
    if (is_word(op, "IN")) {
      next();
      f.op = FilterExpr::Op::in;
      expect_punct('(');
      if (is_punct(peek(), ')')) fail(peek(), "IN list must not be empty");
      f.rhs.push_back(operand());
      while (is_punct(peek(), ',')) {
        next();
        f.rhs.push_back(operand());
      }
      expect_punct(')');
    } else if (is_punct(op, '=')) {
      next();
      f.op = FilterExpr::Op::equals;
      f.rhs.push_back(operand());
    } else {
      reject_unsupported(op);
      unsupported(op, "filter operator '" + op.text + "'");
    }
    if (!is_punct(peek(), ')')) unsupported(peek(), "compound filter expression");
    next();
    return f;
  }

  void validate() {
    const auto vars = bgp_variables(ast_.bgp);
    auto bound = [&](const std::string& v) {
      return std::find(vars.begin(), vars.end(), v) != vars.end();
    };
    const Token& origin = toks_.front();
    for (const auto& f : ast_.filters) {
      if (!bound(f.variable)) fail(origin, "FILTER variable ?" + f.variable + " is not bound by the pattern");
    }
    if (ast_.form == Form::select) {
      if (select_all_) ast_.projection = vars;
      for (const auto& v : ast_.projection) {
        if (!bound(v)) fail(origin, "projected variable ?" + v + " is not bound by the pattern");
      }
    }
    for (const auto* tmpl : {&ast_.delete_template, &ast_.insert_template}) {
      for (const auto& p : *tmpl) {
        for (const auto& v : bgp_variables({p})) {
          if (!bound(v)) fail(origin, "template variable ?" + v + " is not bound by WHERE");
        }
        if (auto* s = std::get_if<Term>(&p.subject); s && !s->is_iri()) {
          fail(origin, "template subject must be an IRI or variable");
        }
        if (auto* pr = std::get_if<Term>(&p.predicate); pr && !pr->is_iri()) {
          fail(origin, "template predicate must be an IRI or variable");
        }
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Namespaces& ns_;
  QueryAst ast_;
  bool select_all_ = false;
};

}  // namespace

std::vector<std::string> bgp_variables(const std::vector<TriplePattern>& bgp) {
  std::vector<std::string> out;
  for (const auto& p : bgp) {
    for (const PatternTerm* slot : {&p.subject, &p.predicate, &p.object}) {
      if (const auto* v = std::get_if<Variable>(slot)) {
        if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
      }
    }
  }
  return out;
}

QueryAst parse(std::string_view text, const Namespaces& ns) {
  return Parser(Lexer(text).run(), ns).run();
}

}  // namespace trustmw::query
