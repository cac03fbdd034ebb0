#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustmw/graph.hpp"
#include "trustmw/term.hpp"

namespace trustmw::query {

enum class Form { ask, select, update };

// One FILTER argument. With `str` set the operand is STR(term).
struct FilterOperand {
  Term term;
  bool str = false;
  friend bool operator==(const FilterOperand&, const FilterOperand&) = default;
};

struct FilterExpr {
  enum class Op { in, equals };
  Op op = Op::in;
  std::string variable;
  bool lhs_str = false;
  std::vector<FilterOperand> rhs;
};

struct QueryAst {
  Form form = Form::ask;
  std::map<std::string, std::string> prologue;
  std::vector<TriplePattern> bgp;
  std::vector<FilterExpr> filters;
  std::vector<std::string> projection;  // select only
  std::vector<TriplePattern> delete_template;
  std::vector<TriplePattern> insert_template;
};

// Accepts ASK/SELECT queries and DELETE/INSERT ... WHERE over basic graph patterns
// with FILTER(STR(?v) IN (...)) and FILTER(?v = term). Everything else fails
// with Error(unsupported) naming the construct. `ns` supplies pre-registered
// prefixes; PREFIX declarations in the text take precedence.
QueryAst parse(std::string_view text, const Namespaces& ns = Namespaces{});

struct BindingSet {
  std::vector<std::string> variables;
  std::vector<std::vector<Term>> rows;  // rows[i][j] binds variables[j]

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
};

struct UpdateSummary {
  std::size_t deleted = 0;
  std::size_t inserted = 0;
};

struct EvalOptions {
  // Explicit pattern evaluation order (a permutation of bgp indices). Empty
  // means the planner picks the most selective pattern first.
  std::vector<std::size_t> join_order;
};

bool eval_ask(const QueryAst& ast, const Graph& graph, const EvalOptions& options = {});
BindingSet eval_select(const QueryAst& ast, const Graph& graph, const EvalOptions& options = {});
// All WHERE solutions are computed before the graph is touched.
UpdateSummary eval_update(const QueryAst& ast, Graph& graph);

// Planner order for the bgp against this graph.
std::vector<std::size_t> plan(const QueryAst& ast, const Graph& graph);

// STR(): an IRI's absolute form or a literal's lexical form.
inline const std::string& str(const Term& t) { return t.lexical(); }

// Variables of the bgp in order of first appearance.
std::vector<std::string> bgp_variables(const std::vector<TriplePattern>& bgp);

}  // namespace trustmw::query
