#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "trustmw/query.hpp"

namespace trustmw::testing {

using query::bgp_variables;
using query::QueryAst;

// Brute-force oracle: every assignment of terms to variables is checked
// against the triple set directly.
struct Oracle {
  std::set<Triple> triples;
  std::vector<Term> domain;

  explicit Oracle(const Graph& g) {
    std::set<Term> terms;
    for (const auto& t : g.triples()) {
      triples.insert(t);
      terms.insert(t.subject);
      terms.insert(t.predicate);
      terms.insert(t.object);
    }
    domain.assign(terms.begin(), terms.end());
  }

  static const Term& value(const PatternTerm& p, const std::vector<std::string>& vars,
                           const std::vector<Term>& assignment) {
    if (const auto* v = std::get_if<Variable>(&p)) {
      return assignment[std::find(vars.begin(), vars.end(), v->name) - vars.begin()];
    }
    return std::get<Term>(p);
  }

  std::vector<std::vector<Term>> solutions(const QueryAst& ast) const {
    const auto vars = bgp_variables(ast.bgp);
    std::vector<std::vector<Term>> out;
    if (!vars.empty() && domain.empty()) return out;
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      std::vector<Term> assignment;
      for (std::size_t i : idx) assignment.push_back(domain[i]);
      bool ok = true;
      for (const auto& p : ast.bgp) {
        Triple t{value(p.subject, vars, assignment), value(p.predicate, vars, assignment),
                 value(p.object, vars, assignment)};
        if (!triples.count(t)) {
          ok = false;
          break;
        }
      }
      for (const auto& f : ast.filters) {
        if (!ok) break;
        const Term& v = assignment[std::find(vars.begin(), vars.end(), f.variable) - vars.begin()];
        bool any = false;
        for (const auto& op : f.rhs) {
          Term lhs = f.lhs_str ? Term::literal(v.lexical()) : v;
          Term rhs = op.str ? Term::literal(op.term.lexical()) : op.term;
          any = any || lhs == rhs;
        }
        ok = any;
      }
      if (ok) out.push_back(assignment);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == domain.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace trustmw::testing
