#include <algorithm>
#include <array>
#include <numeric>

#include "trustmw/error.hpp"
#include "trustmw/query.hpp"

namespace trustmw::query {

namespace {

struct Slot {
  bool is_var = false;
  std::size_t var = 0;
  TermId id = kNoTerm;
};

struct CompiledFilter {
  std::size_t var = 0;
  const FilterExpr* expr = nullptr;
};

// The bgp rewritten over graph ids and variable indices.
class Compiled {
 public:
  Compiled(const QueryAst& ast, const Graph& graph, const EvalOptions& options)
      : graph_(graph), vars_(bgp_variables(ast.bgp)) {
    for (const auto& p : ast.bgp) {
      std::array<Slot, 3> slots;
      const std::array<const PatternTerm*, 3> src{&p.subject, &p.predicate, &p.object};
      for (std::size_t i = 0; i < 3; ++i) {
        if (const auto* v = std::get_if<Variable>(src[i])) {
          slots[i].is_var = true;
          slots[i].var = var_index(v->name);
        } else if (auto id = graph.find_id(std::get<Term>(*src[i]))) {
          slots[i].id = *id;
        } else {
          impossible_ = true;
        }
      }
      patterns_.push_back(slots);
    }
    order_ = options.join_order.empty() ? plan_order() : options.join_order;
    if (order_.size() != patterns_.size()) {
      throw Error(ErrorCode::invalid_argument, "join order must be a permutation of the pattern indices");
    }
    // Attach each filter at the depth where its variable first becomes bound.
    filters_at_.resize(order_.size() + 1);
    for (const auto& f : ast.filters) {
      const std::size_t v = var_index(f.variable);
      std::size_t depth = 0;
      for (; depth < order_.size(); ++depth) {
        const auto& slots = patterns_[order_[depth]];
        if (std::any_of(slots.begin(), slots.end(), [&](const Slot& s) { return s.is_var && s.var == v; })) break;
      }
      filters_at_[std::min(depth + 1, order_.size())].push_back(CompiledFilter{v, &f});
    }
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<std::size_t>& order() const { return order_; }

  std::size_t var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return static_cast<std::size_t>(it - vars_.begin());
  }

  // Calls on_solution(bindings) per solution until it returns false.
  template <class F>
  void solve(F&& on_solution) const {
    if (impossible_) return;
    std::vector<TermId> binding(vars_.size(), kNoTerm);
    descend(0, binding, on_solution);
  }

 private:
  std::vector<std::size_t> plan_order() const {
    std::vector<std::size_t> estimate(patterns_.size());
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      const auto& s = patterns_[i];
      auto id = [](const Slot& slot) { return slot.is_var ? kNoTerm : slot.id; };
      estimate[i] = impossible_ ? 0 : graph_.count(id(s[0]), id(s[1]), id(s[2]), 512);
    }
    std::vector<bool> bound(vars_.size(), false);
    std::vector<bool> used(patterns_.size(), false);
    std::vector<std::size_t> order;
    for (std::size_t step = 0; step < patterns_.size(); ++step) {
      std::size_t best = patterns_.size();
      int best_bound = -1;
      for (std::size_t i = 0; i < patterns_.size(); ++i) {
        if (used[i]) continue;
        int n = 0;
        for (const Slot& slot : patterns_[i]) n += (!slot.is_var || bound[slot.var]) ? 1 : 0;
        if (n > best_bound || (n == best_bound && estimate[i] < estimate[best])) {
          best = i;
          best_bound = n;
        }
      }
      used[best] = true;
      order.push_back(best);
      for (const Slot& slot : patterns_[best]) {
        if (slot.is_var) bound[slot.var] = true;
      }
    }
    return order;
  }

  bool passes(const CompiledFilter& f, TermId value) const {
    const Term& t = graph_.term(value);
    for (const FilterOperand& op : f.expr->rhs) {
      bool equal = false;
      if (f.expr->lhs_str) {
        // STR(?v) is a simple literal; it equals STR(x) or a plain literal.
        equal = (op.str || op.term.kind() == TermKind::plain_literal) && op.term.lexical() == t.lexical();
      } else if (op.str) {
        equal = t.kind() == TermKind::plain_literal && t.lexical() == op.term.lexical();
      } else {
        equal = t == op.term;
      }
      if (equal) return true;
    }
    return false;
  }

  template <class F>
  bool descend(std::size_t depth, std::vector<TermId>& binding, F& on_solution) const {
    for (const auto& f : filters_at_[depth]) {
      if (!passes(f, binding[f.var])) return true;
    }
    if (depth == order_.size()) return on_solution(binding);
    const auto& slots = patterns_[order_[depth]];
    std::array<TermId, 3> key;
    for (std::size_t i = 0; i < 3; ++i) {
      key[i] = slots[i].is_var ? binding[slots[i].var] : slots[i].id;
    }
    bool keep_going = true;
    graph_.scan(key[0], key[1], key[2], [&](const IdTriple& t) {
      const std::array<TermId, 3> ids{t.s, t.p, t.o};
      std::array<bool, 3> fresh{false, false, false};
      bool consistent = true;
      for (std::size_t i = 0; i < 3 && consistent; ++i) {
        if (!slots[i].is_var) continue;
        TermId& b = binding[slots[i].var];
        if (b == kNoTerm) {
          b = ids[i];
          fresh[i] = true;
        } else if (b != ids[i]) {
          consistent = false;
        }
      }
      if (consistent) keep_going = descend(depth + 1, binding, on_solution);
      for (std::size_t i = 0; i < 3; ++i) {
        if (fresh[i]) binding[slots[i].var] = kNoTerm;
      }
      return keep_going;
    });
    return keep_going;
  }

  const Graph& graph_;
  std::vector<std::string> vars_;
  std::vector<std::array<Slot, 3>> patterns_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<CompiledFilter>> filters_at_;
  bool impossible_ = false;
};

void require_form(const QueryAst& ast, Form form, const char* what) {
  if (ast.form != form) throw Error(ErrorCode::invalid_argument, std::string(what) + " requires a matching query form");
}

std::optional<Term> instantiate(const PatternTerm& p, const Compiled& c, const std::vector<TermId>& binding,
                                const Graph& graph) {
  if (const auto* v = std::get_if<Variable>(&p)) {
    TermId id = binding[c.var_index(v->name)];
    if (id == kNoTerm) return std::nullopt;
    return graph.term(id);
  }
  return std::get<Term>(p);
}

}  // namespace

std::vector<std::size_t> plan(const QueryAst& ast, const Graph& graph) {
  return Compiled(ast, graph, {}).order();
}

bool eval_ask(const QueryAst& ast, const Graph& graph, const EvalOptions& options) {
  require_form(ast, Form::ask, "eval_ask");
  bool found = false;
  Compiled(ast, graph, options).solve([&](const std::vector<TermId>&) {
    found = true;
    return false;
  });
  return found;
}

BindingSet eval_select(const QueryAst& ast, const Graph& graph, const EvalOptions& options) {
  require_form(ast, Form::select, "eval_select");
  Compiled compiled(ast, graph, options);
  std::vector<std::size_t> columns;
  for (const auto& v : ast.projection) columns.push_back(compiled.var_index(v));
  BindingSet out;
  out.variables = ast.projection;
  compiled.solve([&](const std::vector<TermId>& binding) {
    std::vector<Term> row;
    row.reserve(columns.size());
    for (std::size_t c : columns) row.push_back(graph.term(binding[c]));
    out.rows.push_back(std::move(row));
    return true;
  });
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

UpdateSummary eval_update(const QueryAst& ast, Graph& graph) {
  require_form(ast, Form::update, "eval_update");
  std::vector<Triple> to_delete;
  std::vector<Triple> to_insert;
  {
    Compiled compiled(ast, graph, {});
    auto emit = [&](const std::vector<TriplePattern>& tmpl, const std::vector<TermId>& binding,
                    std::vector<Triple>& out) {
      for (const auto& p : tmpl) {
        auto s = instantiate(p.subject, compiled, binding, graph);
        auto pr = instantiate(p.predicate, compiled, binding, graph);
        auto o = instantiate(p.object, compiled, binding, graph);
        if (!s || !pr || !o || !s->is_iri() || !pr->is_iri()) continue;
        out.push_back(Triple{std::move(*s), std::move(*pr), std::move(*o)});
      }
    };
    compiled.solve([&](const std::vector<TermId>& binding) {
      emit(ast.delete_template, binding, to_delete);
      emit(ast.insert_template, binding, to_insert);
      return true;
    });
  }
  UpdateSummary summary;
  for (const auto& t : to_delete) summary.deleted += graph.remove(t) ? 1 : 0;
  for (const auto& t : to_insert) summary.inserted += graph.insert(t) ? 1 : 0;
  return summary;
}

}  // namespace trustmw::query
