#pragma once

#include <absl/container/btree_set.h>

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trustmw/term.hpp"

namespace trustmw {

using TermId = std::uint32_t;
inline constexpr TermId kNoTerm = std::numeric_limits<TermId>::max();

struct IdTriple {
  TermId s;
  TermId p;
  TermId o;
};

// In-memory triple store with set semantics.
//
// Terms are interned into a dictionary that only grows; triples are kept in
// three sorted indexes (SPO, POS, OSP) so every pattern shape is answered by a
// single range scan. The graph does no locking of its own: callers provide
// many-readers/one-writer exclusion.
class Graph {
 public:
  Graph() = default;

  bool insert(const Triple& t);
  bool remove(const Triple& t);
  bool contains(const Triple& t) const;
  std::size_t size() const noexcept { return spo_.size(); }
  bool empty() const noexcept { return spo_.empty(); }

  // Triples unifying with the pattern, sorted by term lexical forms. A
  // variable repeated in several positions must bind the same term.
  std::vector<Triple> match(const TriplePattern& pattern) const;

  // All triples, sorted.
  std::vector<Triple> triples() const;

  Namespaces& namespaces() noexcept { return namespaces_; }
  const Namespaces& namespaces() const noexcept { return namespaces_; }

  std::optional<TermId> find_id(const Term& t) const;
  const Term& term(TermId id) const { return terms_[id]; }
  Triple decode(const IdTriple& t) const;

  // Calls visit(IdTriple) for every stored triple whose positions equal the
  // bound ids (kNoTerm = wildcard). Stops early when visit returns false.
  template <class Visit>
  void scan(TermId s, TermId p, TermId o, Visit&& visit) const;

  // Number of matches for the id pattern, counting no further than cap.
  std::size_t count(TermId s, TermId p, TermId o,
                    std::size_t cap = std::numeric_limits<std::size_t>::max()) const;

 private:
  using Key = std::array<TermId, 3>;
  using Index = absl::btree_set<Key>;

  TermId intern(const Term& t);

  template <class Visit>
  static bool scan_range(const Index& index, TermId a, TermId b, TermId c, Visit& emit);

  std::vector<Term> terms_;
  std::unordered_map<Term, TermId, TermHash> ids_;
  Index spo_;
  Index pos_;
  Index osp_;
  Namespaces namespaces_;
};

template <class Visit>
bool Graph::scan_range(const Index& index, TermId a, TermId b, TermId c, Visit& emit) {
  // a, b, c are in index order; bound positions form a prefix.
  if (a == kNoTerm) {
    for (const Key& k : index) {
      if (!emit(k)) return false;
    }
    return true;
  }
  Key lo{a, b == kNoTerm ? 0 : b, (b == kNoTerm || c == kNoTerm) ? 0 : c};
  for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
    const Key& k = *it;
    if (k[0] != a) break;
    if (b != kNoTerm && k[1] != b) break;
    if (b != kNoTerm && c != kNoTerm && k[2] != c) break;
    if (!emit(k)) return false;
  }
  return true;
}

template <class Visit>
void Graph::scan(TermId s, TermId p, TermId o, Visit&& visit) const {
  const bool bs = s != kNoTerm;
  const bool bp = p != kNoTerm;
  const bool bo = o != kNoTerm;
  if (bs && bp && bo) {
    if (spo_.contains(Key{s, p, o})) visit(IdTriple{s, p, o});
    return;
  }
  if (bs && !bp && bo) {
    auto emit = [&](const Key& k) { return visit(IdTriple{k[1], k[2], k[0]}); };
    scan_range(osp_, o, s, kNoTerm, emit);
  } else if (bs) {
    auto emit = [&](const Key& k) { return visit(IdTriple{k[0], k[1], k[2]}); };
    scan_range(spo_, s, p, kNoTerm, emit);
  } else if (bp) {
    auto emit = [&](const Key& k) { return visit(IdTriple{k[2], k[0], k[1]}); };
    scan_range(pos_, p, o, kNoTerm, emit);
  } else if (bo) {
    auto emit = [&](const Key& k) { return visit(IdTriple{k[1], k[2], k[0]}); };
    scan_range(osp_, o, kNoTerm, kNoTerm, emit);
  } else {
    auto emit = [&](const Key& k) { return visit(IdTriple{k[0], k[1], k[2]}); };
    scan_range(spo_, kNoTerm, kNoTerm, kNoTerm, emit);
  }
}

// Reads the line format: `<s> <p> <o> .` per line, objects `<iri>`, `"lex"`
// or `"lex"^^<dt>`. Prefixed names resolve against graph.namespaces().
// Returns the number of triples newly added; throws ParseError on bad input.
std::size_t load_lines(Graph& graph, std::istream& in);
std::size_t load_lines(Graph& graph, std::string_view text);
std::size_t load_file(Graph& graph, const std::string& path);

// Canonical text: one sorted absolute-IRI triple per line.
std::string serialize_lines(const Graph& graph);

}  // namespace trustmw
