#include "trustmw/graph.hpp"

#include <algorithm>

namespace trustmw {

TermId Graph::intern(const Term& t) {
  auto [it, added] = ids_.try_emplace(t, static_cast<TermId>(terms_.size()));
  if (added) terms_.push_back(t);
  return it->second;
}

std::optional<TermId> Graph::find_id(const Term& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Triple Graph::decode(const IdTriple& t) const {
  return Triple{terms_[t.s], terms_[t.p], terms_[t.o]};
}

bool Graph::insert(const Triple& t) {
  const Triple checked = Triple::make(t.subject, t.predicate, t.object);
  const TermId s = intern(checked.subject);
  const TermId p = intern(checked.predicate);
  const TermId o = intern(checked.object);
  if (!spo_.insert(Key{s, p, o}).second) return false;
  pos_.insert(Key{p, o, s});
  osp_.insert(Key{o, s, p});
  return true;
}

bool Graph::remove(const Triple& t) {
  auto s = find_id(t.subject);
  auto p = find_id(t.predicate);
  auto o = find_id(t.object);
  if (!s || !p || !o) return false;
  if (spo_.erase(Key{*s, *p, *o}) == 0) return false;
  pos_.erase(Key{*p, *o, *s});
  osp_.erase(Key{*o, *s, *p});
  return true;
}

bool Graph::contains(const Triple& t) const {
  auto s = find_id(t.subject);
  auto p = find_id(t.predicate);
  auto o = find_id(t.object);
  return s && p && o && spo_.contains(Key{*s, *p, *o});
}

std::size_t Graph::count(TermId s, TermId p, TermId o, std::size_t cap) const {
  std::size_t n = 0;
  scan(s, p, o, [&](const IdTriple&) { return ++n < cap; });
  return n;
}

std::vector<Triple> Graph::match(const TriplePattern& pattern) const {
  std::array<TermId, 3> bound{kNoTerm, kNoTerm, kNoTerm};
  std::array<const std::string*, 3> vars{nullptr, nullptr, nullptr};
  const std::array<const PatternTerm*, 3> slots{&pattern.subject, &pattern.predicate,
                                                &pattern.object};
  for (std::size_t i = 0; i < 3; ++i) {
    if (const auto* v = std::get_if<Variable>(slots[i])) {
      vars[i] = &v->name;
    } else {
      auto id = find_id(std::get<Term>(*slots[i]));
      if (!id) return {};
      bound[i] = *id;
    }
  }
  std::vector<Triple> out;
  scan(bound[0], bound[1], bound[2], [&](const IdTriple& t) {
    const std::array<TermId, 3> ids{t.s, t.p, t.o};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        if (vars[i] && vars[j] && *vars[i] == *vars[j] && ids[i] != ids[j]) return true;
      }
    }
    out.push_back(decode(t));
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> Graph::triples() const {
  std::vector<Triple> out;
  out.reserve(spo_.size());
  for (const Key& k : spo_) out.push_back(decode(IdTriple{k[0], k[1], k[2]}));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace trustmw
