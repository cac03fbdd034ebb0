#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "trustmw/error.hpp"
#include "trustmw/graph.hpp"

namespace trustmw {
namespace {

using namespace testing;

TEST(TermTest, RejectsMalformedIris) {
  EXPECT_THROW(Term::iri(""), Error);
  EXPECT_THROW(Term::iri("http://x y"), Error);
}

TEST(TermTest, PlainLiteralDatatypeCollapses) {
  Term t = Term::typed("physician_105", iri::rdf_plain_literal());
  EXPECT_EQ(t.kind(), TermKind::plain_literal);
  EXPECT_TRUE(t.datatype().empty());
  EXPECT_EQ(t, Term::literal("physician_105"));
}

TEST(TermTest, FloatLiteralMustBeFiniteDecimal) {
  EXPECT_NO_THROW(Term::typed("0.9", iri::xsd_float()));
  EXPECT_NO_THROW(Term::typed("-1e3", iri::xsd_float()));
  EXPECT_THROW(Term::typed("abc", iri::xsd_float()), Error);
  EXPECT_THROW(Term::typed("inf", iri::xsd_float()), Error);
  EXPECT_THROW(Term::typed("nan", iri::xsd_float()), Error);
  EXPECT_THROW(Term::typed("", iri::xsd_float()), Error);
}

TEST(TermTest, LiteralEqualityIsLexical) {
  EXPECT_NE(Term::typed("1.0", iri::xsd_float()), Term::typed("1.00", iri::xsd_float()));
}

TEST(GraphTest, InsertIntoEmptyGraph) {
  Graph g;
  EXPECT_TRUE(g.insert(T(I(syn("a")), I(syn("p")), I(syn("b")))));
  EXPECT_EQ(g.size(), 1u);
}

TEST(GraphTest, InsertIsIdempotent) {
  Graph g;
  auto t = T(I(syn("a")), I(syn("p")), I(syn("b")));
  EXPECT_TRUE(g.insert(t));
  EXPECT_FALSE(g.insert(t));
  EXPECT_EQ(g.size(), 1u);
}

TEST(GraphTest, RejectsLiteralSubjectOrPredicate) {
  Graph g;
  EXPECT_THROW(g.insert(Triple{L("x"), I(syn("p")), I(syn("b"))}), Error);
  EXPECT_THROW(g.insert(Triple{I(syn("a")), L("p"), I(syn("b"))}), Error);
  EXPECT_EQ(g.size(), 0u);
}

TEST(GraphTest, DuaScenarioFixture) {
  Graph g = dua_scenario();
  EXPECT_EQ(g.size(), 12u);
  auto m = g.match({Variable{"x"}, I(iri::rdf_type()), I(dua("DataUsageAgreement"))});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].subject, I(syn("dua_1")));
}

TEST(GraphTest, RemoveFromEmptyGraph) {
  Graph g;
  EXPECT_FALSE(g.remove(T(I(syn("a")), I(syn("p")), I(syn("b")))));
}

TEST(GraphTest, InsertThenRemove) {
  Graph g = dua_scenario();
  auto t = T(I(syn("a")), I(syn("p")), L("b"));
  ASSERT_TRUE(g.insert(t));
  EXPECT_TRUE(g.remove(t));
  EXPECT_EQ(g.size(), 12u);
  EXPECT_FALSE(g.contains(t));
}

TEST(GraphTest, RemovingScoreTripleEmptiesPattern) {
  Graph g;
  load_lines(g, R"(syn:research_scientist_731 rdf:type tst:User .
syn:research_scientist_731 rdfs:label "research_scientist_731" .
syn:research_scientist_731 tst:behaviorTrust "1.0"^^xsd:float .
)");
  auto score = T(I(syn("research_scientist_731")), I(tst("behaviorTrust")),
                 Term::typed("1.0", iri::xsd_float()));
  ASSERT_TRUE(g.remove(score));
  EXPECT_TRUE(g.match({I(syn("research_scientist_731")), I(tst("behaviorTrust")), Variable{"o"}}).empty());
  EXPECT_EQ(g.size(), 2u);
}

TEST(GraphTest, UniversalAndGroundPatterns) {
  Graph g;
  for (int i = 0; i < 5; ++i) g.insert(T(I(syn("s" + std::to_string(i))), I(syn("p")), L(std::to_string(i))));
  EXPECT_EQ(g.match({Variable{"s"}, Variable{"p"}, Variable{"o"}}).size(), 5u);
  EXPECT_EQ(g.match({I(syn("s2")), I(syn("p")), L("2")}).size(), 1u);
  EXPECT_TRUE(g.match({I(syn("s2")), I(syn("p")), L("3")}).empty());
  EXPECT_TRUE(g.match({I(syn("unknown")), Variable{"p"}, Variable{"o"}}).empty());
}

TEST(GraphTest, RepeatedVariableMustAgree) {
  Graph g;
  g.insert(T(I(syn("a")), I(syn("p")), I(syn("a"))));
  g.insert(T(I(syn("a")), I(syn("p")), I(syn("b"))));
  auto m = g.match({Variable{"x"}, I(syn("p")), Variable{"x"}});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].object, I(syn("a")));
}

TEST(GraphTest, MatchOrderIsLexical) {
  Graph g;
  g.insert(T(I(syn("c")), I(syn("p")), L("1")));
  g.insert(T(I(syn("a")), I(syn("p")), L("2")));
  g.insert(T(I(syn("b")), I(syn("p")), L("3")));
  auto m = g.match({Variable{"s"}, I(syn("p")), Variable{"o"}});
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].subject, I(syn("a")));
  EXPECT_EQ(m[2].subject, I(syn("c")));
}

TEST(LineFormatTest, EmptyInput) {
  Graph g;
  EXPECT_EQ(load_lines(g, ""), 0u);
  EXPECT_EQ(serialize_lines(g), "");
}

TEST(LineFormatTest, LoadIsIdempotent) {
  Graph g;
  const char* line = "<http://x/a> <http://x/p> \"v\" .\n";
  EXPECT_EQ(load_lines(g, line), 1u);
  EXPECT_EQ(load_lines(g, line), 0u);
}

TEST(LineFormatTest, SingleTripleSerializesToOneLine) {
  Graph g;
  g.insert(T(I("http://x/a"), I("http://x/p"), Term::typed("0.9", iri::xsd_float())));
  EXPECT_EQ(serialize_lines(g),
            "<http://x/a> <http://x/p> \"0.9\"^^<http://www.w3.org/2001/XMLSchema#float> .\n");
}

TEST(LineFormatTest, CommentsAndPrefixedNames) {
  Graph g;
  EXPECT_EQ(load_lines(g, "# header\n\nsyn:a rdf:type syn:Patient.\n"), 1u);
  EXPECT_TRUE(g.contains(T(I(syn("a")), I(iri::rdf_type()), I(syn("Patient")))));
}

TEST(LineFormatTest, SyntaxErrorReportsPosition) {
  Graph g;
  try {
    load_lines(g, "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/p> \"open .\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_EQ(g.size(), 0u);
}

TEST(LineFormatTest, MissingTerminatorIsAnError) {
  Graph g;
  EXPECT_THROW(load_lines(g, "<http://x/a> <http://x/p> <http://x/b>\n"), ParseError);
}

TEST(LineFormatTest, UnknownPrefixIsNamed) {
  Graph g;
  try {
    load_lines(g, "foo:a rdf:type syn:Patient .\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown prefix 'foo'"), std::string::npos);
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 1u);
  }
}

TEST(LineFormatTest, LiteralSubjectRejected) {
  Graph g;
  EXPECT_THROW(load_lines(g, "\"x\" <http://x/p> <http://x/b> .\n"), ParseError);
}

TEST(LineFormatTest, EscapesRoundTrip) {
  Graph g;
  g.insert(T(I("http://x/a"), I("http://x/p"), L("say \"hi\"\n\\ok\t")));
  Graph h;
  load_lines(h, serialize_lines(g));
  EXPECT_EQ(g.triples(), h.triples());
}

// Small vocabulary so random graphs are dense enough for joins.
struct RandomTerms {
  std::mt19937_64 rng;
  explicit RandomTerms(std::uint64_t seed) : rng(seed) {}

  Term iri_term() { return Term::iri("http://r/" + std::to_string(rng() % 8)); }
  Term object() {
    switch (rng() % 4) {
      case 0: return Term::literal(std::to_string(rng() % 4));
      case 1: return Term::typed(std::to_string(rng() % 3) + ".5", iri::xsd_float());
      default: return iri_term();
    }
  }
  Triple triple() { return Triple::make(iri_term(), Term::iri("http://p/" + std::to_string(rng() % 3)), object()); }
  PatternTerm slot(Term t, const char* var) {
    if (rng() % 2) return Variable{var};
    return t;
  }
};

bool unifies(const TriplePattern& p, const Triple& t) {
  std::map<std::string, Term> seen;
  auto check = [&](const PatternTerm& slot, const Term& value) {
    if (const auto* v = std::get_if<Variable>(&slot)) {
      auto [it, fresh] = seen.emplace(v->name, value);
      return fresh || it->second == value;
    }
    return std::get<Term>(slot) == value;
  };
  return check(p.subject, t.subject) && check(p.predicate, t.predicate) && check(p.object, t.object);
}

TEST(GraphPropertyTest, MatchEqualsBruteForceScan) {
  RandomTerms gen(42);
  for (int round = 0; round < 100; ++round) {
    Graph g;
    std::set<Triple> all;
    const int n = static_cast<int>(gen.rng() % 200) + 1;
    for (int i = 0; i < n; ++i) {
      auto t = gen.triple();
      g.insert(t);
      all.insert(t);
    }
    for (int q = 0; q < 20; ++q) {
      auto pick = gen.triple();
      const char* names[] = {"x", "y", "z"};
      TriplePattern p{gen.slot(pick.subject, names[gen.rng() % 3]),
                      gen.slot(pick.predicate, names[gen.rng() % 3]),
                      gen.slot(pick.object, names[gen.rng() % 3])};
      std::vector<Triple> expected;
      for (const auto& t : all) {
        if (unifies(p, t)) expected.push_back(t);
      }
      EXPECT_EQ(g.match(p), expected);
    }
  }
}

TEST(GraphPropertyTest, SizeTracksInsertRemoveInterleaving) {
  RandomTerms gen(7);
  Graph g;
  std::set<Triple> oracle;
  for (int step = 0; step < 5000; ++step) {
    auto t = gen.triple();
    if (gen.rng() % 3 == 0) {
      EXPECT_EQ(g.remove(t), oracle.erase(t) == 1);
    } else {
      EXPECT_EQ(g.insert(t), oracle.insert(t).second);
    }
    ASSERT_EQ(g.size(), oracle.size());
  }
  EXPECT_EQ(g.triples(), std::vector<Triple>(oracle.begin(), oracle.end()));
}

TEST(GraphPropertyTest, SerializeLoadRoundTrip) {
  RandomTerms gen(99);
  for (int round = 0; round < 20; ++round) {
    Graph g;
    for (int i = 0; i < 150; ++i) g.insert(gen.triple());
    Graph h;
    EXPECT_EQ(load_lines(h, serialize_lines(g)), g.size());
    EXPECT_EQ(h.triples(), g.triples());
    EXPECT_EQ(serialize_lines(h), serialize_lines(g));
  }
}

}  // namespace
}  // namespace trustmw
