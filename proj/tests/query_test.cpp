#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "listings.hpp"
#include "query_oracle.hpp"
#include "trustmw/error.hpp"
#include "trustmw/query.hpp"

namespace trustmw::query {
namespace {

using namespace trustmw::testing;

std::string replace(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

TEST(ParseTest, DuaExistenceListing) {
  auto ast = parse(kListingDuaExists);
  EXPECT_EQ(ast.form, Form::ask);
  EXPECT_EQ(ast.bgp.size(), 8u);
  EXPECT_TRUE(ast.filters.empty());
  EXPECT_EQ(ast.bgp[0].predicate, PatternTerm{I(iri::rdf_type())});
  EXPECT_EQ(ast.bgp[1].object, PatternTerm{L("DataCustodian")});
}

TEST(ParseTest, EmptyAsk) {
  auto ast = parse("ASK{}");
  EXPECT_EQ(ast.form, Form::ask);
  EXPECT_TRUE(ast.bgp.empty());
}

TEST(ParseTest, CustodianCategoryListing) {
  auto ast = parse(kListingCustodianCategory);
  EXPECT_EQ(ast.form, Form::ask);
  EXPECT_EQ(ast.bgp.size(), 9u);
  ASSERT_EQ(ast.filters.size(), 1u);
  const auto& f = ast.filters[0];
  EXPECT_EQ(f.op, FilterExpr::Op::in);
  EXPECT_EQ(f.variable, "requestedData");
  EXPECT_TRUE(f.lhs_str);
  ASSERT_EQ(f.rhs.size(), 3u);
  EXPECT_EQ(f.rhs[0], (FilterOperand{I(syn("Encounter")), true}));
  EXPECT_EQ(f.rhs[1], (FilterOperand{I(syn("Observation")), true}));
  EXPECT_EQ(f.rhs[2], (FilterOperand{I(syn("Patient")), true}));
}

TEST(ParseTest, DatatypedIriBecomesPlainLiteralOfAbsoluteForm) {
  auto ast = parse(kListingRequestedData);
  ASSERT_EQ(ast.bgp.size(), 9u);
  EXPECT_EQ(ast.bgp.back().object, PatternTerm{L(syn("Patient"))});
}

TEST(ParseTest, BehaviorUpdateListing) {
  auto ast = parse(kListingBehaviorUpdate);
  EXPECT_EQ(ast.form, Form::update);
  EXPECT_EQ(ast.bgp.size(), 2u);
  ASSERT_EQ(ast.delete_template.size(), 1u);
  ASSERT_EQ(ast.insert_template.size(), 1u);
  EXPECT_EQ(ast.delete_template[0].object, PatternTerm{Term::typed("1.0", iri::xsd_float())});
}

TEST(ParseTest, PrefixDeclarationsOverrideDefaults) {
  auto ast = parse("PREFIX ex: <http://e/>\nSELECT ?s WHERE { ?s ex:p ex:o }");
  EXPECT_EQ(ast.form, Form::select);
  EXPECT_EQ(ast.prologue.at("ex"), "http://e/");
  EXPECT_EQ(ast.bgp[0].predicate, PatternTerm{I("http://e/p")});
  EXPECT_EQ(ast.projection, std::vector<std::string>{"s"});
}

TEST(ParseTest, SelectStarProjectsAllVariables) {
  auto ast = parse("SELECT * WHERE { ?a <http://p> ?b . ?b <http://q> ?c }");
  EXPECT_EQ(ast.projection, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ParseTest, SyntaxErrorCarriesPosition) {
  try {
    parse("ASK {\n  ?s ?p\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 1u);
  }
}

TEST(ParseTest, UndeclaredPrefix) {
  try {
    parse("ASK { ?s foo:bar ?o }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("undeclared prefix 'foo'"), std::string::npos);
  }
}

TEST(ParseTest, UnsupportedConstructsAreNamed) {
  auto expect_unsupported = [](const char* text, const char* construct) {
    try {
      parse(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::unsupported) << text;
      EXPECT_NE(std::string(e.what()).find(construct), std::string::npos) << e.what();
    }
  };
  expect_unsupported("ASK { ?s ?p ?o OPTIONAL { ?s ?q ?r } }", "OPTIONAL");
  expect_unsupported("SELECT DISTINCT ?s WHERE { ?s ?p ?o }", "DISTINCT");
  expect_unsupported("ASK { { ?s ?p ?o } UNION { ?s ?q ?o } }", "nested group");
  expect_unsupported("ASK { ?s ?p ?o ; ?q ?r }", "predicate-object list");
  expect_unsupported("ASK { ?s ?p 42 }", "numeric literal");
  expect_unsupported("ASK { ?s ?p \"x\"@en }", "language tag");
  expect_unsupported("ASK { ?s ?p ?o FILTER(?o > 3) }", "filter operator");
  expect_unsupported("SELECT ?s WHERE { ?s ?p ?o } LIMIT 3", "LIMIT");
  expect_unsupported("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }", "CONSTRUCT");
}

TEST(ParseTest, FilterVariableMustBeBound) {
  EXPECT_THROW(parse("ASK { ?s ?p ?o FILTER(STR(?x) IN (STR(syn:Patient))) }"), ParseError);
}

TEST(ParseTest, EmptyInListRejected) {
  EXPECT_THROW(parse("ASK { ?s ?p ?o FILTER(STR(?o) IN ()) }"), ParseError);
}

TEST(ParseTest, TemplateVariableMustBeBoundByWhere) {
  EXPECT_THROW(parse("DELETE { ?x ?p ?o } WHERE { ?s ?p ?o }"), ParseError);
}

TEST(AskTest, EmptyPatternIsTrue) {
  Graph g;
  EXPECT_TRUE(eval_ask(parse("ASK{}"), g));
  EXPECT_TRUE(eval_ask(parse("ASK{}"), dua_scenario()));
}

TEST(AskTest, DuaExistenceOnScenario) {
  Graph g = dua_scenario();
  EXPECT_TRUE(eval_ask(parse(kListingDuaExists), g));
  // A second user whose organization has no DUA with the custodian.
  load_lines(g, R"(syn:org_2 rdf:type syn:Organization .
syn:user_106 rdf:type tst:User .
syn:user_106 rdfs:label "nurse_106" .
syn:user_106 syn:isAffiliatedWith syn:org_2 .
)");
  EXPECT_FALSE(eval_ask(parse(replace(kListingDuaExists, "physician_105", "nurse_106")), g));
  EXPECT_FALSE(eval_ask(parse(replace(kListingDuaExists, "physician_105", "nobody")), g));
}

TEST(AskTest, CustodianListingAgainstAdvertisedCategories) {
  Graph g = dua_scenario();
  const std::string listing = replace(kListingCustodianCategory, "nurse_629", "physician_105");
  EXPECT_TRUE(eval_ask(parse(listing), g));
  // Custodian advertises only Encounter; the DUA requests Patient.
  const std::string encounter_only =
      replace(listing, "STR(syn:Encounter), STR(syn:Observation), STR(syn:Patient)", "STR(syn:Encounter)");
  EXPECT_FALSE(eval_ask(parse(encounter_only), g));
}

TEST(AskTest, StrFilterIgnoresIriVersusLiteralStorage) {
  const std::string listing = replace(kListingCustodianCategory, "nurse_629", "physician_105");
  Graph literal_form = dua_scenario();
  Graph iri_form = dua_scenario();
  iri_form.remove(T(I(syn("dua_1")), I(dua("requestedData")), L(syn("Patient"))));
  iri_form.insert(T(I(syn("dua_1")), I(dua("requestedData")), I(syn("Patient"))));
  EXPECT_TRUE(eval_ask(parse(listing), literal_form));
  EXPECT_TRUE(eval_ask(parse(listing), iri_form));
  const std::string other = replace(listing, "STR(syn:Encounter), STR(syn:Observation), STR(syn:Patient)",
                                    "STR(syn:Observation)");
  EXPECT_FALSE(eval_ask(parse(other), literal_form));
  EXPECT_FALSE(eval_ask(parse(other), iri_form));
}

TEST(AskTest, EqualsFilter) {
  Graph g = dua_scenario();
  EXPECT_TRUE(eval_ask(parse("ASK { ?u rdfs:label ?l FILTER(?l = \"physician_105\") }"), g));
  EXPECT_FALSE(eval_ask(parse("ASK { ?u rdfs:label ?l FILTER(?l = \"nurse_1\") }"), g));
  EXPECT_TRUE(eval_ask(parse("ASK { ?d dua:hasRecipient ?o FILTER(STR(?o) = STR(syn:org_1)) }"), g));
}

TEST(SelectTest, EmptyGraph) {
  Graph g;
  EXPECT_TRUE(eval_select(parse("SELECT ?s WHERE { ?s ?p ?o }"), g).empty());
}

TEST(SelectTest, ConstantBoundVariable) {
  Graph g = dua_scenario();
  auto rows = eval_select(
      parse("SELECT ?dua ?c WHERE { ?dua dua:hasDataCustodian ?c . ?c rdfs:label \"DataCustodian\" }"), g);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows.variables, (std::vector<std::string>{"dua", "c"}));
  EXPECT_EQ(rows.rows[0][1], I(syn("org_custodian")));
}

TEST(SelectTest, RowsAreSorted) {
  Graph g;
  for (const char* s : {"c", "a", "b"}) g.insert(T(I(syn(s)), I(iri::rdf_type()), I(syn("Patient"))));
  auto rows = eval_select(parse("SELECT ?p WHERE { ?p a syn:Patient }"), g);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows.rows[0][0], I(syn("a")));
  EXPECT_EQ(rows.rows[2][0], I(syn("c")));
}

Graph behavior_fixture() {
  Graph g;
  load_lines(g, R"(syn:research_scientist_731 rdf:type tst:User .
syn:research_scientist_731 rdfs:label "research_scientist_731" .
syn:research_scientist_731 tst:behaviorTrust "1.0"^^xsd:float .
)");
  return g;
}

TEST(UpdateTest, BehaviorListingDecreasesScore) {
  Graph g = behavior_fixture();
  auto summary = eval_update(parse(kListingBehaviorUpdate), g);
  EXPECT_EQ(summary.deleted, 1u);
  EXPECT_EQ(summary.inserted, 1u);
  auto scores = g.match({I(syn("research_scientist_731")), I(tst("behaviorTrust")), Variable{"o"}});
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_EQ(scores[0].object, Term::typed("0.9", iri::xsd_float()));
}

TEST(UpdateTest, NoSolutionsLeavesGraphUnchanged) {
  Graph g = dua_scenario();
  auto before = g.triples();
  auto summary = eval_update(parse(kListingBehaviorUpdate), g);
  EXPECT_EQ(summary.deleted, 0u);
  EXPECT_EQ(summary.inserted, 0u);
  EXPECT_EQ(g.triples(), before);
}

TEST(UpdateTest, AbsentDeleteTripleStillInserts) {
  Graph g;
  load_lines(g, R"(syn:u rdf:type tst:User .
syn:u rdfs:label "research_scientist_731" .
)");
  auto summary = eval_update(parse(kListingBehaviorUpdate), g);
  EXPECT_EQ(summary.deleted, 0u);
  EXPECT_EQ(summary.inserted, 1u);
  EXPECT_EQ(g.size(), 3u);
}

TEST(UpdateTest, SnapshotSemantics) {
  // Every solution is collected before mutation, so inserting a triple the
  // WHERE clause would match does not cascade.
  Graph g;
  load_lines(g, "syn:a syn:next syn:b .\nsyn:b syn:next syn:c .\n");
  auto summary = eval_update(parse("INSERT { ?y syn:next ?x } WHERE { ?x syn:next ?y }"), g);
  EXPECT_EQ(summary.inserted, 2u);
  EXPECT_EQ(g.size(), 4u);
}

TEST(QueryPropertyTest, NestedLoopMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  auto iri_term = [&] { return Term::iri("http://r/" + std::to_string(rng() % 5)); };
  auto object = [&] { return rng() % 3 == 0 ? Term::literal("http://r/" + std::to_string(rng() % 5)) : iri_term(); };
  const char* names[] = {"x", "y", "z"};
  int nonempty = 0;
  for (int round = 0; round < 250; ++round) {
    Graph g;
    const int n = static_cast<int>(rng() % 31);
    for (int i = 0; i < n; ++i) {
      g.insert(Triple::make(iri_term(), Term::iri("http://p/" + std::to_string(rng() % 2)), object()));
    }
    Oracle oracle(g);
    for (int q = 0; q < 4; ++q) {
      QueryAst ast;
      ast.form = Form::select;
      const int patterns = static_cast<int>(rng() % 4) + 1;
      for (int i = 0; i < patterns; ++i) {
        auto slot = [&](Term t) -> PatternTerm {
          if (rng() % 3) return Variable{names[rng() % 3]};
          return t;
        };
        ast.bgp.push_back({slot(iri_term()), slot(Term::iri("http://p/" + std::to_string(rng() % 2))), slot(object())});
      }
      ast.projection = bgp_variables(ast.bgp);
      if (!ast.projection.empty() && rng() % 3 == 0) {
        FilterExpr f;
        f.variable = ast.projection[rng() % ast.projection.size()];
        f.lhs_str = rng() % 2;
        f.rhs.push_back({iri_term(), static_cast<bool>(rng() % 2)});
        f.rhs.push_back({iri_term(), static_cast<bool>(rng() % 2)});
        ast.filters.push_back(f);
      }
      const auto expected = oracle.solutions(ast);
      nonempty += expected.empty() ? 0 : 1;
      if (ast.projection.empty()) {
        QueryAst ask = ast;
        ask.form = Form::ask;
        EXPECT_EQ(eval_ask(ask, g), !expected.empty());
        continue;
      }
      auto rows = eval_select(ast, g).rows;
      EXPECT_EQ(rows, expected);

      QueryAst ask = ast;
      ask.form = Form::ask;
      EXPECT_EQ(eval_ask(ask, g), !rows.empty());
      // Any join order gives the same answer.
      std::vector<std::size_t> order(ast.bgp.size());
      std::iota(order.begin(), order.end(), 0);
      do {
        EXPECT_EQ(eval_ask(ask, g, {order}), !rows.empty());
        EXPECT_EQ(eval_select(ast, g, {order}).rows, rows);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  EXPECT_GT(nonempty, 100);
}

}  // namespace
}  // namespace trustmw::query
