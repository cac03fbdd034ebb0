#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "trustmw/error.hpp"
#include "trustmw/trust.hpp"

namespace trustmw {
namespace {

using namespace testing;
using namespace trust;
namespace v = ontology::vocab;

PrincipalRef user(const std::string& local = "user_105") {
  return PrincipalRef{syn(local), PrincipalKind::user, local, syn("org_1")};
}
PrincipalRef org(const std::string& local) { return PrincipalRef{syn(local), PrincipalKind::organization, local, {}}; }

Score S(const char* text) { return Score::parse(text); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

TEST(ScoreTest, CanonicalText) {
  EXPECT_EQ(Score::one().to_string(), "1.0");
  EXPECT_EQ(Score::zero().to_string(), "0.0");
  EXPECT_EQ(S("0.99").to_string(), "0.99");
  EXPECT_EQ(S("0.9000").to_string(), "0.9");
  EXPECT_EQ(S("1").to_string(), "1.0");
  EXPECT_EQ(S("0.0005").to_string(), "0.0005");
  EXPECT_THROW(S("0.00001"), Error);
  EXPECT_THROW(S("-0.1"), Error);
  EXPECT_THROW(S("abc"), Error);
  EXPECT_EQ(S("0.005").minus(S("0.02")), Score::zero());
}

TEST(InitTest, UserStartsAtOne) {
  auto r = init_principal(user());
  EXPECT_EQ(r.behavior, Score::one());
  EXPECT_EQ(r.identity, Score::one());
  EXPECT_FALSE(r.credibility);
  EXPECT_EQ(r.version, 1u);
  EXPECT_TRUE(r.locked_with.empty());
}

TEST(InitTest, OrganizationStartsAtOne) {
  auto r = init_principal(org("org_1"));
  EXPECT_EQ(r.credibility, Score::one());
  EXPECT_EQ(r.identity, Score::one());
  EXPECT_FALSE(r.behavior);
}

TEST(InitTest, ReRegistrationConflicts) {
  TrustRegistry reg;
  reg.register_principal(user());
  EXPECT_EQ(code_of([&] { reg.register_principal(user()); }), ErrorCode::conflict);
  EXPECT_EQ(reg.size(), 1u);
}

TEST(AssessTest, IdentityCase) {
  auto r = init_principal(user());
  for (double w : {0.0, 0.3, 0.5, 1.0}) {
    auto a = assess(r, AssessmentConfig::make(w, 1 - w, 1.0));
    EXPECT_TRUE(a.passed);
    EXPECT_DOUBLE_EQ(a.weighted_average, 1.0);
  }
}

TEST(AssessTest, ThresholdIsInclusive) {
  auto r = init_principal(user());
  r.behavior = S("0.9");
  auto a = assess(r, AssessmentConfig::make(0.5, 0.5, 0.95));
  EXPECT_TRUE(a.passed);
  EXPECT_NEAR(a.weighted_average, 0.95, 1e-12);
}

TEST(AssessTest, DegenerateWeights) {
  auto r = init_principal(user());
  r.behavior = Score::zero();
  auto a = assess(r, AssessmentConfig::make(1.0, 0.0, 0.5));
  EXPECT_FALSE(a.passed);
  EXPECT_DOUBLE_EQ(a.weighted_average, 0.0);
}

TEST(AssessTest, OrganizationIsKindError) {
  EXPECT_EQ(code_of([] { assess(init_principal(org("org_1")), AssessmentConfig{}); }), ErrorCode::kind);
}

TEST(AssessTest, WeightsAreNormalized) {
  auto cfg = AssessmentConfig::make(3, 1, 0.5);
  EXPECT_EQ(cfg.behavior_weight, S("0.75"));
  EXPECT_EQ(cfg.identity_weight, S("0.25"));
  EXPECT_THROW(AssessmentConfig::make(0, 0, 0.5), Error);
  EXPECT_THROW(AssessmentConfig::make(-1, 1, 0.5), Error);
  EXPECT_THROW(AssessmentConfig::make(1, 1, 1.5), Error);
}

TEST(PenaltyTest, DuaViolationDeductsOneHundredth) {
  auto r = apply_user_penalty(init_principal(user()), PenaltyKind::dua_violation, PenaltyConfig{});
  EXPECT_EQ(r.behavior->to_string(), "0.99");
  EXPECT_EQ(r.version, 2u);
  EXPECT_EQ(r.identity, Score::one());
}

TEST(PenaltyTest, ClampsAtZero) {
  auto r = init_principal(user());
  r.behavior = S("0.005");
  r = apply_user_penalty(r, PenaltyKind::no_dua_request, PenaltyConfig{});
  EXPECT_EQ(r.behavior, Score::zero());
}

TEST(PenaltyTest, ConfiguredTenthDeduction) {
  PenaltyConfig cfg;
  cfg.dua_violation = S("0.1");
  auto r = apply_user_penalty(init_principal(user()), PenaltyKind::dua_violation, cfg);
  EXPECT_EQ(r.behavior->to_string(), "0.9");
}

TEST(PenaltyTest, GraceForgivesFirstViolations) {
  PenaltyConfig cfg;
  cfg.tolerance_grace = 2;
  auto r = init_principal(user());
  r = apply_user_penalty(r, PenaltyKind::dua_violation, cfg);
  r = apply_user_penalty(r, PenaltyKind::dua_violation, cfg);
  EXPECT_EQ(r.behavior, Score::one());
  EXPECT_EQ(r.version, 3u);
  r = apply_user_penalty(r, PenaltyKind::dua_violation, cfg);
  EXPECT_EQ(r.behavior, S("0.99"));
}

TEST(PenaltyTest, OrganizationDeductions) {
  PenaltyConfig cfg;
  auto o = init_principal(org("org_custodian"));
  EXPECT_EQ(apply_org_penalty(o, PenaltyKind::missing_category, cfg).credibility, S("0.98"));
  EXPECT_EQ(apply_org_penalty(o, PenaltyKind::missing_properties, cfg).credibility, S("0.99"));
  o.credibility = S("0.01");
  EXPECT_EQ(apply_org_penalty(o, PenaltyKind::missing_category, cfg).credibility, Score::zero());
}

TEST(PenaltyTest, WrongTargetsAreRejected) {
  PenaltyConfig cfg;
  EXPECT_EQ(code_of([&] { apply_user_penalty(init_principal(org("o")), PenaltyKind::dua_violation, cfg); }),
            ErrorCode::kind);
  EXPECT_EQ(code_of([&] { apply_org_penalty(init_principal(user()), PenaltyKind::missing_category, cfg); }),
            ErrorCode::kind);
  EXPECT_THROW(apply_user_penalty(init_principal(user()), PenaltyKind::missing_category, cfg), Error);
}

TEST(PenaltyTest, ConfigValidation) {
  PenaltyConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.missing_properties = Score::zero();
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(LockoutTest, Conditions) {
  auto c = init_principal(org("org_custodian"));
  auto o = init_principal(org("org_1"));
  EXPECT_FALSE(check_lockout(c, o));
  auto c0 = c;
  c0.credibility = Score::zero();
  EXPECT_TRUE(check_lockout(c0, o));
  auto o0 = o;
  o0.identity = Score::zero();
  EXPECT_TRUE(check_lockout(c, o0));
  EXPECT_EQ(code_of([&] { check_lockout(c, init_principal(user())); }), ErrorCode::kind);
  lock_pair(c, o);
  EXPECT_TRUE(check_lockout(c, o));
}

ontology::DuaRecord fresh_dua(const std::string& recipient) {
  ontology::DuaRecord d;
  d.iri = syn("dua_new");
  d.custodian = syn("org_custodian");
  d.recipient = recipient;
  d.requested_data = {v::kPatient};
  d.permitted_uses = {v::kPublicHealth};
  return d;
}

TEST(ResetTest, ClearsLockAndRestoresScores) {
  Graph g = dua_scenario();
  auto c = init_principal(org("org_custodian"));
  auto o = init_principal(org("org_1"));
  c.credibility = Score::zero();
  lock_pair(c, o);
  rewrite_dua_reset(c, o, fresh_dua(syn("org_1")), g);
  EXPECT_FALSE(check_lockout(c, o));
  EXPECT_EQ(c.credibility, Score::one());
  EXPECT_EQ(ontology::read_dua(g, syn("dua_new")).record, fresh_dua(syn("org_1")));
}

TEST(ResetTest, UnlockedPairIsStateError) {
  Graph g;
  auto c = init_principal(org("org_custodian"));
  auto o = init_principal(org("org_1"));
  EXPECT_EQ(code_of([&] { rewrite_dua_reset(c, o, fresh_dua(syn("org_1")), g); }), ErrorCode::state);
  EXPECT_TRUE(g.empty());
}

TEST(ResetTest, ThirdOrganizationIsMismatch) {
  Graph g;
  auto c = init_principal(org("org_custodian"));
  auto o = init_principal(org("org_1"));
  lock_pair(c, o);
  const auto before = c;
  EXPECT_EQ(code_of([&] { rewrite_dua_reset(c, o, fresh_dua(syn("org_3")), g); }), ErrorCode::mismatch);
  EXPECT_EQ(c, before);
  EXPECT_TRUE(g.empty());
}

TEST(ProjectionTest, BehaviorUpdateShape) {
  Graph g;
  auto r = init_principal(user("research_scientist_731"));
  project_scores(g, r);
  EXPECT_TRUE(g.contains(T(I(r.principal.iri), I(v::kBehaviorTrust), Term::typed("1.0", iri::xsd_float()))));
  EXPECT_EQ(g.size(), 2u);
  PenaltyConfig cfg;
  cfg.dua_violation = S("0.1");
  r = apply_user_penalty(r, PenaltyKind::dua_violation, cfg);
  project_scores(g, r);
  EXPECT_TRUE(g.contains(T(I(r.principal.iri), I(v::kBehaviorTrust), Term::typed("0.9", iri::xsd_float()))));
  EXPECT_EQ(g.size(), 2u);
  auto back = init_principal(user("research_scientist_731"));
  read_projection(g, back);
  EXPECT_EQ(back.behavior, r.behavior);
}

TEST(RegistryTest, MutateStampsChangedScores) {
  TrustRegistry reg("tm1");
  reg.register_principal(user());
  auto updates = reg.mutate(syn("user_105"), [](const TrustRecord& r) {
    return apply_user_penalty(r, PenaltyKind::dua_violation, PenaltyConfig{});
  });
  ASSERT_EQ(updates.size(), 1u);
  EXPECT_EQ(updates[0].score, ScoreName::behavior);
  EXPECT_EQ(updates[0].value, S("0.99"));
  EXPECT_EQ(updates[0].version, 2u);
  EXPECT_EQ(updates[0].origin, "tm1");
  EXPECT_EQ(reg.get(syn("user_105")).behavior, S("0.99"));
  EXPECT_EQ(code_of([&] { reg.get(syn("nobody")); }), ErrorCode::not_found);
}

TEST(RegistryTest, RemoteUpdatesResolveByStamp) {
  TrustRegistry a("tm1"), b("tm2");
  a.register_principal(user());
  auto u = a.mutate(syn("user_105"), [](const TrustRecord& r) {
    return apply_user_penalty(r, PenaltyKind::dua_violation, PenaltyConfig{});
  });
  EXPECT_TRUE(b.apply_remote(u[0]));
  EXPECT_FALSE(b.apply_remote(u[0]));
  EXPECT_EQ(b.get(syn("user_105")).behavior, S("0.99"));
  ScoreUpdate stale = u[0];
  stale.version = 1;
  stale.value = S("0.5");
  EXPECT_FALSE(b.apply_remote(stale));
  ScoreUpdate tie = u[0];
  tie.origin = "tm3";
  tie.value = S("0.97");
  EXPECT_TRUE(b.apply_remote(tie));
  EXPECT_EQ(b.get(syn("user_105")).behavior, S("0.97"));
}

// Oracle: canonical text of max(0, 100 - n) hundredths, built independently.
std::string hundredths_text(int n) {
  const int c = std::max(0, 100 - n);
  if (c == 100) return "1.0";
  if (c % 10 == 0) return "0." + std::to_string(c / 10);
  return std::string(c < 10 ? "0.0" : "0.") + std::to_string(c);
}

TEST(TrustProperty, RepeatedViolationsAreExact) {
  auto r = init_principal(user());
  for (int n = 1; n <= 130; ++n) {
    r = apply_user_penalty(r, PenaltyKind::dua_violation, PenaltyConfig{});
    ASSERT_EQ(r.behavior->to_string(), hundredths_text(n)) << n;
  }
}

TEST(TrustProperty, PenaltySequencesStayInRangeAndTouchOneScore) {
  std::mt19937_64 rng(17);
  const PenaltyKind user_kinds[] = {PenaltyKind::dua_violation, PenaltyKind::no_dua_request};
  const PenaltyKind org_kinds[] = {PenaltyKind::missing_category, PenaltyKind::missing_properties};
  for (int trial = 0; trial < 300; ++trial) {
    PenaltyConfig cfg;
    cfg.dua_violation = Score::from_units(1 + static_cast<int>(rng() % Score::kScale));
    cfg.missing_category = Score::from_units(1 + static_cast<int>(rng() % Score::kScale));
    cfg.tolerance_grace = static_cast<std::uint32_t>(rng() % 3);
    auto u = init_principal(user());
    auto o = init_principal(org("org_1"));
    for (int step = 0; step < 60; ++step) {
      const auto pu = u;
      u = apply_user_penalty(u, user_kinds[rng() % 2], cfg);
      EXPECT_GT(u.version, pu.version);
      EXPECT_LE(*u.behavior, *pu.behavior);
      EXPECT_GE(*u.behavior, Score::zero());
      EXPECT_EQ(u.identity, pu.identity);
      const auto po = o;
      o = apply_org_penalty(o, org_kinds[rng() % 2], cfg);
      EXPECT_GT(o.version, po.version);
      EXPECT_LE(*o.credibility, *po.credibility);
      EXPECT_GE(*o.credibility, Score::zero());
      EXPECT_EQ(o.identity, po.identity);
    }
  }
}

TEST(TrustProperty, PassedIsMonotoneAndAntitone) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    auto r = init_principal(user());
    r.behavior = Score::from_units(static_cast<int>(rng() % (Score::kScale + 1)));
    r.identity = Score::from_units(static_cast<int>(rng() % (Score::kScale + 1)));
    const double wb = static_cast<double>(rng() % 101) / 100;
    const double t1 = static_cast<double>(rng() % 10001) / 10000;
    const double t2 = static_cast<double>(rng() % 10001) / 10000;
    auto a1 = assess(r, AssessmentConfig::make(wb, 1 - wb, std::min(t1, t2)));
    auto a2 = assess(r, AssessmentConfig::make(wb, 1 - wb, std::max(t1, t2)));
    if (a2.passed) EXPECT_TRUE(a1.passed);
    EXPECT_DOUBLE_EQ(a1.weighted_average, a2.weighted_average);
  }
}

TEST(TrustProperty, ResetAlwaysUnlocks) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g;
    auto c = init_principal(org("org_custodian"));
    auto o = init_principal(org("org_1"));
    if (rng() % 2) c.credibility = Score::zero();
    if (rng() % 2) o.identity = Score::zero();
    lock_pair(c, o);
    rewrite_dua_reset(c, o, fresh_dua(syn("org_1")), g);
    EXPECT_FALSE(check_lockout(c, o));
  }
}

TEST(TrustProperty, ProjectionMatchesRegistryAfterMutations) {
  std::mt19937_64 rng(31);
  Graph g;
  TrustRegistry reg;
  std::vector<std::string> users, orgs;
  for (int i = 0; i < 5; ++i) {
    users.push_back(reg.register_principal(user("u" + std::to_string(i))).principal.iri);
    orgs.push_back(reg.register_principal(org("o" + std::to_string(i))).principal.iri);
  }
  for (const auto& r : reg.snapshot()) project_scores(g, r);
  for (int step = 0; step < 500; ++step) {
    const bool on_user = rng() % 2;
    const auto& iri = on_user ? users[rng() % users.size()] : orgs[rng() % orgs.size()];
    reg.mutate(iri, [&](const TrustRecord& r) {
      return on_user ? apply_user_penalty(r, PenaltyKind::no_dua_request, PenaltyConfig{})
                     : apply_org_penalty(r, PenaltyKind::missing_properties, PenaltyConfig{});
    });
    project_scores(g, reg.get(iri));
  }
  for (const auto& r : reg.snapshot()) {
    for (auto name : {ScoreName::behavior, ScoreName::identity, ScoreName::credibility}) {
      auto m = g.match({I(r.principal.iri), I(score_predicate(name)), Variable{"o"}});
      if (auto value = r.get(name)) {
        ASSERT_EQ(m.size(), 1u);
        EXPECT_EQ(m[0].object.lexical(), value->to_string());
      } else {
        EXPECT_TRUE(m.empty());
      }
    }
  }
}

}  // namespace
}  // namespace trustmw
