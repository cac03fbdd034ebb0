#include "trustmw/middleware.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <sstream>
#include <thread>

#include "trustmw/codec.hpp"
#include "trustmw/error.hpp"

namespace trustmw::middleware {

using Clock = std::chrono::steady_clock;
using trust::TrustRecord;
namespace v = ontology::vocab;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::invalid_argument, "config key " + key + " expects a boolean, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::invalid_argument, "config key " + key + " expects a number, got '" + value + "'");
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty() || !std::all_of(value.begin(), value.end(), ::isdigit)) {
    throw Error(ErrorCode::invalid_argument, "config key " + key + " expects a non-negative integer");
  }
  return std::stoull(value);
}

std::string local_name(const std::string& iri) {
  const auto cut = iri.find_last_of("#/");
  return cut == std::string::npos ? iri : iri.substr(cut + 1);
}

struct RetrievalPlan {
  query::BindingSet out;
  std::vector<TermId> properties;  // kNoTerm when the graph never uses the property
  std::vector<Term> instances;
};

RetrievalPlan plan_retrieval(const Graph& graph, const std::string& category) {
  RetrievalPlan plan;
  plan.out.variables.push_back("instance");
  for (const auto& p : ontology::property_groups(category)) {
    plan.out.variables.push_back(local_name(p));
    plan.properties.push_back(graph.find_id(Term::iri(p)).value_or(kNoTerm));
  }
  query::QueryAst ast;
  ast.form = query::Form::select;
  ast.bgp.push_back({Variable{"instance"}, Term::iri(iri::rdf_type()), Term::iri(category)});
  ast.projection = {"instance"};
  auto rows = query::eval_select(ast, graph);
  plan.instances.reserve(rows.size());
  for (auto& row : rows.rows) plan.instances.push_back(std::move(row[0]));
  return plan;
}

std::vector<Term> materialize(const Graph& graph, const RetrievalPlan& plan, const Term& instance) {
  static const Term kAbsent = Term::literal("");
  std::vector<Term> row;
  row.reserve(plan.properties.size() + 1);
  row.push_back(instance);
  const auto id = graph.find_id(instance);
  for (TermId p : plan.properties) {
    const Term* value = &kAbsent;
    if (id && p != kNoTerm) {
      graph.scan(*id, p, kNoTerm, [&](const IdTriple& t) {
        value = &graph.term(t.o);
        return false;
      });
    }
    row.push_back(*value);
  }
  return row;
}

}  // namespace

MiddlewareConfig parse_config(const std::string& text) {
  MiddlewareConfig cfg;
  double behavior_weight = 0.5, identity_weight = 0.5, threshold = 0.5;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::invalid_argument, "config line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto score = [&] {
      try {
        return Score::parse(value);
      } catch (const Error&) {
        throw Error(ErrorCode::invalid_argument, "config key " + key + " expects a decimal, got '" + value + "'");
      }
    };
    if (key == "behaviorWeight") {
      behavior_weight = parse_double(key, value);
    } else if (key == "identityWeight") {
      identity_weight = parse_double(key, value);
    } else if (key == "threshold") {
      threshold = parse_double(key, value);
    } else if (key == "duaViolation") {
      cfg.penalties.dua_violation = score();
    } else if (key == "noDuaRequest") {
      cfg.penalties.no_dua_request = score();
    } else if (key == "missingCategory") {
      cfg.penalties.missing_category = score();
    } else if (key == "missingProperties") {
      cfg.penalties.missing_properties = score();
    } else if (key == "toleranceGrace") {
      cfg.penalties.tolerance_grace = static_cast<std::uint32_t>(parse_count(key, value));
    } else if (key == "penalizeOrganization") {
      cfg.penalties.penalize_organization = parse_bool(key, value);
    } else if (key == "probeSample") {
      cfg.probe_sample = parse_count(key, value);
    } else if (key == "tmId") {
      if (value.empty()) throw Error(ErrorCode::invalid_argument, "config key tmId is empty");
      cfg.tm_id = value;
    } else if (key == "parallelRetrieval") {
      cfg.parallel_retrieval = parse_bool(key, value);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
    }
  }
  cfg.assessment = trust::AssessmentConfig::make(behavior_weight, identity_weight, threshold);
  cfg.penalties.validate();
  if (cfg.probe_sample == 0) throw Error(ErrorCode::invalid_argument, "probeSample must be positive");
  return cfg;
}

MiddlewareConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void check_response(const DataResponse& r) {
  const auto& d = r.decision;
  auto fail = [&](const char* why) {
    throw Error(ErrorCode::integrity, "response " + r.request_id + ": " + why);
  };
  if (d.granted != (d.compliance.compliant && d.assessment.passed && !d.lockout_triggered)) {
    fail("granted differs from compliant AND passed AND NOT lockout");
  }
  if (r.records.has_value() != d.granted) fail("records present without a grant or missing on a grant");
  bool recipient_ok = true;
  for (const auto& p : d.compliance.per_policy) {
    if (p.side == policy::Side::recipient && p.outcome != policy::Outcome::passed) recipient_ok = false;
  }
  if (d.compliance.compliant != recipient_ok) fail("compliant differs from the recipient-side outcomes");
  if (d.lockout_triggered && !d.applied_penalties.empty()) fail("penalties applied to a locked-out request");
}

query::BindingSet retrieve(const Graph& graph, const std::string& category) {
  auto plan = plan_retrieval(graph, category);
  plan.out.rows.reserve(plan.instances.size());
  for (const auto& instance : plan.instances) plan.out.rows.push_back(materialize(graph, plan, instance));
  return std::move(plan.out);
}

query::BindingSet retrieve_parallel(const Graph& graph, const std::string& category) {
  auto plan = plan_retrieval(graph, category);
  const auto n = static_cast<std::int64_t>(plan.instances.size());
  plan.out.rows.resize(plan.instances.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) plan.out.rows[i] = materialize(graph, plan, plan.instances[i]);
  return std::move(plan.out);
}

std::shared_ptr<TransactionLog> TransactionLog::memory() {
  std::shared_ptr<TransactionLog> log(new TransactionLog);
  log->keep_ = true;
  return log;
}

std::shared_ptr<TransactionLog> TransactionLog::file(const std::filesystem::path& path) {
  std::shared_ptr<TransactionLog> log(new TransactionLog);
  log->out_.open(path, std::ios::app);
  if (!log->out_) throw Error(ErrorCode::io, "cannot open transaction log " + path.string());
  return log;
}

std::shared_ptr<TransactionLog> TransactionLog::discard() { return std::shared_ptr<TransactionLog>(new TransactionLog); }

void TransactionLog::append(const std::string& line) {
  std::lock_guard lock(mutex_);
  if (keep_) lines_.push_back(line);
  if (out_.is_open()) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::io, "transaction log write failed");
  }
}

std::vector<std::string> TransactionLog::lines() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

std::vector<std::string> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read transaction log " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

Middleware::Middleware(Graph graph, MiddlewareConfig config, policy::PolicyRegistry policies,
                       std::shared_ptr<TransactionLog> log)
    : graph_(std::move(graph)),
      config_(std::move(config)),
      policies_(std::move(policies)),
      registry_(config_.tm_id),
      log_(log ? std::move(log) : TransactionLog::discard()) {
  config_.penalties.validate();
  policies_.set_probe_sample(config_.probe_sample);
  ontology::bootstrap_vocabulary(graph_);
  for (const auto& ref : ontology::list_principals(graph_)) {
    auto record = trust::init_principal(ref);
    trust::read_projection(graph_, record);
    trust::project_scores(graph_, record);
    registry_.restore(std::move(record));
  }
}

TrustRecord Middleware::ensure_principal(const std::string& iri) {
  if (auto r = registry_.find(iri)) return *std::move(r);
  ontology::PrincipalRef ref;
  {
    std::shared_lock lock(graph_mutex_);
    ref = ontology::read_principal(graph_, iri);
  }
  return registry_.ensure(ref);
}

void Middleware::enqueue(std::vector<ScoreUpdate> updates) {
  if (updates.empty()) return;
  std::lock_guard lock(queue_mutex_);
  for (auto& u : updates) queue_.push_back(Pending{std::move(u), {}});
}

void Middleware::project(const std::vector<std::string>& iris) {
  if (iris.empty()) return;
  std::unique_lock lock(graph_mutex_);
  for (const auto& iri : iris) trust::project_scores(graph_, registry_.get(iri));
}

std::size_t Middleware::pending_updates() const {
  std::lock_guard lock(queue_mutex_);
  return queue_.size();
}

DataResponse Middleware::handle_request(const DataRequest& req) {
  const auto started = Clock::now();
  DataResponse resp;
  resp.request_id = req.request_id;
  try {
    std::string org;
    {
      std::shared_lock lock(graph_mutex_);
      policy::validate_request(req, graph_);
      const auto user = ontology::read_principal(graph_, req.user);
      if (user.kind != ontology::PrincipalKind::user) {
        throw Error(ErrorCode::not_found, "<" + req.user + "> is not a user");
      }
      if (!user.affiliation) throw Error(ErrorCode::validation, "user <" + req.user + "> has no organization");
      org = *user.affiliation;
      if (ontology::read_principal(graph_, req.custodian).kind != ontology::PrincipalKind::organization) {
        throw Error(ErrorCode::not_found, "<" + req.custodian + "> is not an organization");
      }
    }
    const TrustRecord user_rec = ensure_principal(req.user);
    const TrustRecord org_rec = ensure_principal(org);
    const TrustRecord custodian_rec = ensure_principal(req.custodian);

    AccessDecision& d = resp.decision;
    d.assessment = trust::assess(user_rec, config_.assessment);
    if (trust::check_lockout(custodian_rec, org_rec)) {
      d.lockout_triggered = true;
      for (const auto& p : policies_.policies()) {
        d.compliance.per_policy.push_back({p.id, policy::Outcome::not_evaluated, p.side, p.failure_penalty});
      }
    } else {
      policy::StageTimes stages;
      {
        std::shared_lock lock(graph_mutex_);
        d.compliance = policies_.evaluate(req, graph_, &stages);
      }
      resp.timings.recipient_policy_check = stages.recipient_policy_check;
      resp.timings.data_credibility_check = stages.data_credibility_check;
    }
    d.granted = d.compliance.compliant && d.assessment.passed && !d.lockout_triggered;

    const auto update_started = Clock::now();
    {
      std::lock_guard commit(commit_mutex_);
      std::vector<ScoreUpdate> updates;
      std::vector<std::string> touched;
      auto penalize = [&](const std::string& iri, ScoreName score, PenaltyKind kind,
                          const std::function<TrustRecord(const TrustRecord&)>& fn) {
        Score before, after;
        auto u = registry_.mutate(iri, [&](const TrustRecord& r) {
          before = r.get(score).value_or(Score::zero());
          TrustRecord out = fn(r);
          after = out.get(score).value_or(Score::zero());
          return out;
        });
        d.applied_penalties.push_back({iri, kind, score, before, after});
        updates.insert(updates.end(), u.begin(), u.end());
        touched.push_back(iri);
      };
      if (!d.lockout_triggered) {
        const auto& pc = config_.penalties;
        if (const auto kind = policy::penalty_for(d.compliance)) {
          if (!d.compliance.compliant) {
            penalize(req.user, ScoreName::behavior, *kind,
                     [&](const TrustRecord& r) { return trust::apply_user_penalty(r, *kind, pc); });
            if (pc.penalize_organization) {
              penalize(org, ScoreName::identity, *kind,
                       [&](const TrustRecord& r) { return trust::apply_identity_deduction(r, pc.deduction(*kind)); });
            }
          } else if (d.granted) {
            penalize(req.custodian, ScoreName::credibility, *kind,
                     [&](const TrustRecord& r) { return trust::apply_org_penalty(r, *kind, pc); });
            resp.custodian_notices.push_back(
                *kind == PenaltyKind::missing_category
                    ? "custodian <" + req.custodian + "> does not hold <" + req.category + ">"
                    : "custodian <" + req.custodian + "> holds incomplete <" + req.category + "> records");
          }
        }
        const auto c = registry_.get(req.custodian);
        const auto o = registry_.get(org);
        if (trust::lock_condition(c, o) && !c.locked_with.count(org)) {
          auto u = registry_.mutate_pair(req.custodian, org, [](TrustRecord& a, TrustRecord& b) { trust::lock_pair(a, b); });
          updates.insert(updates.end(), u.begin(), u.end());
        }
      }
      project(touched);
      enqueue(std::move(updates));
      resp.timings.trust_score_update = seconds_since(update_started);
      if (log_->enabled()) {
        codec::json penalties = codec::json::array();
        for (const auto& p : d.applied_penalties) penalties.push_back(codec::to_json(p));
        codec::json record = {{"kind", "request"},
                              {"requestId", req.request_id},
                              {"request", codec::to_json(req)},
                              {"decision", codec::to_json(d)},
                              {"penalties", penalties},
                              {"timings", codec::to_json(resp.timings)}};
        log_->append(record.dump());
      }
      // The commit record belongs to the update; the logged figure stops short of it.
      resp.timings.trust_score_update = seconds_since(update_started);
    }

    if (d.granted) {
      const auto retrieval_started = Clock::now();
      std::shared_lock lock(graph_mutex_);
      resp.records = config_.parallel_retrieval ? retrieve_parallel(graph_, req.category) : retrieve(graph_, req.category);
      resp.timings.data_retrieval = seconds_since(retrieval_started);
    }
    resp.timings.total = seconds_since(started);
    return resp;
  } catch (const Error& e) {
    spdlog::warn("request {} failed: {}", req.request_id, e.what());
    throw;
  }
}

void Middleware::rewrite_dua(const ontology::DuaRecord& dua) {
  std::lock_guard commit(commit_mutex_);
  ensure_principal(dua.custodian);
  ensure_principal(dua.recipient);
  std::vector<ScoreUpdate> updates;
  {
    std::unique_lock lock(graph_mutex_);
    updates = registry_.mutate_pair(dua.custodian, dua.recipient, [&](TrustRecord& c, TrustRecord& r) {
      trust::rewrite_dua_reset(c, r, dua, graph_);
    });
    trust::project_scores(graph_, registry_.get(dua.custodian));
    trust::project_scores(graph_, registry_.get(dua.recipient));
  }
  enqueue(std::move(updates));
  if (log_->enabled()) log_->append(codec::json{{"kind", "rewriteDua"}, {"dua", codec::to_json(dua)}}.dump());
  spdlog::info("DUA <{}> rewritten; exchanges between <{}> and <{}> re-enabled", dua.iri, dua.custodian,
               dua.recipient);
}

std::vector<PeerResult> Middleware::propagate_scores(const std::vector<std::string>& peers, PeerTransport& transport,
                                                     const RetryPolicy& retry) {
  std::vector<PeerResult> results;
  for (const auto& peer : peers) {
    PeerResult result{peer};
    std::vector<ScoreUpdate> batch;
    {
      std::lock_guard lock(queue_mutex_);
      for (const auto& p : queue_) {
        if (!p.acked.count(peer)) batch.push_back(p.update);
      }
    }
    if (!batch.empty()) {
      bool ok = false;
      auto backoff = retry.initial_backoff;
      for (int attempt = 0; attempt < std::max(1, retry.attempts) && !ok; ++attempt) {
        if (attempt > 0) {
          std::this_thread::sleep_for(backoff);
          backoff *= 2;
        }
        try {
          ok = transport.send(peer, batch);
        } catch (const std::exception& e) {
          spdlog::warn("sending scores to {} failed: {}", peer, e.what());
        }
      }
      std::lock_guard lock(queue_mutex_);
      if (ok) {
        // Entries are matched by value; duplicates are harmless to mark.
        for (auto& p : queue_) {
          if (std::find(batch.begin(), batch.end(), p.update) != batch.end()) p.acked.insert(peer);
        }
        result.acked = batch.size();
      } else {
        result.reachable = false;
        spdlog::warn("peer {} unreachable; {} updates retained", peer, batch.size());
      }
    }
    {
      std::lock_guard lock(queue_mutex_);
      result.retained = static_cast<std::size_t>(
          std::count_if(queue_.begin(), queue_.end(), [&](const Pending& p) { return !p.acked.count(peer); }));
    }
    results.push_back(std::move(result));
  }
  std::lock_guard lock(queue_mutex_);
  std::erase_if(queue_, [&](const Pending& p) {
    return std::all_of(peers.begin(), peers.end(), [&](const std::string& peer) { return p.acked.count(peer) > 0; });
  });
  return results;
}

std::size_t Middleware::receive_scores(const std::vector<ScoreUpdate>& updates) {
  std::lock_guard commit(commit_mutex_);
  std::size_t applied = 0;
  std::vector<std::string> touched;
  for (const auto& u : updates) {
    if (registry_.apply_remote(u)) {
      ++applied;
      touched.push_back(u.principal);
    }
  }
  project(touched);
  if (applied > 0 && log_->enabled()) {
    codec::json batch = codec::json::array();
    for (const auto& u : updates) batch.push_back(codec::to_json(u));
    log_->append(codec::json{{"kind", "remoteScores"}, {"updates", batch}}.dump());
  }
  return applied;
}

ReplayReport replay(const std::vector<std::string>& lines, Middleware& fresh) {
  ReplayReport report;
  for (const auto& line : lines) {
    codec::json j;
    try {
      j = codec::json::parse(line);
    } catch (const codec::json::exception& e) {
      throw Error(ErrorCode::parse, std::string("transaction log: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    if (kind == "request") {
      const auto resp = fresh.handle_request(codec::request_from_json(j.at("request")));
      codec::json penalties = codec::json::array();
      for (const auto& p : resp.decision.applied_penalties) penalties.push_back(codec::to_json(p));
      if (resp.decision.granted != j.at("decision").at("granted").get<bool>() || penalties != j.at("penalties")) {
        ++report.decision_mismatches;
      }
    } else if (kind == "rewriteDua") {
      fresh.rewrite_dua(codec::dua_from_json(j.at("dua")));
    } else if (kind == "remoteScores") {
      std::vector<ScoreUpdate> updates;
      for (const auto& u : j.at("updates")) updates.push_back(codec::update_from_json(u));
      fresh.receive_scores(updates);
    } else {
      throw Error(ErrorCode::parse, "transaction log: unknown record kind '" + kind + "'");
    }
    ++report.transactions;
  }
  return report;
}

}  // namespace trustmw::middleware
