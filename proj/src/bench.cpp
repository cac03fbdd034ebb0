#include "trustmw/bench.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "json.hpp"
#include "trustmw/error.hpp"
#include "trustmw/synth.hpp"

namespace trustmw::bench {

namespace v = ontology::vocab;
using middleware::DataRequest;
using middleware::Middleware;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

bool is_retrievable(const std::string& category) {
  return category == v::kPatient || category == v::kEncounter || category == v::kObservation;
}

}  // namespace

StageStats summarize(std::vector<double> samples) {
  StageStats s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(samples.size());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(k, 1, samples.size()) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  return s;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, comma - start);
    start = comma + 1;
    if (item.empty()) throw Error(ErrorCode::invalid_argument, "empty dataset size in '" + text + "'");
    std::size_t mult = 1;
    const char suffix = static_cast<char>(std::tolower(static_cast<unsigned char>(item.back())));
    if (suffix == 'k' || suffix == 'm') {
      mult = suffix == 'k' ? 1000 : 1000000;
      item.pop_back();
    }
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || end != item.data() + item.size() || value == 0) {
      throw Error(ErrorCode::invalid_argument, "bad dataset size '" + item + "'");
    }
    out.push_back(value * mult);
  }
  return out;
}

std::string size_label(std::size_t size) {
  if (size % 1000000 == 0) return std::to_string(size / 1000000) + "M";
  if (size % 1000 == 0) return std::to_string(size / 1000) + "K";
  return std::to_string(size);
}

std::vector<DataRequest> compliant_requests(const Graph& graph) {
  std::vector<DataRequest> out;
  const Term affiliated = Term::iri(v::kIsAffiliatedWith);
  for (const auto& t : graph.match({Variable{"d"}, Term::iri(v::kRdfType), Term::iri(v::kDataUsageAgreement)})) {
    const auto dua = ontology::read_dua(graph, t.subject.lexical()).record;
    for (const auto& u : graph.match({Variable{"u"}, affiliated, Term::iri(dua.recipient)})) {
      if (!graph.contains(Triple{u.subject, Term::iri(v::kRdfType), Term::iri(v::kUser)})) continue;
      for (const auto& category : dua.requested_data) {
        if (!is_retrievable(category)) continue;
        if (!graph.contains(
                Triple{Term::iri(dua.custodian), Term::iri(v::kHasDataCategory), Term::iri(category)})) {
          continue;
        }
        for (const auto& purpose : dua.permitted_uses) {
          out.push_back(DataRequest{u.subject.lexical(), dua.custodian, category, purpose, "", 0});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const DataRequest& a, const DataRequest& b) {
    return std::tie(a.user, a.custodian, a.category, a.purpose) < std::tie(b.user, b.custodian, b.category, b.purpose);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

Graph latency_dataset(const LatencyOptions& options, std::size_t size) {
  synth::GeneratorSpec spec;
  spec.seed = options.seed;
  spec.patient_count = size;
  Graph g;
  ontology::bootstrap_vocabulary(g);
  synth::append_demographics(g, spec);
  if (options.data_dir) {
    const auto path = *options.data_dir / ("patients-" + size_label(size) + ".nt");
    if (std::filesystem::exists(path)) {
      spdlog::info("loading {}", path.string());
      load_file(g, path.string());
      return g;
    }
    spdlog::warn("no dataset at {}; generating {} patients from seed {}", path.string(), size, options.seed);
  }
  synth::append_patients(g, spec);
  return g;
}

}  // namespace

LatencyReport run_latency(const LatencyOptions& options) {
  if (options.transactions == 0) throw Error(ErrorCode::invalid_argument, "transaction count must be positive");
  LatencyReport report;
  report.transaction_count = options.transactions;
  report.seed = options.seed;
  for (const std::size_t size : options.sizes) {
    Graph g = latency_dataset(options, size);
    const auto candidates = compliant_requests(g);
    if (candidates.empty()) throw Error(ErrorCode::state, "dataset has no compliant request");
    auto policies = policy::make_builtin_registry(g);
    Middleware mw(std::move(g), options.config, std::move(policies), middleware::TransactionLog::memory());

    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(size)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    std::array<std::vector<double>, 4> samples;
    std::vector<double> totals;
    for (std::size_t t = 0; t < options.transactions; ++t) {
      DataRequest req = candidates[pick(rng)];
      req.request_id = "lat-" + size_label(size) + "-" + std::to_string(t);
      const auto resp = mw.handle_request(req);
      if (!resp.decision.granted) {
        throw Error(ErrorCode::state, "latency request " + req.request_id + " was denied");
      }
      samples[0].push_back(resp.timings.recipient_policy_check);
      samples[1].push_back(resp.timings.data_credibility_check);
      samples[2].push_back(resp.timings.trust_score_update);
      samples[3].push_back(resp.timings.data_retrieval);
      totals.push_back(resp.timings.total);
    }
    SizeLatency row;
    row.size = size;
    for (std::size_t k = 0; k < 4; ++k) row.stages[k] = summarize(std::move(samples[k]));
    row.total = summarize(std::move(totals));
    spdlog::info("{}: retrieval mean {:.6f}s over {} transactions", size_label(size), row.stages[3].mean,
                 options.transactions);
    report.sizes.push_back(row);
  }
  return report;
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::user_with_dua_violations: return "user-with-dua-violations";
    case Scenario::user_without_dua: return "user-without-dua";
    case Scenario::org_missing_category: return "org-missing-category";
    case Scenario::org_missing_properties: return "org-missing-properties";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : kScenarios) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + name + "'");
}

namespace {

class DrawStream {
 public:
  DrawStream(std::uint64_t seed, Scenario scenario, std::size_t run, double prob)
      : coin_(prob) {
    const auto words = make_seq(seed, scenario, run);
    std::seed_seq seq(words.begin(), words.end());
    rng_.seed(seq);
  }
  bool next() { return coin_(rng_); }

 private:
  static std::vector<std::uint32_t> make_seq(std::uint64_t seed, Scenario scenario, std::size_t run) {
    const auto r = static_cast<std::uint64_t>(run);
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(scenario), static_cast<std::uint32_t>(r),
                         static_cast<std::uint32_t>(r >> 32)};
  }
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_;
};

struct Fixture {
  Scenario scenario{};
  Graph graph;
  policy::PolicyRegistry policies;
  std::string tracked;
  trust::ScoreName score{};
  DataRequest violating;
  std::optional<DataRequest> benign;  // none: the step is idle
};

DataRequest make_request(const char* user, const std::string& category, const std::string& purpose) {
  return DataRequest{synth::user_iri(user), synth::custodian_iri(), category, purpose, "", 0};
}

Fixture make_fixture(Scenario scenario, std::size_t patients) {
  synth::GeneratorSpec spec;
  spec.patient_count = patients;
  Graph g = synth::generate(spec);
  const auto patient = make_request(synth::kPhysician105, v::kPatient, v::kPublicHealth);
  Fixture f{scenario, {}, {}, {}, trust::ScoreName::credibility, {}, patient};
  switch (scenario) {
    case Scenario::user_with_dua_violations:
      f.tracked = synth::user_iri(synth::kPhysician105);
      f.score = trust::ScoreName::behavior;
      f.violating = make_request(synth::kPhysician105, v::kTestResult, v::kPublicHealth);
      break;
    case Scenario::user_without_dua:
      f.tracked = synth::user_iri(synth::kResearchScientist731);
      f.score = trust::ScoreName::behavior;
      f.violating = make_request(synth::kResearchScientist731, v::kPatient, v::kPublicHealth);
      f.benign.reset();
      break;
    case Scenario::org_missing_category:
      synth::strip_category(g, v::kObservation);
      f.tracked = synth::custodian_iri();
      f.violating = make_request(synth::kPhysician105, v::kObservation, v::kPublicHealth);
      break;
    case Scenario::org_missing_properties:
      synth::strip_properties(g, v::syn("encounterType"));
      f.tracked = synth::custodian_iri();
      f.violating = make_request(synth::kPhysician105, v::kEncounter, v::kPublicHealth);
      break;
  }
  f.policies = policy::make_builtin_registry(g);
  f.graph = std::move(g);
  return f;
}

RunSeries simulate(const Fixture& f, const TrajectoryConfig& config, std::size_t run) {
  middleware::MiddlewareConfig mc;
  mc.penalties = config.penalties;
  mc.parallel_retrieval = false;
  Middleware mw(f.graph, mc, f.policies);
  DrawStream draws(config.seed, f.scenario, run, config.violation_prob);

  RunSeries series;
  series.run = run;
  series.scores.push_back(*mw.registry().get(f.tracked).get(f.score));
  const std::string prefix = std::string(to_string(f.scenario)) + "-" + std::to_string(run) + "-";
  for (std::size_t t = 1; t <= config.cap; ++t) {
    const DataRequest* req = draws.next() ? &f.violating : (f.benign ? &*f.benign : nullptr);
    if (req) {
      DataRequest r = *req;
      r.request_id = prefix + std::to_string(t);
      mw.handle_request(r);
    }
    const Score now = *mw.registry().get(f.tracked).get(f.score);
    series.scores.push_back(now);
    if (now == Score::zero()) {
      series.transactions_to_zero = t;
      break;
    }
  }
  return series;
}

}  // namespace

std::vector<bool> violation_draws(std::uint64_t seed, Scenario scenario, std::size_t run, double prob,
                                  std::size_t count) {
  DrawStream draws(seed, scenario, run, prob);
  std::vector<bool> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = draws.next();
  return out;
}

double ScenarioSeries::mean_transactions_to_zero() const {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.transactions_to_zero) {
      sum += static_cast<double>(*r.transactions_to_zero);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

TrajectoryReport run_trajectory(const TrajectoryConfig& config) {
  if (!(config.violation_prob >= 0 && config.violation_prob <= 1)) {
    throw Error(ErrorCode::invalid_argument, "violation probability must lie in [0,1]");
  }
  config.penalties.validate();
  TrajectoryReport report;
  report.seed = config.seed;
  report.violation_prob = config.violation_prob;
  report.cap = config.cap;
  for (const Scenario scenario : config.scenarios) {
    const Fixture fixture = make_fixture(scenario, config.patient_count);
    ScenarioSeries out;
    out.scenario = scenario;
    out.runs.resize(config.runs);
    const auto n = static_cast<std::int64_t>(config.runs);
    if (config.parallel) {
      // Exceptions may not cross the parallel region.
      std::vector<std::string> errors(config.runs);
#pragma omp parallel for schedule(dynamic, 8)
      for (std::int64_t r = 0; r < n; ++r) {
        try {
          out.runs[r] = simulate(fixture, config, static_cast<std::size_t>(r));
        } catch (const std::exception& e) {
          errors[r] = e.what();
        }
      }
      for (const auto& e : errors) {
        if (!e.empty()) throw Error(ErrorCode::state, "trajectory run failed: " + e);
      }
    } else {
      for (std::int64_t r = 0; r < n; ++r) out.runs[r] = simulate(fixture, config, static_cast<std::size_t>(r));
    }
    spdlog::info("{}: mean transactions to zero {:.1f} over {} runs", to_string(scenario),
                 out.mean_transactions_to_zero(), config.runs);
    report.scenarios.push_back(std::move(out));
  }
  return report;
}

Format format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? Format::json : Format::csv;
}

void write_csv(const LatencyReport& report, std::ostream& out) {
  out << "stage";
  for (const auto& s : report.sizes) {
    const auto label = size_label(s.size);
    out << ',' << label << "_mean," << label << "_p50," << label << "_p95";
  }
  out << '\n';
  for (std::size_t k = 0; k < kStageNames.size(); ++k) {
    out << kStageNames[k];
    for (const auto& s : report.sizes) {
      const auto& st = s.stages[k];
      out << ',' << number(st.mean) << ',' << number(st.p50) << ',' << number(st.p95);
    }
    out << '\n';
  }
}

void write_json(const LatencyReport& report, std::ostream& out) {
  ordered_json j;
  j["transactionCount"] = report.transaction_count;
  j["seed"] = report.seed;
  j["sizes"] = ordered_json::array();
  for (const auto& s : report.sizes) {
    ordered_json stages;
    for (std::size_t k = 0; k < kStageNames.size(); ++k) {
      stages[kStageNames[k]] = {{"mean", s.stages[k].mean}, {"p50", s.stages[k].p50}, {"p95", s.stages[k].p95}};
    }
    j["sizes"].push_back({{"size", s.size}, {"label", size_label(s.size)}, {"stages", stages}});
  }
  out << j.dump(2) << '\n';
}

void write_csv(const TrajectoryReport& report, std::ostream& out) {
  out << "scenario,run,transaction,score\n";
  for (const auto& sc : report.scenarios) {
    for (const auto& r : sc.runs) {
      for (std::size_t t = 0; t < r.scores.size(); ++t) {
        out << to_string(sc.scenario) << ',' << r.run << ',' << t << ',' << r.scores[t].to_string() << '\n';
      }
    }
  }
}

void write_json(const TrajectoryReport& report, std::ostream& out) {
  ordered_json j;
  j["rngSeed"] = report.seed;
  j["violationProb"] = report.violation_prob;
  j["cap"] = report.cap;
  j["scenarios"] = ordered_json::array();
  for (const auto& sc : report.scenarios) {
    ordered_json runs = ordered_json::array();
    for (const auto& r : sc.runs) {
      ordered_json scores = ordered_json::array();
      for (const Score s : r.scores) scores.push_back(s.to_double());
      runs.push_back({{"run", r.run},
                      {"transactionsToZero", r.transactions_to_zero ? ordered_json(*r.transactions_to_zero)
                                                                    : ordered_json(nullptr)},
                      {"scores", std::move(scores)}});
    }
    j["scenarios"].push_back({{"name", to_string(sc.scenario)}, {"runs", std::move(runs)}});
  }
  out << j.dump() << '\n';
}

namespace {

template <class Report>
void emit(const Report& report, Format format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write report to " + path.string());
  if (format == Format::csv) {
    write_csv(report, out);
  } else {
    write_json(report, out);
  }
  out.flush();
  if (!out) throw Error(ErrorCode::io, "failed writing report to " + path.string());
}

}  // namespace

void emit_report(const LatencyReport& report, Format format, const std::filesystem::path& path) {
  emit(report, format, path);
}

void emit_report(const TrajectoryReport& report, Format format, const std::filesystem::path& path) {
  emit(report, format, path);
}

}  // namespace trustmw::bench
