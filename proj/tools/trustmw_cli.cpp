#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "trustmw/bench.hpp"
#include "trustmw/codec.hpp"
#include "trustmw/error.hpp"
#include "trustmw/service.hpp"
#include "trustmw/synth.hpp"

namespace {

using namespace trustmw;

std::atomic<bool> g_stop{false};

std::string expand(const std::string& name) {
  if (name.find("://") != std::string::npos || name.find(':') == std::string::npos) return name;
  return Namespaces{}.expand(name);
}

Graph load_graphs(const std::vector<std::string>& paths) {
  Graph g;
  for (const auto& p : paths) {
    const auto added = load_file(g, p);
    spdlog::info("loaded {} triples from {}", added, p);
  }
  return g;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << text;
  if (!out.flush()) throw Error(ErrorCode::io, "failed writing " + path);
}

struct ServerOptions {
  std::vector<std::string> data;
  std::string config;
  std::string policies;
  std::string log;
};

std::unique_ptr<middleware::Middleware> build_middleware(const ServerOptions& o) {
  Graph g = load_graphs(o.data);
  ontology::bootstrap_vocabulary(g);
  auto cfg = o.config.empty() ? middleware::MiddlewareConfig{} : middleware::load_config(o.config);
  auto policies = policy::make_builtin_registry(g);
  if (!o.policies.empty()) {
    for (auto& p : policy::load_policy_directory(o.policies)) policies.register_policy(std::move(p), g);
  }
  policies.set_probe_sample(cfg.probe_sample);
  auto log = o.log.empty() ? middleware::TransactionLog::discard() : middleware::TransactionLog::file(o.log);
  return std::make_unique<middleware::Middleware>(std::move(g), std::move(cfg), std::move(policies), log);
}

void add_server_options(CLI::App* cmd, ServerOptions& o, bool with_log) {
  cmd->add_option("--data", o.data, "Line-format graph files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--policies", o.policies, "Directory of extra .rq policy templates")->check(CLI::ExistingDirectory);
  if (with_log) cmd->add_option("--log", o.log, "Append transactions to this file");
}

int run_query(const std::vector<std::string>& data, std::string text, const std::string& file,
              const std::string& out) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::io, "cannot read " + file);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (text.empty()) throw Error(ErrorCode::invalid_argument, "no query given (--query or --file)");
  Graph g = load_graphs(data);
  const auto ast = query::parse(text, g.namespaces());
  switch (ast.form) {
    case query::Form::ask:
      std::cout << (query::eval_ask(ast, g) ? "true" : "false") << '\n';
      break;
    case query::Form::select: {
      const auto rows = query::eval_select(ast, g);
      for (std::size_t i = 0; i < rows.variables.size(); ++i) std::cout << (i ? "\t" : "") << '?' << rows.variables[i];
      std::cout << '\n';
      for (const auto& row : rows.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "\t" : "") << row[i].to_line();
        std::cout << '\n';
      }
      break;
    }
    case query::Form::update: {
      const auto s = query::eval_update(ast, g);
      std::cout << "deleted " << s.deleted << ", inserted " << s.inserted << '\n';
      if (!out.empty()) write_text(out, serialize_lines(g));
      break;
    }
  }
  return 0;
}

int run_serve(const ServerOptions& o, const std::string& listen, const std::vector<std::string>& peers,
              int propagate_ms) {
  auto mw = build_middleware(o);
  service::HttpService http(*mw);
  const auto [host, port] = service::split_address(listen);
  const int bound = http.bind(host, port);
  http.start();
  spdlog::info("{} serving on {}:{} with {} peers", mw->config().tm_id, host, bound, peers.size());
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  service::HttpTransport transport;
  auto next = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (peers.empty() || std::chrono::steady_clock::now() < next) continue;
    mw->propagate_scores(peers, transport);
    next = std::chrono::steady_clock::now() + std::chrono::milliseconds(propagate_ms);
  }
  spdlog::info("shutting down; {} updates still queued", mw->pending_updates());
  http.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trusted compliance middleware for knowledge-graph data exchange"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // query
  std::vector<std::string> q_data;
  std::string q_text, q_file, q_out;
  auto* query_cmd = app.add_subcommand("query", "Run an ASK, SELECT or DELETE/INSERT query");
  query_cmd->add_option("--data", q_data, "Line-format graph files")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("-q,--query", q_text, "Query text");
  query_cmd->add_option("-f,--file", q_file, "Query file")->check(CLI::ExistingFile);
  query_cmd->add_option("-o,--out", q_out, "Write the updated graph here (updates only)");

  // validate
  std::vector<std::string> v_data;
  auto* validate_cmd = app.add_subcommand("validate", "Check instance data against the ontology rules");
  validate_cmd->add_option("data", v_data, "Line-format graph files")->required()->check(CLI::ExistingFile);

  // trust show
  ServerOptions t_opts;
  std::string t_iri;
  auto* trust_cmd = app.add_subcommand("trust", "Inspect trust records");
  trust_cmd->require_subcommand(1);
  auto* show_cmd = trust_cmd->add_subcommand("show", "Print one principal's trust record as JSON");
  add_server_options(show_cmd, t_opts, false);
  show_cmd->add_option("principal", t_iri, "IRI or prefixed name")->required();

  // gen
  synth::GeneratorSpec g_spec;
  std::string g_out, g_part = "all", g_strip_category, g_strip_properties;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--patients", g_spec.patient_count, "Patient count")->capture_default_str();
  gen_cmd->add_option("--seed", g_spec.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--orgs", g_spec.org_count, "Recipient organizations")->capture_default_str();
  gen_cmd->add_option("--users", g_spec.user_count, "Users")->capture_default_str();
  gen_cmd->add_option("--duas", g_spec.dua_count, "DUAs")->capture_default_str();
  gen_cmd->add_option("--part", g_part, "all, demographics or patients")
      ->check(CLI::IsMember({"all", "demographics", "patients"}))
      ->capture_default_str();
  gen_cmd->add_option("--strip-category", g_strip_category, "Remove a category's instances and inventory entry");
  gen_cmd->add_option("--strip-properties", g_strip_properties, "Remove every triple with this predicate");
  gen_cmd->add_option("-o,--out", g_out, "Output file (stdout by default)");

  // serve
  ServerOptions s_opts;
  std::string s_listen = "127.0.0.1:8080";
  std::vector<std::string> s_peers;
  int s_propagate_ms = 500;
  auto* serve_cmd = app.add_subcommand("serve", "Run the middleware HTTP service");
  add_server_options(serve_cmd, s_opts, true);
  serve_cmd->add_option("--listen", s_listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--peers", s_peers, "Peer addresses for score propagation")->delimiter(',');
  serve_cmd->add_option("--propagate-ms", s_propagate_ms, "Propagation interval")->capture_default_str();

  // replay
  ServerOptions r_opts;
  std::string r_log;
  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a transaction log over fresh state");
  add_server_options(replay_cmd, r_opts, false);
  replay_cmd->add_option("log", r_log, "Transaction log")->required()->check(CLI::ExistingFile);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run the latency or trajectory experiments");
  bench_cmd->require_subcommand(1);
  bench::LatencyOptions l_opts;
  std::string l_sizes = "1k,10k,100k", l_out, l_data_dir;
  auto* latency_cmd = bench_cmd->add_subcommand("latency", "Per-stage latency over dataset sizes");
  latency_cmd->add_option("--sizes", l_sizes, "Comma-separated sizes (1k, 10k, ...)")->capture_default_str();
  latency_cmd->add_option("--txns", l_opts.transactions, "Transactions per size")->capture_default_str();
  latency_cmd->add_option("--seed", l_opts.seed, "Seed")->capture_default_str();
  latency_cmd->add_option("--data-dir", l_data_dir, "Directory of patients-<size>.nt files");
  latency_cmd->add_option("-o,--out", l_out, "Report path (.csv or .json)")->required();

  bench::TrajectoryConfig tr_cfg;
  std::string tr_out;
  std::vector<std::string> tr_scenarios;
  bool tr_serial = false;
  auto* trajectory_cmd = bench_cmd->add_subcommand("trajectory", "Score trajectories under random violations");
  trajectory_cmd->add_option("--prob", tr_cfg.violation_prob, "Violation probability")->capture_default_str();
  trajectory_cmd->add_option("--runs", tr_cfg.runs, "Runs per scenario")->capture_default_str();
  trajectory_cmd->add_option("--seed", tr_cfg.seed, "Seed")->capture_default_str();
  trajectory_cmd->add_option("--cap", tr_cfg.cap, "Transaction cap per run")->capture_default_str();
  trajectory_cmd->add_option("--scenarios", tr_scenarios, "Subset of scenarios")->delimiter(',');
  trajectory_cmd->add_flag("--serial", tr_serial, "Run without OpenMP");
  trajectory_cmd->add_option("-o,--out", tr_out, "Report path (.csv or .json)")->required();

  // vocab
  std::string vocab_out;
  auto* vocab_cmd = app.add_subcommand("vocab", "Print the bootstrap vocabulary in line format");
  vocab_cmd->add_option("-o,--out", vocab_out, "Output file (stdout by default)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_default_logger(spdlog::stderr_color_mt("trustmw"));

  try {
    if (*query_cmd) return run_query(q_data, q_text, q_file, q_out);

    if (*validate_cmd) {
      const auto report = ontology::validate_instances(load_graphs(v_data));
      for (const auto& v : report.violations) std::cout << v.rule << '\t' << v.iri << '\t' << v.message << '\n';
      std::cout << report.violations.size() << " violations\n";
      return report.ok() ? 0 : 1;
    }

    if (*show_cmd) {
      auto mw = build_middleware(t_opts);
      const auto record = mw->registry().find(expand(t_iri));
      if (!record) throw Error(ErrorCode::not_found, "no trust record for <" + expand(t_iri) + ">");
      std::cout << codec::to_json(*record).dump(2) << '\n';
      return 0;
    }

    if (*gen_cmd) {
      Graph g = g_part == "demographics" ? synth::generate_demographics(g_spec)
                : g_part == "patients"   ? synth::generate_patients(g_spec)
                                         : synth::generate(g_spec);
      if (!g_strip_category.empty()) {
        spdlog::info("stripped {} triples", synth::strip_category(g, expand(g_strip_category)));
      }
      if (!g_strip_properties.empty()) {
        spdlog::info("stripped {} triples", synth::strip_properties(g, expand(g_strip_properties)));
      }
      write_text(g_out, serialize_lines(g));
      return 0;
    }

    if (*serve_cmd) return run_serve(s_opts, s_listen, s_peers, s_propagate_ms);

    if (*replay_cmd) {
      auto mw = build_middleware(r_opts);
      const auto report = middleware::replay(middleware::read_log(r_log), *mw);
      std::cout << codec::json{{"transactions", report.transactions},
                               {"decisionMismatches", report.decision_mismatches}}
                       .dump()
                << '\n';
      return report.decision_mismatches == 0 ? 0 : 1;
    }

    if (*latency_cmd) {
      l_opts.sizes = bench::parse_sizes(l_sizes);
      if (!l_data_dir.empty()) l_opts.data_dir = l_data_dir;
      const auto report = bench::run_latency(l_opts);
      bench::emit_report(report, bench::format_from_path(l_out), l_out);
      bench::write_csv(report, std::cout);
      return 0;
    }

    if (*trajectory_cmd) {
      if (!tr_scenarios.empty()) {
        tr_cfg.scenarios.clear();
        for (const auto& s : tr_scenarios) tr_cfg.scenarios.push_back(bench::scenario_from_string(s));
      }
      tr_cfg.parallel = !tr_serial;
      const auto report = bench::run_trajectory(tr_cfg);
      bench::emit_report(report, bench::format_from_path(tr_out), tr_out);
      for (const auto& sc : report.scenarios) {
        std::cout << bench::to_string(sc.scenario) << "\tmean transactions to zero "
                  << sc.mean_transactions_to_zero() << '\n';
      }
      return 0;
    }

    if (*vocab_cmd) {
      write_text(vocab_out, serialize_lines(ontology::vocabulary_graph()));
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
