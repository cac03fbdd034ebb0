#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trustmw/middleware.hpp"

namespace trustmw::bench {

// Latency stages, in report row order.
inline constexpr std::array<const char*, 4> kStageNames = {"recipientPolicyCheck", "dataCredibilityCheck",
                                                           "trustScoreUpdate", "dataRetrieval"};

struct StageStats {
  double mean = 0;  // seconds
  double p50 = 0;
  double p95 = 0;
  friend bool operator==(const StageStats&, const StageStats&) = default;
};

// Nearest-rank percentiles. Empty input gives all zeros.
StageStats summarize(std::vector<double> samples);

struct SizeLatency {
  std::size_t size = 0;
  std::array<StageStats, 4> stages;
  StageStats total;  // whole handle_request
};

struct LatencyReport {
  std::size_t transaction_count = 0;
  std::uint64_t seed = 0;
  std::vector<SizeLatency> sizes;
};

struct LatencyOptions {
  std::vector<std::size_t> sizes{1000, 10000, 100000};
  std::size_t transactions = 1000;
  std::uint64_t seed = 1;
  // Holds patients-<label>.nt per size; missing files are generated.
  std::optional<std::filesystem::path> data_dir;
  middleware::MiddlewareConfig config;
};

// "1k,10k,100k" or plain integers. Throws Error(invalid_argument).
std::vector<std::size_t> parse_sizes(const std::string& text);
// 1000 -> "1K", 1000000 -> "1M", other values printed in full.
std::string size_label(std::size_t size);

// Every compliant request the demographics allow over retrievable categories.
std::vector<middleware::DataRequest> compliant_requests(const Graph& graph);

LatencyReport run_latency(const LatencyOptions& options);

enum class Scenario { user_with_dua_violations, user_without_dua, org_missing_category, org_missing_properties };
inline constexpr std::array<Scenario, 4> kScenarios = {Scenario::user_with_dua_violations, Scenario::user_without_dua,
                                                       Scenario::org_missing_category,
                                                       Scenario::org_missing_properties};
const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Violation draws of one run: element t says whether transaction t+1
// violates. Depends only on its arguments.
std::vector<bool> violation_draws(std::uint64_t seed, Scenario scenario, std::size_t run, double prob,
                                  std::size_t count);

struct TrajectoryConfig {
  double violation_prob = 0.3;
  trust::PenaltyConfig penalties;
  std::size_t cap = 10000;
  std::uint64_t seed = 1;
  std::size_t runs = 1000;
  std::size_t patient_count = 10;
  bool parallel = true;  // runs spread over OpenMP threads
  std::vector<Scenario> scenarios{kScenarios.begin(), kScenarios.end()};
};

struct RunSeries {
  std::size_t run = 0;
  std::vector<Score> scores;  // scores[0] is the value before transaction 1
  std::optional<std::size_t> transactions_to_zero;
  friend bool operator==(const RunSeries&, const RunSeries&) = default;
};

struct ScenarioSeries {
  Scenario scenario{};
  std::vector<RunSeries> runs;
  // Over runs that reached zero; NaN when none did.
  double mean_transactions_to_zero() const;
  friend bool operator==(const ScenarioSeries&, const ScenarioSeries&) = default;
};

struct TrajectoryReport {
  std::uint64_t seed = 0;
  double violation_prob = 0;
  std::size_t cap = 0;
  std::vector<ScenarioSeries> scenarios;
  friend bool operator==(const TrajectoryReport&, const TrajectoryReport&) = default;
};

// Each run drives a fresh middleware through handle_request.
TrajectoryReport run_trajectory(const TrajectoryConfig& config);

enum class Format { csv, json };
Format format_from_path(const std::filesystem::path& path);

void write_csv(const LatencyReport& report, std::ostream& out);
void write_json(const LatencyReport& report, std::ostream& out);
void write_csv(const TrajectoryReport& report, std::ostream& out);
void write_json(const TrajectoryReport& report, std::ostream& out);

// Throws Error(io) when the path cannot be written.
void emit_report(const LatencyReport& report, Format format, const std::filesystem::path& path);
void emit_report(const TrajectoryReport& report, Format format, const std::filesystem::path& path);

}  // namespace trustmw::bench
