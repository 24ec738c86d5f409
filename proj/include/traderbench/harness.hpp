#pragma once

// Run orchestration: config -> tasks -> episodes / options tasks -> report.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "traderbench/agents.hpp"
#include "traderbench/json_io.hpp"
#include "traderbench/options.hpp"
#include "traderbench/riskmetrics.hpp"
#include "traderbench/scoring.hpp"
#include "traderbench/transforms.hpp"

namespace traderbench::harness {

inline constexpr const char* kVersion = "0.1.0";

struct DataSource {
    std::string csv_path;                        // either a CSV file...
    std::optional<fixtures::FixtureSpec> fixture;  // ...or a generated fixture
    std::string symbol;                          // overrides the derived symbol when set
};

/// Options task: a position in legs on one underlying. Premiums left out of
/// the config are filled with Black-Scholes prices at (spot, rate, vol).
struct OptionsTask {
    std::string id;
    double spot = 100.0;
    double rate = 0.0;
    double vol = 0.2;
    std::vector<options::OptionLeg> legs;
};

enum class Responder { Oracle, Empty, Perturbed, Endpoint };

struct RunConfig {
    std::uint64_t sampling_seed = 42;
    std::vector<DataSource> data;
    std::vector<transforms::TransformSpec> transforms;  // one per kind
    std::vector<agents::AgentSpec> agents;
    std::string candidate_endpoint;  // wire candidate instead of (or besides) agents
    double slippage_bps = 10.0;
    double initial_cash = 10'000.0;
    std::vector<OptionsTask> options_tasks;
    std::optional<std::size_t> crypto_quota;  // default: whole pool
    std::optional<std::size_t> options_quota;
    Responder responder = Responder::Oracle;
    double stub_strategy_score = 50.0;
    double stub_risk_score = 50.0;
    int deadline_seconds = 60;
    bool parallel = true;
    std::string output_path;
};

/// Parses and validates. Relative data paths resolve against `base_dir`.
/// Throws InvalidConfig / BadArguments.
RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& c);

/// Four default specs (baseline, noisy, meta, adversarial) sharing `seed`.
std::vector<transforms::TransformSpec> default_transforms(std::uint64_t seed);

struct Task {
    std::string id;  // "crypto/<symbol>" or "options/<id>"
    scoring::Section section = scoring::Section::Crypto;
    std::size_t index = 0;  // into the loaded series or options_tasks
};

/// Stratified seeded draw per section. Throws EmptyPool when a quota exceeds
/// its pool; throws NoActiveSections when nothing is drawn.
std::vector<Task> build_tasks(const RunConfig& config, std::size_t crypto_pool, std::size_t options_pool);

std::vector<CandleSeries> load_series(const RunConfig& config);

// ---------------------------------------------------------------------------
// crypto

struct EpisodeResult {
    transforms::TransformKind kind = transforms::TransformKind::Baseline;
    std::optional<risk::RiskReport> report;
    double score = 0.0;
    std::size_t fills = 0;
    std::size_t sites = 0;
    std::vector<std::string> notes;
    std::string error;  // "CODE: message" when the episode scored 0 by failure

    bool operator==(const EpisodeResult&) const = default;
};

/// Transform, stream locked windows to the agent, fill, measure, score.
/// Never throws: failures score 0 with the reason recorded.
EpisodeResult run_crypto_episode(const CandleSeries& series, const transforms::TransformSpec& spec,
                                 const agents::Agent& agent, const sim::SimConfig& config);

struct GridCell {
    std::size_t agent;
    std::size_t series;
    std::size_t transform;
};

/// Every (agent, series, transform) cell. Results are indexed like `cells`.
std::vector<GridCell> episode_grid(std::size_t n_agents, std::size_t n_series, std::size_t n_transforms);
std::vector<EpisodeResult> run_grid(const std::vector<agents::Agent>& agents,
                                    const std::vector<CandleSeries>& series,
                                    const std::vector<transforms::TransformSpec>& specs,
                                    const sim::SimConfig& config, const std::vector<GridCell>& cells);
std::vector<EpisodeResult> run_grid_serial(const std::vector<agents::Agent>& agents,
                                           const std::vector<CandleSeries>& series,
                                           const std::vector<transforms::TransformSpec>& specs,
                                           const sim::SimConfig& config, const std::vector<GridCell>& cells);

// ---------------------------------------------------------------------------
// options

struct OptionsTruth {
    options::Greeks greeks;  // net position Greeks, theta per year
    options::StrategyPnL pnl;
};

/// Fills missing premiums; throws on invalid legs.
OptionsTask priced(OptionsTask task);
OptionsTruth options_truth(const OptionsTask& task);
/// The question a responder receives: {spot, rate, vol, legs}.
json options_question(const OptionsTask& task);

/// Answers {greeks: {...}, strategy_pnl: {...}}; may throw.
using OptionsResponder = std::function<json(const OptionsTask& task)>;

OptionsResponder oracle_responder();
OptionsResponder empty_responder();
/// Oracle with delta scaled by (1 + delta_bias).
OptionsResponder perturbed_responder(double delta_bias = 0.06);
OptionsResponder endpoint_responder(std::string candidate_endpoint, int deadline_seconds);

struct OptionsResult {
    std::string task_id;
    scoring::OptionsSubScores subs;
    bool stubbed = true;
    std::string error;
};

struct StubScorer {
    double strategy = 50.0;
    double risk = 50.0;
};

OptionsResult run_options_task(const OptionsTask& task, const OptionsResponder& responder, const StubScorer& stub);

// ---------------------------------------------------------------------------
// reporting

struct CryptoTaskResult {
    std::string task_id;
    std::vector<EpisodeResult> episodes;  // one per transform
    double score = 0.0;
};

struct CandidateResult {
    std::string name;
    std::map<std::string, double> params;
    std::vector<CryptoTaskResult> crypto;
    std::vector<OptionsResult> options;
};

/// "zero-trade", "one-trade" or "active" from per-episode fill counts.
std::string strategy_class(const CandidateResult& c);

json candidate_report(const CandidateResult& c);
json run_report(const RunConfig& config, const std::vector<Task>& tasks,
                const std::vector<CandidateResult>& candidates);
std::string summary_text(const json& report);

/// Whole pipeline. Writes the report to config.output_path when set.
json run(const RunConfig& config);

/// Deterministic pretty form used for files (sorted keys, 2-space indent).
std::string report_text(const json& report);

// ---------------------------------------------------------------------------
// regression against published tables

struct RegressionRow {
    std::string model;
    std::string column;
    double computed = 0.0;
    double published = 0.0;
    double tolerance = 0.0;
    bool pass() const;
};

/// appendixB rows -> crypto column of table5; appendixA rows -> options
/// column; table5 sections -> overall column.
std::vector<RegressionRow> regress_crypto(const json& appendix_b, const json& table5);
std::vector<RegressionRow> regress_options(const json& appendix_a, const json& table5);
std::vector<RegressionRow> regress_overall(const json& table5);

json read_json_file(const std::filesystem::path& path);

}  // namespace traderbench::harness
